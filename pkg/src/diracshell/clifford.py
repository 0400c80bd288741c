"""Exact Pauli/Dirac matrix algebra on small fixed-size complex matrices.

Representation: the standard one, with

    alpha_0 = diag(I_2, -I_2),    alpha_j = [[0, sigma_j], [sigma_j, 0]]

for j = 1, 2, 3.  All generators have exact integer or imaginary-integer
entries, so products of generators are exact in float arithmetic and the
anticommutation relations

    sigma_j sigma_k + sigma_k sigma_j = 2 delta_jk I_2
    alpha_j alpha_k + alpha_k alpha_j = 2 delta_jk I_4   (j,k = 0..3)

can be asserted with equality, not tolerance.

Scope: fixed 2x2 / 4x4 dense complex matrices only.  No general n x n
linear algebra, no alternative gamma-matrix conventions.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

ArrayC = NDArray[np.complex128]
ArrayR = NDArray[np.float64]

__all__ = [
    "PAULI",
    "ALPHA",
    "ALPHA0",
    "I2",
    "I4",
    "pauli",
    "dirac_alpha",
    "alpha_dot",
    "dagger",
    "is_hermitian",
    "anticommutator",
    "require_finite",
]


def _frozen(rows) -> ArrayC:
    m = np.array(rows, dtype=np.complex128)
    m.setflags(write=False)
    return m


I2: ArrayC = _frozen([[1, 0], [0, 1]])
I4: ArrayC = _frozen(np.eye(4))

PAULI: tuple[ArrayC, ArrayC, ArrayC] = (
    _frozen([[0, 1], [1, 0]]),
    _frozen([[0, -1j], [1j, 0]]),
    _frozen([[1, 0], [0, -1]]),
)

ALPHA0: ArrayC = _frozen(np.block([[np.eye(2), np.zeros((2, 2))],
                                   [np.zeros((2, 2)), -np.eye(2)]]))

ALPHA: tuple[ArrayC, ArrayC, ArrayC] = tuple(
    _frozen(np.block([[np.zeros((2, 2)), s], [s, np.zeros((2, 2))]]))
    for s in PAULI
)


def pauli(j: int) -> ArrayC:
    """Pauli matrix sigma_j for j in {1, 2, 3}."""
    if j not in (1, 2, 3):
        raise IndexError(f"Pauli index must be 1, 2 or 3, got {j!r}")
    return PAULI[j - 1]


def dirac_alpha(j: int) -> ArrayC:
    """Dirac matrix alpha_j for j in {0, 1, 2, 3} (standard representation)."""
    if j == 0:
        return ALPHA0
    if j in (1, 2, 3):
        return ALPHA[j - 1]
    raise IndexError(f"Dirac index must be 0..3, got {j!r}")


def alpha_dot(v) -> ArrayC:
    """Contraction alpha . v = sum_j v_j alpha_j for a real 3-vector v.

    Satisfies (alpha . v)^2 = |v|^2 I_4 by the Clifford relations.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    require_finite(v, "v")
    return v[0] * ALPHA[0] + v[1] * ALPHA[1] + v[2] * ALPHA[2]


def dagger(m: ArrayC) -> ArrayC:
    """Conjugate transpose."""
    return np.asarray(m).conj().T


def is_hermitian(m: ArrayC, tol: float = 1e-10) -> bool:
    """True if m equals its conjugate transpose within absolute tolerance."""
    m = np.asarray(m)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def anticommutator(a: ArrayC, b: ArrayC) -> ArrayC:
    return a @ b + b @ a


def require_finite(arr, name: str) -> None:
    """Reject NaN/Inf in user-supplied numeric data."""
    a = np.asarray(arr, dtype=np.complex128)
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise ValueError(f"{name} must have finite entries")
