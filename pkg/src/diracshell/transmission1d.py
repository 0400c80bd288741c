"""Reduced 1-D Dirac transmission eigenproblems on the line split at z = 0.

For tangential frequency xi', mass m, and constant potential phi the
half-line operator is

    alpha'.xi' + i alpha_3 d/dz + m alpha_0 + phi

with the shell condition a_+ u_+(0) + a_-(0) u_-(0) = 0 coupling the
traces.  Its essential spectrum is the pair of rays at distance
g = sqrt(|xi'|^2 + m^2) from phi; shell-induced bound states live in the
open gap and are located as zeros of a determinant dispersion function.

Dispersion construction: for E in the open gap set lam = E - phi and
kappa = sqrt(g^2 - lam^2) > 0.  Solutions decaying on z > 0 are
w e^(-kappa z) with (M_- - lam) w = 0 where M_- = alpha'.xi' -
i kappa alpha_3 + m alpha_0 (and M_+ with +i kappa on z < 0); since
M_-/+^2 = lam^2 I, the decaying spaces are the rank-2 ranges of
(M_-/+ + lam I).  The dispersion matrix stacks the transmission images of
orthonormal bases of the two spaces; E is an eigenvalue iff it is
singular.  |det| of the orthonormalized matrix is basis-independent, so
minima of |det| plus a smallest-singular-value certificate locate
eigenvalues without tracking the (basis-dependent) phase.  A raw
fixed-column variant is provided for derivative checks, since Hermitian
orthonormalization is not holomorphic in E.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import qr as _qr

from .clifford import ALPHA, ALPHA0, ArrayC, I4, alpha_dot, require_finite
from .shell_symbol import Frame, InteractionMatrix, STANDARD_FRAME, transmission_pair
from .spectra import SpectrumSet

__all__ = [
    "GapEdgeError",
    "ReducedSymbol1D",
    "GapEigenvalue",
    "reduced_symbol",
    "essential_rays",
    "decaying_basis",
    "dispersion_matrix",
    "dispersion_det",
    "dispersion_det_raw",
    "raw_column_selection",
    "gap_eigenvalues",
    "dispersion_curve",
    "bound_state_trace",
    "EDGE_MARGIN",
    "SV_ACCEPT_RATIO",
]

EDGE_MARGIN = 1e-6          # relative exclusion zone at the gap edges
SV_ACCEPT_RATIO = 1e-6      # smallest-singular-value acceptance threshold
QR_PIVOT_TOL = 1e-10


class GapEdgeError(ValueError):
    """Raised when the dispersion function is evaluated outside the open gap."""


@dataclass(frozen=True)
class ReducedSymbol1D:
    """Data of one reduced transmission problem: (xi', m, phi, a_pm, frame)."""

    xi: tuple[float, float]
    m: float
    phi: float
    a_plus: ArrayC
    a_minus: ArrayC
    frame: Frame = STANDARD_FRAME

    def __post_init__(self):
        require_finite([*self.xi, self.m, self.phi], "reduced symbol scalars")
        require_finite(self.a_plus, "a_plus")
        require_finite(self.a_minus, "a_minus")
        object.__setattr__(self, "xi", (float(self.xi[0]), float(self.xi[1])))

    @property
    def xi_norm(self) -> float:
        return math.hypot(self.xi[0], self.xi[1])

    @property
    def gap_halfwidth(self) -> float:
        return math.sqrt(self.xi[0] ** 2 + self.xi[1] ** 2 + self.m ** 2)

    def generators(self):
        f = self.frame
        if f.is_standard:
            return ALPHA
        return (alpha_dot(f.t1), alpha_dot(f.t2), alpha_dot(f.nu))


@dataclass(frozen=True)
class GapEigenvalue:
    """Accepted bound-state energy with its numerical certificates."""

    energy: float
    xi_norm: float
    residual: float
    min_singular_value: float
    multiplicity: int = 1


def reduced_symbol(gamma: InteractionMatrix, xi, m: float, phi: float = 0.0,
                   frame: Frame = STANDARD_FRAME) -> ReducedSymbol1D:
    """Assemble the reduced problem for a coupling and a tangential frequency."""
    a_plus, a_minus = transmission_pair(gamma, frame.nu)
    return ReducedSymbol1D(xi=(float(xi[0]), float(xi[1])), m=float(m),
                           phi=float(phi), a_plus=a_plus, a_minus=a_minus,
                           frame=frame)


def essential_rays(sym: ReducedSymbol1D) -> SpectrumSet:
    """(-inf, phi - g] U [phi + g, inf) with g = sqrt(|xi'|^2 + m^2)."""
    g = sym.gap_halfwidth
    return SpectrumSet(intervals=[(-math.inf, sym.phi - g), (sym.phi + g, math.inf)])


def _mode_matrix(sym: ReducedSymbol1D, lam, kappa, side: int) -> ArrayC:
    """M_side + lam I with M_side = xi.beta' + side * i kappa beta_3 + m alpha_0."""
    b1, b2, b3 = sym.generators()
    m_mat = sym.xi[0] * b1 + sym.xi[1] * b2 + side * 1j * kappa * b3 + sym.m * ALPHA0
    return m_mat + lam * I4


def _kappa(sym: ReducedSymbol1D, e):
    """Decay rate kappa(E) = sqrt(g^2 - (E - phi)^2); complex E allowed with
    the branch Re kappa >= 0."""
    lam = e - sym.phi
    if isinstance(e, complex):
        k = cmath.sqrt(sym.gap_halfwidth ** 2 - lam * lam)
        if k.real < 0:
            k = -k
        return lam, k
    g = sym.gap_halfwidth
    if not abs(lam) < g:
        raise GapEdgeError(f"E = {e} is outside the open gap (half-width {g})")
    k = math.sqrt(g * g - lam * lam)
    if k == 0.0:
        raise GapEdgeError("kappa = 0 at the gap edge")
    return lam, k


def decaying_basis(sym: ReducedSymbol1D, e: float, side: int) -> ArrayC:
    """Orthonormal 4x2 basis of the solutions decaying as z -> side*inf.

    side = +1: solutions w e^(-kappa z) on z > 0 (built from M_-);
    side = -1: solutions w e^(+kappa z) on z < 0 (built from M_+).
    """
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    lam, kappa = _kappa(sym, e)
    k_mat = _mode_matrix(sym, lam, kappa, -side)
    q, r, _ = _qr(k_mat, pivoting=True)
    if abs(r[1, 1]) <= QR_PIVOT_TOL * max(1.0, abs(r[0, 0])):
        raise GapEdgeError("decaying-solution space degenerated below rank 2")
    return q[:, :2]


def dispersion_matrix(sym: ReducedSymbol1D, e: float) -> ArrayC:
    """4x4 matrix (a_+ W_-, a_- W_+) whose singularity marks a gap eigenvalue."""
    w_minus = decaying_basis(sym, e, +1)
    w_plus = decaying_basis(sym, e, -1)
    return np.column_stack([sym.a_plus @ w_minus, sym.a_minus @ w_plus])


def dispersion_det(sym: ReducedSymbol1D, e: float) -> complex:
    """Determinant of the orthonormalized dispersion matrix.

    |det| is independent of the orthonormal bases chosen for the two
    decaying spaces and vanishes exactly at the gap eigenvalues; the phase
    is basis-dependent and carries no information.
    """
    return complex(np.linalg.det(dispersion_matrix(sym, e)))


def raw_column_selection(sym: ReducedSymbol1D, e: float) -> tuple:
    """Column index pairs, per side, making the raw mode matrices rank-2 at e."""
    out = []
    lam, kappa = _kappa(sym, complex(e))
    for side in (+1, -1):
        k_mat = _mode_matrix(sym, lam, kappa, -side)
        _, _, piv = _qr(k_mat, pivoting=True)
        out.append((int(piv[0]), int(piv[1])))
    return tuple(out)


def dispersion_det_raw(sym: ReducedSymbol1D, e, selection=None) -> complex:
    """Determinant built from fixed raw columns of (M_-/+ + lam I).

    With a fixed column selection this is holomorphic in E on the open gap
    (entries are polynomial in lam and kappa(E)), unlike the orthonormalized
    determinant; it vanishes at the same energies.  Accepts complex E.
    """
    if selection is None:
        selection = raw_column_selection(sym, complex(e).real)
    lam, kappa = _kappa(sym, e if isinstance(e, complex) else float(e))
    cols = []
    for side, pick, a_mat in ((+1, selection[0], sym.a_plus),
                              (-1, selection[1], sym.a_minus)):
        k_mat = _mode_matrix(sym, lam, kappa, -side)
        cols.append(a_mat @ k_mat[:, list(pick)])
    return complex(np.linalg.det(np.column_stack(cols)))


def _golden_refine(f, a: float, b: float, tol: float) -> float:
    """Golden-section minimizer of f on [a, b] to interval width tol."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def gap_eigenvalues(sym: ReducedSymbol1D, n_scan: int = 512, tol: float = 1e-10,
                    det_threshold: float | None = None,
                    edge_margin: float = EDGE_MARGIN,
                    sv_ratio: float = SV_ACCEPT_RATIO) -> list[GapEigenvalue]:
    """Locate gap eigenvalues by scanning |det|, refining minima, and
    certifying candidates by the smallest singular value.

    Every local minimum of the scan is refined by golden section to width
    ``tol`` (``det_threshold`` optionally prunes refinement candidates); a
    refined energy is accepted only if the smallest singular value of the
    dispersion matrix drops below ``sv_ratio`` times the largest.  Zeros
    are typically quadratic minima of |det| (spin-degenerate pairs), which
    is why sign changes are not used.  An empty list is a valid result.
    """
    if n_scan < 16:
        raise ValueError("n_scan must be at least 16")
    if tol <= 0:
        raise ValueError("tol must be positive")
    g = sym.gap_halfwidth
    if g == 0.0:
        return []
    lo = sym.phi - (1.0 - edge_margin) * g
    hi = sym.phi + (1.0 - edge_margin) * g
    es = np.linspace(lo, hi, n_scan)
    vals = np.array([abs(dispersion_det(sym, float(e))) for e in es])

    def absdet(e):
        return abs(dispersion_det(sym, float(e)))

    candidates = []
    for i in range(n_scan):
        left = vals[i - 1] if i > 0 else math.inf
        right = vals[i + 1] if i < n_scan - 1 else math.inf
        if vals[i] <= left and vals[i] <= right:
            if det_threshold is not None and vals[i] > det_threshold:
                continue
            a = es[i - 1] if i > 0 else es[0]
            b = es[i + 1] if i < n_scan - 1 else es[-1]
            candidates.append(_golden_refine(absdet, float(a), float(b), tol))

    accepted = []
    for e_star in candidates:
        d_mat = dispersion_matrix(sym, e_star)
        s = np.linalg.svd(d_mat, compute_uv=False)
        if s[-1] < sv_ratio * s[0]:
            mult = int(np.sum(s < sv_ratio * s[0]))
            accepted.append(GapEigenvalue(
                energy=float(e_star), xi_norm=sym.xi_norm,
                residual=float(np.prod(s)),
                min_singular_value=float(s[-1]),
                multiplicity=mult))

    accepted.sort(key=lambda ev: ev.energy)
    dedup: list[GapEigenvalue] = []
    merge_width = max(50.0 * tol, 1e-12 * max(1.0, g))
    for ev in accepted:
        if dedup and abs(ev.energy - dedup[-1].energy) <= merge_width:
            if ev.min_singular_value < dedup[-1].min_singular_value:
                dedup[-1] = ev
            continue
        dedup.append(ev)
    return dedup


def dispersion_curve(gamma: InteractionMatrix, m: float, phi: float,
                     xi_grid, tol: float = 1e-10, n_scan: int = 512,
                     frame: Frame = STANDARD_FRAME) -> list[tuple[float, tuple[float, ...]]]:
    """Gap eigenvalues per |xi'| value, computed at xi' = (|xi'|, 0).

    Rotational covariance (eigenvalues depend on xi' only through |xi'|)
    justifies the axis-aligned representative; it is verified by property
    tests rather than assumed silently.  Returns rows in increasing |xi'|.
    """
    xs = [float(x) for x in xi_grid]
    if not xs:
        raise ValueError("xi_grid must be nonempty")
    if any(x < 0 for x in xs):
        raise ValueError("xi_grid entries must be nonnegative")
    rows = []
    for x in sorted(xs):
        sym = reduced_symbol(gamma, (x, 0.0), m, phi, frame=frame)
        evs = gap_eigenvalues(sym, n_scan=n_scan, tol=tol)
        rows.append((x, tuple(ev.energy for ev in evs)))
    return rows


def bound_state_trace(sym: ReducedSymbol1D, e: float):
    """Null vector of the dispersion matrix split into the two boundary traces.

    Returns (u_plus0, u_minus0, kappa): the z -> 0+ and z -> 0- traces of
    the candidate bound state u(z) = u_pm0 e^(-/+ kappa z), normalized to
    unit combined norm.  Used to verify the transmission condition and the
    ODE residual for accepted eigenvalues.
    """
    w_minus = decaying_basis(sym, e, +1)
    w_plus = decaying_basis(sym, e, -1)
    d_mat = np.column_stack([sym.a_plus @ w_minus, sym.a_minus @ w_plus])
    _, _, vh = np.linalg.svd(d_mat)
    c = vh[-1, :].conj()
    u_plus0 = w_minus @ c[:2]
    u_minus0 = w_plus @ c[2:]
    _, kappa = _kappa(sym, float(e))
    return u_plus0, u_minus0, kappa
