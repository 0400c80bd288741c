"""Symbol-level machinery for the delta-shell transmission problem.

Builds the flat model objects attached to a point of the interaction
surface: the 2x2 blocks Lambda_pm, the C^4 kernel vectors h of the frozen
half-space symbol, the transmission matrices a_pm, and the 4x4 ellipticity
matrix L whose determinant decides solvability.  Exposes the local,
uniform, and parameter-dependent ellipticity checks together with closed
forms for the diagonal coupling families.

Coupling normalization
----------------------
The transmission condition is  a_+ u_+ + a_- u_- = 0  on the shell, with

    a_pm(s) = K(s) -/+ i alpha . nu(s)

where K is *half* the coupling matrix of the delta potential.  The three
interaction families store their parameters as follows:

* ``diagonal_pair(gamma, eps)``: K = diag(gamma I_2, eps I_2), i.e. the
  halved values that enter a_pm directly (full coupling 2K).
* ``electrostatic_lorentz(eta, tau)``: full coupling eta I_4 + tau alpha_0,
  so K = (eta I_4 + tau alpha_0) / 2.  The ellipticity margin for this
  family is |eta^2 - tau^2 - 4|.
* ``general(matrix)``: full coupling as given, K = matrix / 2.

Determinant magnitude for the diagonal family (derived, verified against
brute-force assembly):

    |det L(xi', mu)| = 4 rho^4 ((1 - gamma*eps)^2 + (gamma+eps)^2 mu^2/rho^2)

with rho^2 = |xi'|^2 + mu^2.  On the parameter sphere rho = 1 the infimum
sits on the mu = 0 equator and equals 4 (1 - gamma*eps)^2; the sphere grid
used by the parameter-dependent check therefore always contains equator
points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.linalg import qr as _qr

from .clifford import (
    ALPHA0,
    ArrayC,
    I4,
    alpha_dot,
    is_hermitian,
    require_finite,
)

__all__ = [
    "DegenerateSymbolError",
    "InteractionMatrix",
    "Frame",
    "STANDARD_FRAME",
    "CotangentPoint",
    "LSReport",
    "lambda_pm",
    "h_basis",
    "transmission_pair",
    "kernel_columns",
    "ls_matrix",
    "ls_abs_det",
    "ls_check_local",
    "ls_check_uniform",
    "ls_check_param",
    "ls_check_param_uniform",
    "closed_form_diag_det",
    "diag_abs_det",
    "electrostatic_lorentz_margin",
    "hermitian_check",
    "unit_circle",
    "param_sphere_grid",
    "DEFAULT_LS_THRESHOLD",
]

DEFAULT_LS_THRESHOLD = 1e-8


class DegenerateSymbolError(ValueError):
    """Raised when a symbol is evaluated at rho = 0."""


# ---------------------------------------------------------------------------
# interaction matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InteractionMatrix:
    """Shell coupling in general, diagonal-pair, or electrostatic+Lorentz form.

    Use the classmethod constructors; ``kind`` is one of ``"general"``,
    ``"diagonal_pair"``, ``"electrostatic_lorentz"``.
    """

    kind: str
    gamma: float = 0.0
    eps: float = 0.0
    eta: float = 0.0
    tau: float = 0.0
    matrix: ArrayC | None = field(default=None, repr=False)

    @classmethod
    def general(cls, matrix) -> "InteractionMatrix":
        m = np.array(matrix, dtype=np.complex128)
        if m.shape != (4, 4):
            raise ValueError(f"general coupling must be 4x4, got {m.shape}")
        require_finite(m, "coupling matrix")
        m.setflags(write=False)
        return cls(kind="general", matrix=m)

    @classmethod
    def diagonal_pair(cls, gamma: float, eps: float) -> "InteractionMatrix":
        require_finite([gamma, eps], "diagonal pair")
        return cls(kind="diagonal_pair", gamma=float(gamma), eps=float(eps))

    @classmethod
    def electrostatic_lorentz(cls, eta: float, tau: float) -> "InteractionMatrix":
        require_finite([eta, tau], "electrostatic/Lorentz strengths")
        return cls(kind="electrostatic_lorentz", eta=float(eta), tau=float(tau))

    @classmethod
    def zero(cls) -> "InteractionMatrix":
        return cls.diagonal_pair(0.0, 0.0)

    def coupling_matrix(self) -> ArrayC:
        """Full coupling matrix of the delta potential."""
        if self.kind == "general":
            return np.array(self.matrix)
        if self.kind == "diagonal_pair":
            return np.diag([2 * self.gamma, 2 * self.gamma,
                            2 * self.eps, 2 * self.eps]).astype(np.complex128)
        if self.kind == "electrostatic_lorentz":
            return self.eta * np.eye(4, dtype=np.complex128) + self.tau * ALPHA0
        raise ValueError(f"unknown interaction kind {self.kind!r}")

    def half_coupling(self) -> ArrayC:
        """The matrix K entering the transmission matrices a_pm = K -/+ i alpha.nu."""
        return 0.5 * self.coupling_matrix()

    @property
    def hermitian(self) -> bool:
        return is_hermitian(self.coupling_matrix())

    def diag_blocks(self) -> tuple[float, float] | None:
        """(gamma, eps) halved diagonal blocks when the family has them."""
        if self.kind == "diagonal_pair":
            return self.gamma, self.eps
        if self.kind == "electrostatic_lorentz":
            return 0.5 * (self.eta + self.tau), 0.5 * (self.eta - self.tau)
        return None

    def cache_key(self) -> tuple:
        if self.kind == "general":
            return ("general", self.matrix.round(14).tobytes())
        if self.kind == "diagonal_pair":
            return ("diagonal_pair", round(self.gamma, 14), round(self.eps, 14))
        return ("electrostatic_lorentz", round(self.eta, 14), round(self.tau, 14))


# ---------------------------------------------------------------------------
# frames and cotangent points
# ---------------------------------------------------------------------------


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("zero vector has no direction")
    return v / n


@dataclass(frozen=True)
class Frame:
    """Orthonormal right-handed tangent frame (t1, t2, nu) at a surface point."""

    t1: np.ndarray
    t2: np.ndarray
    nu: np.ndarray

    def __post_init__(self):
        for name in ("t1", "t2", "nu"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (3,):
                raise ValueError(f"{name} must be a 3-vector")
            require_finite(v, name)
            v = v.copy()
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        g = np.array([
            [self.t1 @ self.t1, self.t1 @ self.t2, self.t1 @ self.nu],
            [self.t2 @ self.t1, self.t2 @ self.t2, self.t2 @ self.nu],
            [self.nu @ self.t1, self.nu @ self.t2, self.nu @ self.nu],
        ])
        if np.max(np.abs(g - np.eye(3))) > 1e-10:
            raise ValueError("frame is not orthonormal to 1e-10")
        if np.max(np.abs(np.cross(self.t1, self.t2) - self.nu)) > 1e-10:
            raise ValueError("frame is not right-handed (t1 x t2 != nu)")

    @property
    def is_standard(self) -> bool:
        return (np.array_equal(self.t1, [1.0, 0.0, 0.0])
                and np.array_equal(self.t2, [0.0, 1.0, 0.0])
                and np.array_equal(self.nu, [0.0, 0.0, 1.0]))

    @classmethod
    def from_normal(cls, nu) -> "Frame":
        """Deterministic right-handed frame completing the unit normal nu."""
        nu = _unit(nu)
        ref = np.array([0.0, 0.0, 1.0]) if abs(nu[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
        t1 = _unit(np.cross(ref, nu))
        t2 = np.cross(nu, t1)
        return cls(t1=t1, t2=t2, nu=nu)

    def flipped(self) -> "Frame":
        """Same tangent plane with the normal reversed (stays right-handed)."""
        return Frame(t1=self.t2.copy(), t2=self.t1.copy(), nu=-self.nu)


STANDARD_FRAME = Frame(
    t1=np.array([1.0, 0.0, 0.0]),
    t2=np.array([0.0, 1.0, 0.0]),
    nu=np.array([0.0, 0.0, 1.0]),
)


@dataclass(frozen=True)
class CotangentPoint:
    """Frequency point (xi', mu) with rho = sqrt(|xi'|^2 + mu^2) > 0."""

    xi: tuple[float, float]
    mu: float = 0.0

    def __post_init__(self):
        require_finite([*self.xi, self.mu], "cotangent point")
        if self.rho == 0.0:
            raise DegenerateSymbolError("rho = 0: symbol undefined")

    @property
    def rho(self) -> float:
        return math.sqrt(self.xi[0] ** 2 + self.xi[1] ** 2 + self.mu ** 2)


# ---------------------------------------------------------------------------
# symbol blocks
# ---------------------------------------------------------------------------


def _rho(xi, mu: float) -> float:
    r = math.sqrt(xi[0] * xi[0] + xi[1] * xi[1] + mu * mu)
    if r == 0.0:
        raise DegenerateSymbolError("rho = 0: symbol undefined")
    return r


def lambda_pm(xi, mu: float, sign: int) -> ArrayC:
    """2x2 block Lambda_pm = sigma'.xi' pm i rho sigma_3 = [[pm i rho, conj(s)], [s, -/+ i rho]].

    Here s = xi_1 + i xi_2 and rho = sqrt(|xi'|^2 + mu^2).  Satisfies
    Lambda_pm^2 = -mu^2 I_2 and Lambda_pm^* = Lambda_-/+.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    r = _rho(xi, mu)
    zeta = xi[0] + 1j * xi[1]
    return np.array([[sign * 1j * r, np.conj(zeta)], [zeta, -sign * 1j * r]],
                    dtype=np.complex128)


def h_basis(xi, mu: float) -> tuple[ArrayC, ArrayC, ArrayC, ArrayC]:
    """Kernel vectors (h_{1,+}, h_{2,+}, h_{1,-}, h_{2,-}) of the frozen symbol.

    Each h_pm solves (alpha'.xi' pm i rho alpha_3 - i mu I_4) h = 0.  For
    mu != 0 these are the explicit columns

        h_{1,pm} = (i mu e_1, Lambda_pm e_1),  h_{2,pm} = (Lambda_pm e_2, i mu e_2),

    with norm^2 = 2 rho^2; at mu = 0 the degenerate-limit pair

        h_{1,pm} = (Lambda_pm e_1, 0),  h_{2,pm} = (0, Lambda_pm e_1),

    with norm^2 = 2 |xi'|^2, spanning the same kernel.
    """
    _rho(xi, mu)
    out = []
    for sign in (1, -1):
        lam = lambda_pm(xi, mu, sign)
        if mu == 0.0:
            col = lam[:, 0]
            h1 = np.concatenate([col, [0.0, 0.0]])
            h2 = np.concatenate([[0.0, 0.0], col])
        else:
            h1 = np.concatenate([[1j * mu, 0.0], lam[:, 0]])
            h2 = np.concatenate([lam[:, 1], [0.0, 1j * mu]])
        out.append((np.asarray(h1, dtype=np.complex128),
                    np.asarray(h2, dtype=np.complex128)))
    (h1p, h2p), (h1m, h2m) = out
    return h1p, h2p, h1m, h2m


def transmission_pair(gamma: InteractionMatrix, nu) -> tuple[ArrayC, ArrayC]:
    """Transmission matrices (a_+, a_-) = K -/+ i alpha.nu for a unit normal."""
    nu = np.asarray(nu, dtype=float)
    require_finite(nu, "nu")
    if abs(np.linalg.norm(nu) - 1.0) > 1e-10:
        raise ValueError("normal vector must be unit length (1e-10)")
    k = gamma.half_coupling()
    an = alpha_dot(nu)
    return k - 1j * an, k + 1j * an


def kernel_columns(betas, xi, mu: float, sign: int) -> ArrayC:
    """4x2 orthogonal kernel basis of (M_sign - i mu I) scaled to norm sqrt(2) rho.

    M_sign = xi_1 beta_1 + xi_2 beta_2 + sign i rho beta_3 is rank-2 with
    M_sign^2 = -mu^2 I_4; the kernel equals the range of M_sign + i mu I,
    extracted by column-pivoted QR.
    """
    r = _rho(xi, mu)
    m = xi[0] * betas[0] + xi[1] * betas[1] + sign * 1j * r * betas[2]
    theta = m + 1j * mu * I4
    q, _, _ = _qr(theta, pivoting=True)
    return math.sqrt(2.0) * r * q[:, :2]


def _h_pair_matrix(xi, mu: float, sign: int) -> ArrayC:
    h1p, h2p, h1m, h2m = h_basis(xi, mu)
    if sign == 1:
        return np.column_stack([h1p, h2p])
    return np.column_stack([h1m, h2m])


def ls_matrix(gamma: InteractionMatrix, frame: Frame, xi, mu: float = 0.0) -> ArrayC:
    """Ellipticity matrix with columns (a_+ h_{-,1}, a_+ h_{-,2}, a_- h_{+,1}, a_- h_{+,2}).

    In the standard frame the kernel vectors are the explicit ones from
    :func:`h_basis`; for a general frame the generators (alpha_1, alpha_2,
    alpha_3) are replaced by (alpha.t1, alpha.t2, alpha.nu) and the kernel
    basis is extracted by pivoted QR, scaled to the same column norms.
    |det| is frame-independent for the rotation-invariant coupling
    families; the determinant's sign/phase is basis-dependent, so all
    pass/fail decisions use |det|.
    """
    _rho(xi, mu)
    a_plus, a_minus = transmission_pair(gamma, frame.nu)
    if frame.is_standard:
        h_plus = _h_pair_matrix(xi, mu, +1)
        h_minus = _h_pair_matrix(xi, mu, -1)
    else:
        betas = (alpha_dot(frame.t1), alpha_dot(frame.t2), alpha_dot(frame.nu))
        h_plus = kernel_columns(betas, xi, mu, +1)
        h_minus = kernel_columns(betas, xi, mu, -1)
    return np.column_stack([a_plus @ h_minus, a_minus @ h_plus])


def ls_abs_det(gamma: InteractionMatrix, frame: Frame, xi, mu: float = 0.0) -> float:
    return float(abs(np.linalg.det(ls_matrix(gamma, frame, xi, mu))))


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------


def unit_circle(n: int) -> np.ndarray:
    """n deterministic points xi' on the unit circle, shape (n, 2)."""
    if n < 1:
        raise ValueError("need at least one circle point")
    t = 2.0 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(t), np.sin(t)])


def param_sphere_grid(n: int) -> np.ndarray:
    """Deterministic grid on the upper hemisphere of rho = 1, shape (>=n, 3).

    Rows are (xi_1, xi_2, mu) with mu >= 0.  A Fibonacci lattice covers the
    open hemisphere; an explicit equator ring (mu = 0) is always appended
    because the diagonal-family infimum is attained there.  The mu < 0
    half follows from the conjugation symmetry |det L(xi', -mu)| =
    |det L(xi', mu)|, which callers verify on mirrored spot checks rather
    than assume.
    """
    if n < 8:
        raise ValueError("parameter grid needs at least 8 points")
    n_eq = max(8, n // 4)
    k = np.arange(n)
    mu = (k + 0.5) / n
    r = np.sqrt(1.0 - mu ** 2)
    golden = math.pi * (3.0 - math.sqrt(5.0))
    phi = golden * k
    hemi = np.column_stack([r * np.cos(phi), r * np.sin(phi), mu])
    eq = np.column_stack([unit_circle(n_eq), np.zeros(n_eq)])
    return np.vstack([eq, hemi])


# ---------------------------------------------------------------------------
# reports and checks
# ---------------------------------------------------------------------------


@dataclass
class LSReport:
    """Result of an ellipticity sweep: infimum of |det L| over a sample grid."""

    min_abs_det: float
    argmin: tuple          # (sample_id, xi tuple, mu)
    samples: list          # (sample_id, point, min |det| at that sample)
    passed: bool
    threshold: float
    warnings: list = field(default_factory=list)

    def to_jsonable(self) -> dict:
        sid, xi, mu = self.argmin
        return {
            "min_abs_det": self.min_abs_det,
            "argmin": {"sample": sid, "xi": list(xi), "mu": mu},
            "pass": self.passed,
            "threshold": self.threshold,
            "n_samples": len(self.samples),
            "warnings": list(self.warnings),
        }


def _as_field(gamma_field) -> Callable:
    if isinstance(gamma_field, InteractionMatrix):
        im = gamma_field
        return lambda sample: im
    return gamma_field


def ls_check_local(gamma: InteractionMatrix, frame: Frame, n_xi: int = 64,
                   threshold: float = DEFAULT_LS_THRESHOLD) -> LSReport:
    """Pointwise check: min over |xi'| = 1 (mu = 0) of |det L| at one point."""
    if n_xi < 4:
        raise ValueError("n_xi must be at least 4")
    best = math.inf
    arg = (0, (1.0, 0.0), 0.0)
    for xi in unit_circle(n_xi):
        d = ls_abs_det(gamma, frame, xi, 0.0)
        if d < best:
            best = d
            arg = (0, (float(xi[0]), float(xi[1])), 0.0)
    rep = LSReport(min_abs_det=best, argmin=arg,
                   samples=[(0, None, best)],
                   passed=best > threshold, threshold=threshold)
    return rep


def ls_check_uniform(surface, gamma_field, n_s: int = 64, n_xi: int = 64,
                     threshold: float = DEFAULT_LS_THRESHOLD) -> LSReport:
    """Uniform check: inf over surface samples and |xi'| = 1 of |det L|."""
    field_fn = _as_field(gamma_field)
    samples = surface.sample(n_s)
    if not samples:
        raise ValueError("surface produced no samples")
    circle = unit_circle(n_xi)
    best = math.inf
    arg = (0, (1.0, 0.0), 0.0)
    rows = []
    for sid, smp in enumerate(samples):
        gam = field_fn(smp)
        local = math.inf
        for xi in circle:
            d = ls_abs_det(gam, smp.frame, xi, 0.0)
            if d < local:
                local = d
                local_xi = (float(xi[0]), float(xi[1]))
        rows.append((sid, tuple(np.round(smp.point, 12)), local))
        if local < best:
            best = local
            arg = (sid, local_xi, 0.0)
    return LSReport(min_abs_det=best, argmin=arg, samples=rows,
                    passed=best > threshold, threshold=threshold)


def ls_check_param(gamma: InteractionMatrix, frame: Frame, n_grid: int = 128,
                   threshold: float = DEFAULT_LS_THRESHOLD,
                   n_mirror: int = 8) -> LSReport:
    """Parameter-dependent check: min of |det L| on the sphere rho = 1.

    Evaluates the mu >= 0 hemisphere plus the equator; verifies the
    conjugation symmetry on ``n_mirror`` mirrored points and falls back to
    the full sphere if the symmetry fails beyond 1e-10.
    """
    grid = param_sphere_grid(n_grid)
    warnings = []
    step = max(1, len(grid) // max(1, n_mirror))
    asym = 0.0
    for row in grid[::step][:n_mirror]:
        if row[2] == 0.0:
            continue
        d_up = ls_abs_det(gamma, frame, row[:2], row[2])
        d_dn = ls_abs_det(gamma, frame, row[:2], -row[2])
        asym = max(asym, abs(d_up - d_dn))
    if asym > 1e-10:
        warnings.append(f"mu-reflection symmetry violated by {asym:.3e}; "
                        "evaluating the full sphere")
        grid = np.vstack([grid, grid * np.array([1.0, 1.0, -1.0])])
    best = math.inf
    arg = (0, (1.0, 0.0), 0.0)
    for row in grid:
        d = ls_abs_det(gamma, frame, row[:2], row[2])
        if d < best:
            best = d
            arg = (0, (float(row[0]), float(row[1])), float(row[2]))
    return LSReport(min_abs_det=best, argmin=arg, samples=[(0, None, best)],
                    passed=best > threshold, threshold=threshold,
                    warnings=warnings)


def ls_check_param_uniform(surface, gamma_field, n_s: int = 32, n_grid: int = 128,
                           threshold: float = DEFAULT_LS_THRESHOLD) -> LSReport:
    """Parameter-dependent check with the additional infimum over surface samples."""
    field_fn = _as_field(gamma_field)
    samples = surface.sample(n_s)
    if not samples:
        raise ValueError("surface produced no samples")
    best = math.inf
    arg = (0, (1.0, 0.0), 0.0)
    rows = []
    warnings: list[str] = []
    for sid, smp in enumerate(samples):
        rep = ls_check_param(field_fn(smp), smp.frame, n_grid, threshold)
        rows.append((sid, tuple(np.round(smp.point, 12)), rep.min_abs_det))
        warnings.extend(rep.warnings)
        if rep.min_abs_det < best:
            best = rep.min_abs_det
            arg = (sid, rep.argmin[1], rep.argmin[2])
    return LSReport(min_abs_det=best, argmin=arg, samples=rows,
                    passed=best > threshold, threshold=threshold,
                    warnings=sorted(set(warnings)))


# ---------------------------------------------------------------------------
# closed forms and self-adjointness preconditions
# ---------------------------------------------------------------------------


class DiagClosedForms(NamedTuple):
    """The two competing closed-form candidates for |det L|^2 of the diagonal family."""

    quadratic: float   # 16 |xi'|^8 (1 - gamma*eps)^2, flat (mu = 0) variant
    quartic: float     # 16 rho^8   (1 - gamma*eps)^4, parameter-sphere variant


def closed_form_diag_det(gamma: float, eps: float, xi_norm: float,
                         mu: float = 0.0) -> DiagClosedForms:
    """Both closed-form candidates for |det L|^2 of diag(gamma, eps) coupling.

    The two forms disagree for generic gamma*eps (the margin enters
    squared in one and fourth-power in the other); numeric assembly
    matches the quartic form at mu = 0.  Both are returned so reports can
    name the matching one instead of hiding the discrepancy; see
    :func:`diag_abs_det` for the full mu-dependent magnitude.
    """
    margin = 1.0 - gamma * eps
    rho2 = xi_norm * xi_norm + mu * mu
    return DiagClosedForms(
        quadratic=16.0 * xi_norm ** 8 * margin ** 2,
        quartic=16.0 * rho2 ** 4 * margin ** 4,
    )


def diag_abs_det(gamma: float, eps: float, xi_norm: float, mu: float = 0.0) -> float:
    """Exact |det L| for diag(gamma, eps) coupling, any (xi', mu).

    |det L| = 4 rho^4 ((1 - gamma*eps)^2 + (gamma+eps)^2 mu^2 / rho^2);
    reduces to 4 rho^4 (1 - gamma*eps)^2 on the mu = 0 equator, where the
    sphere infimum is attained.
    """
    rho2 = xi_norm * xi_norm + mu * mu
    if rho2 == 0.0:
        raise DegenerateSymbolError("rho = 0: symbol undefined")
    margin = 1.0 - gamma * eps
    return 4.0 * rho2 ** 2 * (margin * margin + (gamma + eps) ** 2 * mu * mu / rho2)


def electrostatic_lorentz_margin(eta: float, tau: float) -> float:
    """Ellipticity/self-adjointness margin |eta^2 - tau^2 - 4| for the
    electrostatic+Lorentz family (zero exactly on the degenerate hyperbola)."""
    return abs(eta * eta - tau * tau - 4.0)


def hermitian_check(gamma_field, surface, n_s: int = 32, tol: float = 1e-10) -> bool:
    """True if the coupling matrix is Hermitian at every surface sample."""
    field_fn = _as_field(gamma_field)
    for smp in surface.sample(n_s):
        m = field_fn(smp).coupling_matrix()
        if not is_hermitian(m, tol):
            return False
    return True
