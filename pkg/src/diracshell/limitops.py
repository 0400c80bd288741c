"""Limit operators at infinity and essential-spectrum assembly.

For slowly oscillating regular potentials the operators obtained by
translating coefficients to infinity are constant-coefficient Dirac
operators, one per partial limit of the electrostatic potential; a
surface that is conic at infinity additionally contributes half-space
transmission models along its asymptotic directions.  The essential
spectrum is the union of all their spectra:

* free rays (-inf, M_sup - |m|] U [M_inf + |m|, inf) from the partial
  limits [M_inf, M_sup] of the potential, evaluated in closed form;
* for each asymptotic shell direction, the gap eigenvalue curves of the
  reduced 1-D transmission family, intersected with the open mass gap.

Partial-limit sets are declared model data (limsup/liminf of a black-box
function is not computable); a numeric ray-sampling estimator provides a
bracket-match diagnostic only.  The magnetic vector potential never enters
any formula: descriptors and spectra are constructed without reading it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .shell_symbol import Frame, InteractionMatrix
from .spectra import SpectrumSet, free_spectrum, spectrum_union
from .transmission1d import dispersion_curve

__all__ = [
    "ConstantPotential",
    "RadialSOPotential",
    "DirectionalSOPotential",
    "PotentialModel",
    "PartialLimits",
    "partial_limits",
    "CouplingField",
    "LimitOperatorDescriptor",
    "enumerate_limits",
    "essential_spectrum",
    "EssentialSpectrumResult",
    "SpectrumSet",
    "free_spectrum",
    "spectrum_union",
]


# ---------------------------------------------------------------------------
# potential models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantPotential:
    value: float = 0.0

    def __call__(self, x) -> float:
        return self.value

    def limit_values(self):
        return ("finite", (self.value,))


@dataclass(frozen=True)
class RadialSOPotential:
    """base + amplitude * profile(|x|) with a declared partial-limit set.

    The built-in ``sin_log`` profile sin(log(1 + r)) oscillates ever more
    slowly, so every value of [base - |amplitude|, base + |amplitude|] is a
    partial limit at infinity.
    """

    base: float = 0.0
    amplitude: float = 1.0
    profile: str = "sin_log"

    def __post_init__(self):
        if self.profile != "sin_log":
            raise ValueError(f"unknown slowly oscillating profile {self.profile!r}")

    def __call__(self, x) -> float:
        r = float(np.linalg.norm(np.asarray(x, dtype=float)))
        return self.base + self.amplitude * math.sin(math.log1p(r))

    def limit_values(self):
        lo = self.base - abs(self.amplitude)
        hi = self.base + abs(self.amplitude)
        return ("interval", (lo, hi))


@dataclass(frozen=True)
class DirectionalSOPotential:
    """Per-direction limits omega -> Phi_inf(omega) with a declared value set."""

    limit_fn: Callable
    declared_values: tuple

    def __post_init__(self):
        if not self.declared_values:
            raise ValueError("declared partial-limit set must be nonempty")

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x)
        if r == 0:
            return float(min(self.declared_values))
        return float(self.limit_fn(x / r))

    def limit_at(self, omega) -> float:
        return float(self.limit_fn(np.asarray(omega, dtype=float)))

    def limit_values(self):
        return ("finite", tuple(sorted(self.declared_values)))


@dataclass(frozen=True)
class PotentialModel:
    """Electrostatic part plus an optional vector potential.

    The vector potential is carried for completeness but is never read by
    the spectral formulas (slowly oscillating magnetic potentials do not
    move the essential spectrum); tests assert object-level independence.
    """

    phi: ConstantPotential | RadialSOPotential | DirectionalSOPotential
    vector: tuple | None = None


@dataclass(frozen=True)
class PartialLimits:
    m_inf: float
    m_sup: float
    limit_set: tuple                 # ("interval", (lo, hi)) | ("finite", values)
    empirical: tuple[float, float]
    consistent: bool


def partial_limits(model: PotentialModel, r_max: float = 1e3,
                   n_ray: int = 4000, n_dirs: int = 16,
                   bracket_tol: float = 1e-2) -> PartialLimits:
    """Declared liminf/limsup of the potential at infinity plus a sampled
    empirical bracket (diagnostic only, never authoritative)."""
    phi = model.phi
    kind, data = phi.limit_values()
    if kind == "interval":
        lo, hi = data
    else:
        lo, hi = min(data), max(data)

    golden = math.pi * (3.0 - math.sqrt(5.0))
    k = np.arange(n_dirs)
    z = 1.0 - (2.0 * k + 1.0) / n_dirs
    rr = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    dirs = np.column_stack([rr * np.cos(golden * k), rr * np.sin(golden * k), z])
    radii = np.geomspace(1.0, r_max, n_ray)
    emp_lo, emp_hi = math.inf, -math.inf
    for w in dirs:
        vals = [phi(r * w) for r in radii]
        emp_lo = min(emp_lo, min(vals))
        emp_hi = max(emp_hi, max(vals))
    consistent = (emp_lo >= lo - bracket_tol and emp_hi <= hi + bracket_tol
                  and emp_lo <= lo + bracket_tol and emp_hi >= hi - bracket_tol)
    return PartialLimits(m_inf=lo, m_sup=hi, limit_set=(kind, tuple(data)),
                         empirical=(emp_lo, emp_hi), consistent=consistent)


# ---------------------------------------------------------------------------
# coupling fields and limit-operator descriptors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CouplingField:
    """Coupling as a function of the surface sample, with declared behavior
    at the asymptotic directions (a limit function, or a vanishing flag)."""

    value_fn: Callable
    limit_fn: Callable | None = None
    vanishes_at_infinity: bool = False

    @classmethod
    def constant(cls, gamma: InteractionMatrix) -> "CouplingField":
        return cls(value_fn=lambda sample: gamma, limit_fn=lambda omega: gamma)

    @classmethod
    def vanishing(cls, value_fn: Callable) -> "CouplingField":
        return cls(value_fn=value_fn, vanishes_at_infinity=True)

    def __call__(self, sample) -> InteractionMatrix:
        return self.value_fn(sample)

    def limit_at(self, omega) -> InteractionMatrix:
        if self.vanishes_at_infinity:
            return InteractionMatrix.zero()
        if self.limit_fn is None:
            raise ValueError("coupling limit at the asymptotic direction is not "
                             "declared; supply limit_fn or set the vanishing flag")
        return self.limit_fn(omega)


@dataclass(frozen=True)
class LimitOperatorDescriptor:
    """Constant-coefficient (non-shell) or half-space transmission (shell)
    limit operator."""

    kind: str                                  # "non_shell" | "shell"
    phi_h: float
    omega: np.ndarray | None = None
    gamma_limit: InteractionMatrix | None = None
    nu: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("non_shell", "shell"):
            raise ValueError(f"unknown descriptor kind {self.kind!r}")
        if self.kind == "shell":
            om = np.asarray(self.omega, dtype=float)
            nu = np.asarray(self.nu, dtype=float)
            if abs(float(om @ nu)) > 1e-10:
                raise ValueError("shell descriptor needs nu orthogonal to omega")
            object.__setattr__(self, "omega", om)
            object.__setattr__(self, "nu", nu)

    def to_jsonable(self) -> dict:
        out = {"kind": self.kind, "phi_h": self.phi_h}
        if self.kind == "shell":
            out["omega"] = [round(float(x), 12) for x in self.omega]
            out["nu"] = [round(float(x), 12) for x in self.nu]
            gl = self.gamma_limit
            out["gamma_limit"] = {"kind": gl.kind,
                                  "params": _gamma_params(gl)}
        return out


def _gamma_params(g: InteractionMatrix):
    if g.kind == "diagonal_pair":
        return [g.gamma, g.eps]
    if g.kind == "electrostatic_lorentz":
        return [g.eta, g.tau]
    return [[float(x.real), float(x.imag)] for x in np.asarray(g.matrix).ravel()]


def _phi_samples(potential: PotentialModel, omega, n_phi: int) -> list[float]:
    phi = potential.phi
    if isinstance(phi, DirectionalSOPotential):
        return [phi.limit_at(omega)]
    kind, data = phi.limit_values()
    if kind == "finite":
        return [float(v) for v in data]
    lo, hi = data
    if lo == hi:
        return [lo]
    return [float(v) for v in np.linspace(lo, hi, n_phi)]


def enumerate_limits(surface, potential: PotentialModel, gamma_field,
                     n_dirs: int = 64, n_phi: int = 9) -> list[LimitOperatorDescriptor]:
    """All limit-operator descriptors of the problem, deduplicated.

    Off-asymptotic directions yield non-shell descriptors with phi_h
    ranging over the sampled partial-limit set (extremes included
    exactly); directions on the asymptotic set yield shell descriptors
    carrying the limiting coupling and normal.  Compact surfaces have no
    asymptotic set, hence non-shell descriptors only.
    """
    if isinstance(gamma_field, InteractionMatrix):
        gamma_field = CouplingField.constant(gamma_field)
    dirs = surface.infinity_directions(n_dirs)
    descriptors: list[LimitOperatorDescriptor] = []
    seen = set()
    for d in dirs:
        phis = _phi_samples(potential, d.omega, n_phi)
        if d.on_sigma_infinity:
            gl = gamma_field.limit_at(d.omega)
            for ph in phis:
                key = ("shell", round(ph, 14), gl.cache_key(),
                       tuple(np.round(d.omega, 12)))
                if key in seen:
                    continue
                seen.add(key)
                descriptors.append(LimitOperatorDescriptor(
                    kind="shell", phi_h=float(ph), omega=d.omega,
                    gamma_limit=gl, nu=d.normal_at_infinity))
        else:
            for ph in phis:
                key = ("non_shell", round(ph, 14))
                if key in seen:
                    continue
                seen.add(key)
                descriptors.append(LimitOperatorDescriptor(kind="non_shell",
                                                           phi_h=float(ph)))
    return descriptors


# ---------------------------------------------------------------------------
# essential spectrum
# ---------------------------------------------------------------------------


@dataclass
class EssentialSpectrumResult:
    """Essential spectrum in two honest views plus per-element provenance.

    ``spectrum``: rays plus the raw sampled shell eigenvalues as isolated
    points.  ``hull``: rays plus one closed interval per connected
    eigenvalue branch (the continuum-in-xi reading of the same data).
    """

    spectrum: SpectrumSet
    hull: SpectrumSet
    rays: SpectrumSet
    shell_curves: dict = field(default_factory=dict)
    provenance: list = field(default_factory=list)

    def to_jsonable(self) -> dict:
        return {
            "spectrum": self.spectrum.to_jsonable(),
            "hull": self.hull.to_jsonable(),
            "rays": self.rays.to_jsonable(),
            "shell_curves": {k: [[x, list(es)] for x, es in rows]
                             for k, rows in self.shell_curves.items()},
            "provenance": self.provenance,
        }


def _branch_hulls(rows, link_factor: float = 10.0) -> list[tuple[float, float]]:
    """Closed interval per connected branch of (xi, energies) rows.

    Energies in adjacent rows are linked when they differ by at most
    ``link_factor`` times the xi-grid spacing.
    """
    xs = [x for x, _ in rows]
    if len(xs) >= 2:
        dx = max(b - a for a, b in zip(xs, xs[1:]))
    else:
        dx = 1.0
    link = link_factor * dx
    branches: list[list[float]] = []
    active: list[tuple[float, list[float]]] = []   # (last energy, members)
    for _, energies in rows:
        next_active: list[tuple[float, list[float]]] = []
        used = [False] * len(energies)
        for last_e, members in active:
            best = None
            for i, e in enumerate(energies):
                if used[i]:
                    continue
                if abs(e - last_e) <= link and (best is None or
                                                abs(e - last_e) < abs(energies[best] - last_e)):
                    best = i
            if best is None:
                branches.append(members)
            else:
                used[best] = True
                members.append(energies[best])
                next_active.append((energies[best], members))
        for i, e in enumerate(energies):
            if not used[i]:
                next_active.append((e, [e]))
        active = next_active
    branches.extend(members for _, members in active)
    return [(min(b), max(b)) for b in branches if b]


def essential_spectrum(descriptors, m: float, xi_grid=None, tol: float = 1e-10,
                       n_scan: int = 512) -> EssentialSpectrumResult:
    """Union of all limit-operator spectra per the descriptor list.

    The free rays use the exact extremes of the sampled phi_h values; each
    distinct shell coupling contributes its dispersion curves restricted
    to the open mass gap around its phi_h.  Shell work is cached per
    (coupling, phi_h, nu) so rotationally equivalent descriptors are
    solved once.
    """
    descriptors = list(descriptors)
    if not descriptors:
        raise ValueError("descriptor list must be nonempty")
    if xi_grid is None:
        xi_grid = np.linspace(0.0, 3.0 * (abs(m) + 1.0), 33)

    phis = [d.phi_h for d in descriptors]
    m_sup, m_inf = max(phis), min(phis)
    rays = SpectrumSet(intervals=[(-math.inf, m_sup - abs(m)),
                                  (m_inf + abs(m), math.inf)])
    provenance = [{
        "element": rays.to_jsonable(),
        "source": {"kind": "non_shell_rays", "m_sup": m_sup, "m_inf": m_inf,
                   "mass": m},
    }]

    points: list[float] = []
    shell_curves: dict = {}
    cache: dict = {}
    for d in descriptors:
        if d.kind != "shell":
            continue
        gl = d.gamma_limit
        invariant = gl.kind in ("diagonal_pair", "electrostatic_lorentz")
        nu_key = None if invariant else tuple(np.round(d.nu, 10))
        key = (gl.cache_key(), round(d.phi_h, 14), nu_key)
        if key not in cache:
            frame = Frame.from_normal(d.nu) if not invariant else None
            kwargs = {"frame": frame} if frame is not None else {}
            rows = dispersion_curve(gl, m, d.phi_h, xi_grid, tol=tol,
                                    n_scan=n_scan, **kwargs)
            gap = (d.phi_h - abs(m), d.phi_h + abs(m))
            rows_in_gap = [(x, tuple(e for e in es if gap[0] < e < gap[1]))
                           for x, es in rows]
            cache[key] = rows_in_gap
            label = f"shell:{gl.kind}:{_gamma_params(gl)}:phi={d.phi_h:g}"
            shell_curves[label] = rows_in_gap
            new_points = sorted({e for _, es in rows_in_gap for e in es})
            points.extend(new_points)
            if new_points or rows_in_gap:
                provenance.append({
                    "element": {"points": new_points},
                    "source": d.to_jsonable(),
                })

    spectrum = SpectrumSet(rays.intervals, points)
    hull_intervals = list(rays.intervals)
    for rows in shell_curves.values():
        hull_intervals.extend(_branch_hulls(rows))
    hull = SpectrumSet(hull_intervals)
    return EssentialSpectrumResult(spectrum=spectrum, hull=hull, rays=rays,
                                   shell_curves=shell_curves,
                                   provenance=provenance)
