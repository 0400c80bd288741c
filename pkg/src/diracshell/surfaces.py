"""Interaction-surface models: compact closed surfaces and unbounded
surfaces that are exactly conic outside a bounded region.

Each surface yields deterministic quasi-uniform samples carrying a point,
an orthonormal right-handed frame whose third leg is the normal, and a
chart coordinate.  Unbounded surfaces additionally expose their set of
infinity directions, split into directions lying on the asymptotic
cone/plane (which carry a limiting normal) and the rest.

Orientation convention: nu points out of the region Omega_plus enclosed by
(or below/inside) the surface -- outward for the sphere, along ``normal``
for the plane, away from the axis for the cone.  Flipping nu swaps the two
transmission matrices and leaves |det L| unchanged for the rotation-
invariant coupling families; that is asserted by a property test, not
assumed.

Uniform regularity of the built-in families is a modeling assumption, not
something verified from finite samples; ParametricGrid inputs carry a
user-asserted flag instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .clifford import require_finite
from .shell_symbol import Frame

__all__ = [
    "SurfaceSample",
    "InfinityDirection",
    "Sphere",
    "Plane",
    "Cone",
    "ParametricGrid",
    "sample",
    "infinity_directions",
    "DEFAULT_R_MAX",
    "DEFAULT_N_RADII",
]

DEFAULT_R_MAX = 1e3
DEFAULT_N_RADII = 12


@dataclass(frozen=True)
class SurfaceSample:
    point: np.ndarray
    frame: Frame
    coord: tuple


@dataclass(frozen=True)
class InfinityDirection:
    omega: np.ndarray
    on_sigma_infinity: bool
    normal_at_infinity: np.ndarray | None = None

    def __post_init__(self):
        om = np.asarray(self.omega, dtype=float)
        if abs(np.linalg.norm(om) - 1.0) > 1e-10:
            raise ValueError("omega must be a unit vector")
        object.__setattr__(self, "omega", om)
        if self.on_sigma_infinity:
            nu = np.asarray(self.normal_at_infinity, dtype=float)
            if nu is None or abs(np.linalg.norm(nu) - 1.0) > 1e-10:
                raise ValueError("on-Sigma directions need a unit limiting normal")
            if abs(float(om @ nu)) > 1e-10:
                raise ValueError("limiting normal must be orthogonal to omega")
            object.__setattr__(self, "normal_at_infinity", nu)


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("zero vector")
    return v / n


def _fibonacci_sphere(n: int) -> np.ndarray:
    """n deterministic quasi-uniform unit vectors, shape (n, 3)."""
    k = np.arange(n)
    z = 1.0 - (2.0 * k + 1.0) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    golden = math.pi * (3.0 - math.sqrt(5.0))
    phi = golden * k
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _perp_pair(nu: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ref = np.array([0.0, 0.0, 1.0]) if abs(nu[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    t1 = _unit(np.cross(ref, nu))
    return t1, np.cross(nu, t1)


def _geometric_radii(r_min: float, r_max: float, n: int) -> np.ndarray:
    if r_min <= 0:
        r_min = r_max * 1e-3
    return np.geomspace(r_min, r_max, n)


def _apply_jitter(angles: np.ndarray, jitter: float, seed) -> np.ndarray:
    if jitter == 0.0:
        return angles
    rng = np.random.default_rng(seed)
    step = 2.0 * np.pi / max(1, len(angles))
    return angles + jitter * step * rng.uniform(-0.5, 0.5, size=len(angles))


@dataclass(frozen=True)
class Sphere:
    """Compact closed surface |x| = radius with outward normal."""

    radius: float = 1.0

    def __post_init__(self):
        require_finite([self.radius], "radius")
        if self.radius <= 0:
            raise ValueError("sphere radius must be positive")

    @property
    def is_conic_at_infinity(self) -> bool:
        return False

    def sample(self, n: int, jitter: float = 0.0, seed=None) -> list[SurfaceSample]:
        if n < 1:
            raise ValueError("need at least one sample")
        dirs = _fibonacci_sphere(n)
        if jitter != 0.0:
            rng = np.random.default_rng(seed)
            dirs = dirs + jitter * 0.5 / math.sqrt(n) * rng.normal(size=dirs.shape)
            dirs = dirs / np.linalg.norm(dirs, axis=1)[:, None]
        out = []
        for k, nu in enumerate(dirs):
            t1, t2 = _perp_pair(nu)
            out.append(SurfaceSample(point=self.radius * nu,
                                     frame=Frame(t1=t1, t2=t2, nu=nu),
                                     coord=(k,)))
        return out

    def infinity_directions(self, n: int) -> list[InfinityDirection]:
        if n < 1:
            raise ValueError("need at least one direction")
        return [InfinityDirection(omega=w, on_sigma_infinity=False)
                for w in _fibonacci_sphere(n)]


@dataclass(frozen=True)
class Plane:
    """Affine plane {x . normal = offset}; nu = normal everywhere."""

    normal: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    offset: float = 0.0
    r_max: float = DEFAULT_R_MAX
    n_radii: int = DEFAULT_N_RADII

    def __post_init__(self):
        nu = _unit(self.normal)
        object.__setattr__(self, "normal", nu)
        require_finite([self.offset, self.r_max], "plane parameters")
        if self.r_max <= 0 or self.n_radii < 2:
            raise ValueError("invalid radial sampling parameters")

    @property
    def is_conic_at_infinity(self) -> bool:
        return True

    def _axes(self):
        return _perp_pair(self.normal)

    def point_at(self, r: float, theta: float) -> np.ndarray:
        u, v = self._axes()
        return (self.offset * self.normal
                + r * (math.cos(theta) * u + math.sin(theta) * v))

    def sample(self, n: int, jitter: float = 0.0, seed=None) -> list[SurfaceSample]:
        if n < 1:
            raise ValueError("need at least one sample")
        u, v = self._axes()
        frame = Frame(t1=u, t2=v, nu=self.normal)
        radii = _geometric_radii(self.r_max * 1e-3, self.r_max, self.n_radii)
        per_ring = max(1, math.ceil(n / len(radii)))
        out = [SurfaceSample(point=self.offset * self.normal, frame=frame,
                             coord=(0.0, 0.0))]
        for r in radii:
            th = 2.0 * np.pi * np.arange(per_ring) / per_ring
            th = _apply_jitter(th, jitter, seed)
            for t in th:
                out.append(SurfaceSample(point=self.point_at(r, t), frame=frame,
                                         coord=(float(r), float(t))))
        return out

    def infinity_directions(self, n: int) -> list[InfinityDirection]:
        if n < 1:
            raise ValueError("need at least one direction")
        u, v = self._axes()
        out = []
        for w in _fibonacci_sphere(n):
            on = abs(float(w @ self.normal)) <= 1e-12
            out.append(InfinityDirection(
                omega=w, on_sigma_infinity=on,
                normal_at_infinity=self.normal if on else None))
        th = 2.0 * np.pi * np.arange(n) / n
        for t in th:
            w = math.cos(t) * u + math.sin(t) * v
            out.append(InfinityDirection(omega=w, on_sigma_infinity=True,
                                         normal_at_infinity=self.normal))
        return out


@dataclass(frozen=True)
class Cone:
    """Circular cone of given half-angle about ``axis``; exactly conic for
    r > apex_radius, with samples restricted to the conic part.

    Omega_plus is the solid region containing the axis, so nu points away
    from the axis:  nu(theta) = cos(a) u(theta) - sin(a) axis.
    """

    axis: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    half_angle: float = math.pi / 4
    apex_radius: float = 0.0
    r_max: float = DEFAULT_R_MAX
    n_radii: int = DEFAULT_N_RADII

    def __post_init__(self):
        a = _unit(self.axis)
        object.__setattr__(self, "axis", a)
        require_finite([self.half_angle, self.apex_radius, self.r_max], "cone parameters")
        if not (0.0 < self.half_angle < math.pi / 2):
            raise ValueError("half_angle must lie in (0, pi/2)")
        if self.apex_radius < 0:
            raise ValueError("apex_radius must be nonnegative")

    @property
    def is_conic_at_infinity(self) -> bool:
        return True

    def _axes(self):
        return _perp_pair(self.axis)

    def ray_direction(self, theta: float) -> np.ndarray:
        u, v = self._axes()
        sa, ca = math.sin(self.half_angle), math.cos(self.half_angle)
        return ca * self.axis + sa * (math.cos(theta) * u + math.sin(theta) * v)

    def normal_at(self, theta: float) -> np.ndarray:
        u, v = self._axes()
        sa, ca = math.sin(self.half_angle), math.cos(self.half_angle)
        radial = math.cos(theta) * u + math.sin(theta) * v
        return ca * radial - sa * self.axis

    def frame_at(self, theta: float) -> Frame:
        t1 = self.ray_direction(theta)
        nu = self.normal_at(theta)
        t2 = np.cross(nu, t1)
        return Frame(t1=t1, t2=t2, nu=nu)

    def sample(self, n: int, jitter: float = 0.0, seed=None) -> list[SurfaceSample]:
        if n < 1:
            raise ValueError("need at least one sample")
        r_min = self.apex_radius if self.apex_radius > 0 else self.r_max * 1e-3
        radii = _geometric_radii(r_min, self.r_max, self.n_radii)
        per_ring = max(1, math.ceil(n / len(radii)))
        out = []
        for r in radii:
            th = 2.0 * np.pi * np.arange(per_ring) / per_ring
            th = _apply_jitter(th, jitter, seed)
            for t in th:
                out.append(SurfaceSample(point=r * self.ray_direction(t),
                                         frame=self.frame_at(t),
                                         coord=(float(r), float(t))))
                if len(out) >= n:
                    break
            if len(out) >= n:
                break
        return out

    def infinity_directions(self, n: int) -> list[InfinityDirection]:
        if n < 1:
            raise ValueError("need at least one direction")
        ca = math.cos(self.half_angle)
        out = []
        for w in _fibonacci_sphere(n):
            on = abs(float(w @ self.axis) - ca) <= 1e-12
            out.append(InfinityDirection(
                omega=w, on_sigma_infinity=on,
                normal_at_infinity=self._normal_for(w) if on else None))
        th = 2.0 * np.pi * np.arange(n) / n
        for t in th:
            out.append(InfinityDirection(omega=self.ray_direction(t),
                                         on_sigma_infinity=True,
                                         normal_at_infinity=self.normal_at(t)))
        return out

    def _normal_for(self, omega: np.ndarray) -> np.ndarray:
        u, v = self._axes()
        theta = math.atan2(float(omega @ v), float(omega @ u))
        return self.normal_at(theta)


@dataclass(frozen=True)
class ParametricGrid:
    """Explicit user-supplied samples; regularity is asserted, not checked."""

    samples: tuple
    conic_at_infinity: bool = False
    sigma_infinity: tuple = ()
    uniformly_regular: bool = True

    def __post_init__(self):
        if not self.samples:
            raise ValueError("ParametricGrid needs at least one sample")
        object.__setattr__(self, "samples", tuple(self.samples))
        object.__setattr__(self, "sigma_infinity", tuple(self.sigma_infinity))

    @property
    def is_conic_at_infinity(self) -> bool:
        return self.conic_at_infinity

    def sample(self, n: int, jitter: float = 0.0, seed=None) -> list[SurfaceSample]:
        if n < 1:
            raise ValueError("need at least one sample")
        return list(self.samples[:n]) if n < len(self.samples) else list(self.samples)

    def infinity_directions(self, n: int) -> list[InfinityDirection]:
        out = [InfinityDirection(omega=w, on_sigma_infinity=False)
               for w in _fibonacci_sphere(n)]
        out.extend(self.sigma_infinity)
        return out


def sample(surface, n: int, jitter: float = 0.0, seed=None) -> list[SurfaceSample]:
    """Deterministic quasi-uniform samples with frames (jitter optional)."""
    return surface.sample(n, jitter=jitter, seed=seed)


def infinity_directions(surface, n: int) -> list[InfinityDirection]:
    """Directions on the sphere at infinity, flagged by membership in the
    asymptotic set of the surface."""
    return surface.infinity_directions(n)


def normals_along_ray(surface, omega: np.ndarray, radii) -> list[np.ndarray]:
    """Sampled normals nu(t * omega) for conic surfaces; used to check that
    normals are Cauchy along geometric radii toward the limiting normal."""
    if isinstance(surface, Plane):
        return [surface.normal for _ in radii]
    if isinstance(surface, Cone):
        u, v = surface._axes()
        theta = math.atan2(float(omega @ v), float(omega @ u))
        return [surface.normal_at(theta) for _ in radii]
    raise ValueError("normals_along_ray applies to conic surfaces only")
