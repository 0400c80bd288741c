"""Spectrum sets: sorted disjoint unions of closed intervals (endpoints may
be infinite) plus isolated points.

Normalization is exact -- touching or overlapping intervals merge, points
inside an interval are absorbed, duplicates collapse -- with no epsilon
slop, so set equality is well defined for results built from exact
endpoint arithmetic.
"""

from __future__ import annotations

import math
from typing import Iterable

__all__ = ["SpectrumSet", "spectrum_union", "free_spectrum"]

_INF = math.inf


def _normalize(intervals: Iterable, points: Iterable):
    ivs = []
    for lo, hi in intervals:
        lo = float(lo)
        hi = float(hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        if lo == _INF or hi == -_INF:
            raise ValueError("interval endpoints out of order at infinity")
        if lo > hi:
            raise ValueError(f"interval endpoints out of order: [{lo}, {hi}]")
        ivs.append((lo, hi))
    ivs.sort()
    merged: list[tuple[float, float]] = []
    for lo, hi in ivs:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    pts = []
    for p in points:
        p = float(p)
        if not math.isfinite(p):
            raise ValueError("isolated points must be finite")
        if any(lo <= p <= hi for lo, hi in merged):
            continue
        pts.append(p)
    pts = sorted(set(pts))
    return tuple(merged), tuple(pts)


class SpectrumSet:
    """Closed subset of the reals: disjoint closed intervals plus points."""

    __slots__ = ("intervals", "points")

    def __init__(self, intervals: Iterable = (), points: Iterable = ()):
        ivs, pts = _normalize(intervals, points)
        object.__setattr__(self, "intervals", ivs)
        object.__setattr__(self, "points", pts)

    def __setattr__(self, *a):
        raise AttributeError("SpectrumSet is immutable")

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpectrumSet):
            return NotImplemented
        return self.intervals == other.intervals and self.points == other.points

    def __hash__(self) -> int:
        return hash((self.intervals, self.points))

    def __contains__(self, x) -> bool:
        x = float(x)
        return (any(lo <= x <= hi for lo, hi in self.intervals)
                or x in set(self.points))

    def __bool__(self) -> bool:
        return bool(self.intervals or self.points)

    def union(self, other: "SpectrumSet") -> "SpectrumSet":
        return SpectrumSet(self.intervals + other.intervals,
                           self.points + other.points)

    __or__ = union

    def intervals_within(self, lo: float, hi: float) -> tuple:
        """Intervals of positive length intersecting the open window (lo, hi)."""
        out = []
        for a, b in self.intervals:
            if b > lo and a < hi and a < b:
                out.append((max(a, lo), min(b, hi)))
        return tuple(out)

    def __repr__(self) -> str:
        def fmt(x):
            if x == -_INF:
                return "-inf"
            if x == _INF:
                return "inf"
            return f"{x:g}"

        parts = [f"[{fmt(lo)}, {fmt(hi)}]" for lo, hi in self.intervals]
        parts += ["{" + fmt(p) + "}" for p in self.points]
        return "SpectrumSet(" + (" U ".join(parts) if parts else "empty") + ")"

    def to_jsonable(self) -> dict:
        def enc(x):
            if x == -_INF:
                return "-inf"
            if x == _INF:
                return "inf"
            return x

        return {
            "intervals": [[enc(lo), enc(hi)] for lo, hi in self.intervals],
            "points": list(self.points),
        }

    @classmethod
    def from_jsonable(cls, obj: dict) -> "SpectrumSet":
        def dec(x):
            if x == "-inf":
                return -_INF
            if x == "inf":
                return _INF
            return float(x)

        return cls(intervals=[(dec(a), dec(b)) for a, b in obj.get("intervals", [])],
                   points=obj.get("points", []))


def spectrum_union(a: SpectrumSet, b: SpectrumSet) -> SpectrumSet:
    """Normalized union; associative, commutative, idempotent."""
    return a.union(b)


def free_spectrum(m: float, phi_h: float = 0.0) -> SpectrumSet:
    """Spectrum of the constant-coefficient Dirac operator with mass m shifted
    by the constant potential phi_h:  (-inf, phi_h - |m|] U [phi_h + |m|, inf).

    Massless case collapses to the whole line.
    """
    return SpectrumSet(intervals=[(-_INF, phi_h - abs(m)), (phi_h + abs(m), _INF)])
