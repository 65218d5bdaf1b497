"""Plane-angle helpers and interval arithmetic on the circle.

Azimuths are degrees in [0, 360) measured counterclockwise from +x.
Headings are radians in [0, 2*pi) with the same convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

TWO_PI = 2.0 * math.pi


def wrap_rad(angle: float) -> float:
    """Wrap an angle in radians into [0, 2*pi)."""
    a = math.fmod(angle, TWO_PI)
    return a + TWO_PI if a < 0.0 else a


def wrap_deg(angle: float) -> float:
    """Wrap an angle in degrees into [0, 360)."""
    a = math.fmod(angle, 360.0)
    return a + 360.0 if a < 0.0 else a


def signed_delta_deg(a: float, b: float) -> float:
    """Shortest signed angular difference a - b, in (-180, 180]."""
    d = math.fmod(a - b, 360.0)
    if d <= -180.0:
        d += 360.0
    elif d > 180.0:
        d -= 360.0
    return d


def signed_delta_rad(a: float, b: float) -> float:
    """Shortest signed angular difference a - b, in (-pi, pi]."""
    d = math.fmod(a - b, TWO_PI)
    if d <= -math.pi:
        d += TWO_PI
    elif d > math.pi:
        d -= TWO_PI
    return d


def heading_vec(heading: float) -> tuple[float, float]:
    return (math.cos(heading), math.sin(heading))


def azimuth_deg(origin: Sequence[float], point: Sequence[float]) -> float:
    """Azimuth of `point` as seen from `origin`, degrees in [0, 360)."""
    return wrap_deg(math.degrees(math.atan2(point[1] - origin[1], point[0] - origin[0])))


@dataclass(frozen=True)
class ArcSet:
    """Union of azimuth intervals on the circle, degrees.

    Stored as disjoint, sorted, half-open [start, end) pieces with
    0 <= start < end <= 360.  Wrap-around input intervals are split at 0/360
    on construction, so a full circle is exactly [(0.0, 360.0)].
    """

    pieces: tuple[tuple[float, float], ...]

    @staticmethod
    def empty() -> "ArcSet":
        return ArcSet(())

    @staticmethod
    def full() -> "ArcSet":
        return ArcSet(((0.0, 360.0),))

    @staticmethod
    def from_interval(start_deg: float, end_deg: float) -> "ArcSet":
        """Interval from start to end going counterclockwise; wraps if end < start.

        A zero-width interval is empty; a 360-degree span is the full circle.
        """
        if end_deg - start_deg >= 360.0:
            return ArcSet.full()
        s = wrap_deg(start_deg)
        e = wrap_deg(end_deg)
        if s == e:
            if end_deg != start_deg:
                return ArcSet.full()
            return ArcSet.empty()
        if s < e:
            return ArcSet(((s, e),))
        return ArcSet(_merge([(0.0, e), (s, 360.0)]))

    @staticmethod
    def from_intervals(intervals: Iterable[tuple[float, float]]) -> "ArcSet":
        out = ArcSet.empty()
        for s, e in intervals:
            out = out.union(ArcSet.from_interval(s, e))
        return out

    def union(self, other: "ArcSet") -> "ArcSet":
        if not self.pieces:
            return other
        if not other.pieces:
            return self
        return ArcSet(_merge(list(self.pieces) + list(other.pieces)))

    def measure(self) -> float:
        """Total angular length in degrees."""
        return sum(e - s for s, e in self.pieces)

    def contains(self, az_deg: float) -> bool:
        a = wrap_deg(az_deg)
        return any(s <= a < e for s, e in self.pieces)

    def intersects(self, other: "ArcSet", min_overlap: float = 1e-9) -> bool:
        for s1, e1 in self.pieces:
            for s2, e2 in other.pieces:
                if min(e1, e2) - max(s1, s2) > min_overlap:
                    return True
        return False

    def intersection(self, other: "ArcSet") -> "ArcSet":
        out: list[tuple[float, float]] = []
        for s1, e1 in self.pieces:
            for s2, e2 in other.pieces:
                s, e = max(s1, s2), min(e1, e2)
                if e > s:
                    out.append((s, e))
        return ArcSet(_merge(out)) if out else ArcSet.empty()

    def coverage_fraction(self) -> float:
        m = self.measure()
        return 1.0 if m >= 360.0 else m / 360.0


def _merge(pieces: list[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    pieces = sorted(p for p in pieces if p[1] > p[0])
    if not pieces:
        return ()
    merged = [pieces[0]]
    for s, e in pieces[1:]:
        ls, le = merged[-1]
        if s <= le:
            merged[-1] = (ls, max(le, e))
        else:
            merged.append((s, e))
    return tuple(merged)
