"""Hot geometry kernels: ray casts and clearance queries against walls and discs.

Two interchangeable backends produce bit-identical results:

* loop kernels compiled with numba ``@njit`` (default when numba is present)
* vectorized pure-numpy twins

Set ``COLSCAN_DISABLE_NJIT=1`` to force the numpy path. ``BACKEND`` reports
which one the package bound at import. Both implementations stay importable
(``ray_hit_numpy`` / ``ray_hit_numba`` etc.) so tests and the benchmark in
``benchmarks/bench_kernels.py`` can compare them directly.

Geometry encoding: walls are segments in a float64 ``(n, 4)`` array of
``x1, y1, x2, y2`` rows; discs (obstacles, columns) are rows of ``cx, cy, r``
in a float64 ``(m, 3)`` array. Hit kinds: 0 = miss, 1 = segment, 2 = disc.
"""

from __future__ import annotations

import math
import os

import numpy as np

KIND_MISS = 0
KIND_SEGMENT = 1
KIND_DISC = 2

_DISABLE = os.environ.get("COLSCAN_DISABLE_NJIT", "") not in ("", "0", "false")

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only on stripped installs
    _HAVE_NUMBA = False

NJIT_ENABLED = _HAVE_NUMBA and not _DISABLE
BACKEND = "numba" if NJIT_ENABLED else "numpy"


# ---------------------------------------------------------------------------
# loop kernels (numba-compilable; also the reference scalar semantics)
# ---------------------------------------------------------------------------

def _ray_hit_loop(ox, oy, dx, dy, max_range, segs, discs):
    best = math.inf
    kind = KIND_MISS
    idx = -1
    for i in range(segs.shape[0]):
        sx = segs[i, 2] - segs[i, 0]
        sy = segs[i, 3] - segs[i, 1]
        denom = dx * sy - dy * sx
        if denom != 0.0:
            qx = segs[i, 0] - ox
            qy = segs[i, 1] - oy
            t = (qx * sy - qy * sx) / denom
            u = (qx * dy - qy * dx) / denom
            if t >= 0.0 and 0.0 <= u <= 1.0 and t <= max_range and t < best:
                best = t
                kind = KIND_SEGMENT
                idx = i
    for j in range(discs.shape[0]):
        cx = discs[j, 0] - ox
        cy = discs[j, 1] - oy
        b = cx * dx + cy * dy
        c = cx * cx + cy * cy - discs[j, 2] * discs[j, 2]
        disc = b * b - c
        if disc >= 0.0:
            sq = math.sqrt(disc)
            t = b - sq
            if t < 0.0:
                t = b + sq
            if t >= 0.0 and t <= max_range and t < best:
                best = t
                kind = KIND_DISC
                idx = j
    return best, kind, idx


def _ray_hits_loop(origins, dirs, max_range, segs, discs):
    n = origins.shape[0]
    dists = np.empty(n, dtype=np.float64)
    kinds = np.empty(n, dtype=np.int64)
    idxs = np.empty(n, dtype=np.int64)
    for k in range(n):
        d, kd, ix = _ray_hit_loop(
            origins[k, 0], origins[k, 1], dirs[k, 0], dirs[k, 1], max_range, segs, discs
        )
        dists[k] = d
        kinds[k] = kd
        idxs[k] = ix
    return dists, kinds, idxs


def _point_seg_dist(px, py, x1, y1, x2, y2):
    vx = x2 - x1
    vy = y2 - y1
    wx = px - x1
    wy = py - y1
    ln2 = vx * vx + vy * vy
    if ln2 == 0.0:
        return math.hypot(wx, wy)
    t = (wx * vx + wy * vy) / ln2
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return math.hypot(wx - t * vx, wy - t * vy)


def _segs_intersect(ax, ay, bx, by, x1, y1, x2, y2):
    rx = bx - ax
    ry = by - ay
    sx = x2 - x1
    sy = y2 - y1
    denom = rx * sy - ry * sx
    if denom == 0.0:
        return False
    qx = x1 - ax
    qy = y1 - ay
    t = (qx * sy - qy * sx) / denom
    u = (qx * ry - qy * rx) / denom
    return 0.0 <= t <= 1.0 and 0.0 <= u <= 1.0


def _seg_seg_dist(ax, ay, bx, by, x1, y1, x2, y2):
    if _segs_intersect(ax, ay, bx, by, x1, y1, x2, y2):
        return 0.0
    d = _point_seg_dist(ax, ay, x1, y1, x2, y2)
    d2 = _point_seg_dist(bx, by, x1, y1, x2, y2)
    if d2 < d:
        d = d2
    d2 = _point_seg_dist(x1, y1, ax, ay, bx, by)
    if d2 < d:
        d = d2
    d2 = _point_seg_dist(x2, y2, ax, ay, bx, by)
    if d2 < d:
        d = d2
    return d


def _segment_clearance_loop(ax, ay, bx, by, segs, discs):
    best = math.inf
    for i in range(segs.shape[0]):
        d = _seg_seg_dist(ax, ay, bx, by, segs[i, 0], segs[i, 1], segs[i, 2], segs[i, 3])
        if d < best:
            best = d
    for j in range(discs.shape[0]):
        d = _point_seg_dist(discs[j, 0], discs[j, 1], ax, ay, bx, by) - discs[j, 2]
        if d < best:
            best = d
    return best


def _point_clearance_loop(px, py, segs, discs):
    best = math.inf
    for i in range(segs.shape[0]):
        d = _point_seg_dist(px, py, segs[i, 0], segs[i, 1], segs[i, 2], segs[i, 3])
        if d < best:
            best = d
    for j in range(discs.shape[0]):
        d = math.hypot(px - discs[j, 0], py - discs[j, 1]) - discs[j, 2]
        if d < best:
            best = d
    return best


# ---------------------------------------------------------------------------
# vectorized numpy twins
# ---------------------------------------------------------------------------

def ray_hits_numpy(origins, dirs, max_range, segs, discs):
    """Batched nearest-hit cast, vectorized over rays x entities."""
    origins = np.asarray(origins, dtype=np.float64)
    dirs = np.asarray(dirs, dtype=np.float64)
    n = origins.shape[0]
    dists = np.full(n, np.inf)
    kinds = np.zeros(n, dtype=np.int64)
    idxs = np.full(n, -1, dtype=np.int64)

    if segs.shape[0]:
        sx = (segs[:, 2] - segs[:, 0])[None, :]
        sy = (segs[:, 3] - segs[:, 1])[None, :]
        dx = dirs[:, 0:1]
        dy = dirs[:, 1:2]
        qx = segs[None, :, 0] - origins[:, 0:1]
        qy = segs[None, :, 1] - origins[:, 1:2]
        denom = dx * sy - dy * sx
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (qx * sy - qy * sx) / denom
            u = (qx * dy - qy * dx) / denom
        ok = (denom != 0.0) & (t >= 0.0) & (u >= 0.0) & (u <= 1.0) & (t <= max_range)
        t = np.where(ok, t, np.inf)
        j = np.argmin(t, axis=1)
        tmin = t[np.arange(n), j]
        better = tmin < dists
        dists = np.where(better, tmin, dists)
        kinds = np.where(better, KIND_SEGMENT, kinds)
        idxs = np.where(better, j, idxs)

    if discs.shape[0]:
        cx = discs[None, :, 0] - origins[:, 0:1]
        cy = discs[None, :, 1] - origins[:, 1:2]
        b = cx * dirs[:, 0:1] + cy * dirs[:, 1:2]
        c = cx * cx + cy * cy - (discs[:, 2] ** 2)[None, :]
        disc = b * b - c
        with np.errstate(invalid="ignore"):
            sq = np.sqrt(np.where(disc >= 0.0, disc, np.nan))
        t = b - sq
        t = np.where(t < 0.0, b + sq, t)
        ok = (disc >= 0.0) & (t >= 0.0) & (t <= max_range)
        t = np.where(ok, t, np.inf)
        j = np.argmin(t, axis=1)
        tmin = t[np.arange(n), j]
        better = tmin < dists
        dists = np.where(better, tmin, dists)
        kinds = np.where(better, KIND_DISC, kinds)
        idxs = np.where(better, j, idxs)

    return dists, kinds, idxs


def ray_hit_numpy(ox, oy, dx, dy, max_range, segs, discs):
    d, k, i = ray_hits_numpy(
        np.array([[ox, oy]]), np.array([[dx, dy]]), max_range, segs, discs
    )
    return float(d[0]), int(k[0]), int(i[0])


def _point_seg_dist_numpy(px, py, segs):
    vx = segs[:, 2] - segs[:, 0]
    vy = segs[:, 3] - segs[:, 1]
    ln2 = vx * vx + vy * vy
    wx = px - segs[:, 0]
    wy = py - segs[:, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.clip((wx * vx + wy * vy) / ln2, 0.0, 1.0)
    t = np.where(ln2 == 0.0, 0.0, t)
    return np.hypot(wx - t * vx, wy - t * vy)


def segment_clearance_numpy(ax, ay, bx, by, segs, discs):
    best = np.inf
    if segs.shape[0]:
        d = np.minimum(
            np.minimum(_point_seg_dist_numpy(ax, ay, segs), _point_seg_dist_numpy(bx, by, segs)),
            np.minimum(
                _endpoints_to_motion(segs[:, 0], segs[:, 1], ax, ay, bx, by),
                _endpoints_to_motion(segs[:, 2], segs[:, 3], ax, ay, bx, by),
            ),
        )
        rx = bx - ax
        ry = by - ay
        sx = segs[:, 2] - segs[:, 0]
        sy = segs[:, 3] - segs[:, 1]
        denom = rx * sy - ry * sx
        qx = segs[:, 0] - ax
        qy = segs[:, 1] - ay
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (qx * sy - qy * sx) / denom
            u = (qx * ry - qy * rx) / denom
        crossing = (denom != 0.0) & (t >= 0.0) & (t <= 1.0) & (u >= 0.0) & (u <= 1.0)
        d = np.where(crossing, 0.0, d)
        best = min(best, float(d.min()))
    if discs.shape[0]:
        dd = _endpoints_to_motion(discs[:, 0], discs[:, 1], ax, ay, bx, by) - discs[:, 2]
        best = min(best, float(dd.min()))
    return best


def _endpoints_to_motion(px, py, ax, ay, bx, by):
    vx = bx - ax
    vy = by - ay
    ln2 = vx * vx + vy * vy
    wx = px - ax
    wy = py - ay
    if ln2 == 0.0:
        return np.hypot(wx, wy)
    t = np.clip((wx * vx + wy * vy) / ln2, 0.0, 1.0)
    return np.hypot(wx - t * vx, wy - t * vy)


def point_clearance_numpy(px, py, segs, discs):
    best = np.inf
    if segs.shape[0]:
        best = min(best, float(_point_seg_dist_numpy(px, py, segs).min()))
    if discs.shape[0]:
        best = min(best, float((np.hypot(px - discs[:, 0], py - discs[:, 1]) - discs[:, 2]).min()))
    return best


# ---------------------------------------------------------------------------
# backend binding
# ---------------------------------------------------------------------------

if _HAVE_NUMBA:
    _jit = njit(cache=True)
    _point_seg_dist = _jit(_point_seg_dist)
    _segs_intersect = _jit(_segs_intersect)
    _seg_seg_dist = _jit(_seg_seg_dist)
    ray_hit_numba = _jit(_ray_hit_loop)
    _ray_hit_loop = ray_hit_numba
    ray_hits_numba = _jit(_ray_hits_loop)
    segment_clearance_numba = _jit(_segment_clearance_loop)
    point_clearance_numba = _jit(_point_clearance_loop)
else:
    ray_hit_numba = None
    ray_hits_numba = None
    segment_clearance_numba = None
    point_clearance_numba = None

if NJIT_ENABLED:
    ray_hit = ray_hit_numba
    ray_hits = ray_hits_numba
    segment_clearance = segment_clearance_numba
    point_clearance = point_clearance_numba
else:
    ray_hit = ray_hit_numpy
    ray_hits = ray_hits_numpy
    segment_clearance = segment_clearance_numpy
    point_clearance = point_clearance_numpy


def warmup() -> None:
    """Trigger JIT compilation so timed runs exclude one-time compile cost."""
    segs = np.array([[0.0, 0.0, 1.0, 0.0]])
    discs = np.array([[0.5, 0.5, 0.1]])
    ray_hit(0.0, 0.2, 1.0, 0.0, 5.0, segs, discs)
    ray_hits(np.zeros((2, 2)), np.array([[1.0, 0.0], [0.0, 1.0]]), 5.0, segs, discs)
    segment_clearance(0.0, 0.2, 0.5, 0.2, segs, discs)
    point_clearance(0.0, 0.2, segs, discs)
