"""Static 2D plan-view environment: walls, disc obstacles, and columns.

The world is immutable after load. All sensor models and oracles query it
through ``ray_cast`` and ``visible_surface_arc``; the flattened geometry
arrays feed the kernels directly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import kernels
from .geom import ArcSet, azimuth_deg


class ScenarioError(ValueError):
    """Scenario file failed to parse or violated a world invariant."""


class DamageKind(str, Enum):
    SPALLING = "spalling"
    REBAR_EXPOSURE = "rebar_exposure"


@dataclass(frozen=True)
class DamagePatch:
    id: str
    kind: DamageKind
    az_start_deg: float
    az_end_deg: float  # interval wraps when end < start
    z_low: float
    z_high: float

    def arc(self) -> ArcSet:
        return ArcSet.from_interval(self.az_start_deg, self.az_end_deg)


@dataclass(frozen=True)
class Column:
    id: str
    cx: float
    cy: float
    radius: float
    height: float
    attached: bool = False
    patches: tuple[DamagePatch, ...] = ()

    @property
    def center(self) -> tuple[float, float]:
        return (self.cx, self.cy)


@dataclass(frozen=True)
class RayHit:
    distance: float
    entity: str


@dataclass
class World:
    """Immutable after construction; safe for concurrent readers."""

    name: str
    bounds: tuple[float, float]
    walls: tuple[tuple[float, float, float, float], ...]
    obstacles: tuple[tuple[float, float, float], ...]
    columns: tuple[Column, ...]

    segs: np.ndarray = field(init=False, repr=False)
    discs: np.ndarray = field(init=False, repr=False)
    _entity_names: list[str] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.segs = (
            np.array(self.walls, dtype=np.float64)
            if self.walls
            else np.zeros((0, 4), dtype=np.float64)
        )
        discs = [(o[0], o[1], o[2]) for o in self.obstacles]
        discs += [(c.cx, c.cy, c.radius) for c in self.columns]
        self.discs = (
            np.array(discs, dtype=np.float64) if discs else np.zeros((0, 3), dtype=np.float64)
        )
        self._entity_names = [f"wall:{i}" for i in range(len(self.walls))]
        self._entity_names += [f"obstacle:{i}" for i in range(len(self.obstacles))]
        self._entity_names += [c.id for c in self.columns]

    def entity_name(self, kind: int, idx: int) -> str:
        if kind == kernels.KIND_SEGMENT:
            return self._entity_names[idx]
        return self._entity_names[len(self.walls) + idx]

    def column(self, column_id: str) -> Column:
        for c in self.columns:
            if c.id == column_id:
                return c
        raise KeyError(column_id)

    def column_disc_index(self, column_id: str) -> int:
        for i, c in enumerate(self.columns):
            if c.id == column_id:
                return len(self.obstacles) + i
        raise KeyError(column_id)

    def discs_excluding(self, column_id: str) -> np.ndarray:
        """Disc array without one column, for self-occlusion-free sight lines."""
        skip = self.column_disc_index(column_id)
        keep = [i for i in range(self.discs.shape[0]) if i != skip]
        return self.discs[keep] if keep else np.zeros((0, 3), dtype=np.float64)

    def contains(self, x: float, y: float) -> bool:
        return 0.0 <= x <= self.bounds[0] and 0.0 <= y <= self.bounds[1]


def ray_cast(
    world: World,
    origin: tuple[float, float],
    direction: tuple[float, float],
    max_range: float,
) -> Optional[RayHit]:
    """Nearest intersection along a ray, or None past max_range.

    `direction` is normalized defensively; a zero vector is rejected.
    """
    if max_range <= 0.0:
        raise ValueError("max_range must be positive")
    norm = math.hypot(direction[0], direction[1])
    if norm == 0.0:
        raise ValueError("direction must be a non-zero vector")
    dx, dy = direction[0] / norm, direction[1] / norm
    dist, kind, idx = kernels.ray_hit(
        origin[0], origin[1], dx, dy, max_range, world.segs, world.discs
    )
    if kind == kernels.KIND_MISS:
        return None
    return RayHit(distance=float(dist), entity=world.entity_name(kind, idx))


def visible_surface_arc(
    world: World,
    column: Column,
    viewpoint: tuple[float, float],
    sample_step_deg: float = 0.25,
) -> ArcSet:
    """Azimuth arc of the column surface visible from a viewpoint.

    The unoccluded arc is the exact tangent construction: half-angle
    acos(r / d) centered on the viewpoint's azimuth from the column center.
    Walls, obstacles, and other columns crossing the sight lines shrink it;
    blocked sub-arcs are resolved by sampling at `sample_step_deg`.
    """
    vx, vy = viewpoint
    d = math.hypot(vx - column.cx, vy - column.cy)
    if d <= column.radius:
        raise ValueError(f"viewpoint lies inside column {column.id!r}")
    half = math.degrees(math.acos(column.radius / d))
    center_az = azimuth_deg(column.center, viewpoint)
    full = ArcSet.from_interval(center_az - half, center_az + half)

    others_discs = world.discs_excluding(column.id)
    if world.segs.shape[0] == 0 and others_discs.shape[0] == 0:
        return full

    n = max(3, int(math.ceil(2.0 * half / sample_step_deg)) + 1)
    azs = np.linspace(center_az - half, center_az + half, n)
    rads = np.radians(azs)
    px = column.cx + column.radius * np.cos(rads)
    py = column.cy + column.radius * np.sin(rads)
    ex = px - vx
    ey = py - vy
    lens = np.hypot(ex, ey)
    dirs = np.stack([ex / lens, ey / lens], axis=1)
    origins = np.broadcast_to(np.array([vx, vy]), (n, 2)).copy()
    dists, kinds, _ = kernels.ray_hits(origins, dirs, float(lens.max()) + 1.0, world.segs, others_discs)
    clear = (kinds == kernels.KIND_MISS) | (dists >= lens - 1e-9)
    if clear.all():
        return full
    if not clear.any():
        return ArcSet.empty()

    # merge consecutive clear samples into sub-intervals, half-step padded
    step = 2.0 * half / (n - 1)
    intervals: list[tuple[float, float]] = []
    start = None
    for i, ok in enumerate(clear):
        if ok and start is None:
            start = azs[i] - 0.5 * step
        elif not ok and start is not None:
            intervals.append((start, azs[i - 1] + 0.5 * step))
            start = None
    if start is not None:
        intervals.append((start, azs[-1] + 0.5 * step))
    # clamp padding to the analytic arc
    lo, hi = center_az - half, center_az + half
    intervals = [(max(s, lo), min(e, hi)) for s, e in intervals]
    return ArcSet.from_intervals(intervals)


# ---------------------------------------------------------------------------
# scenario loading
# ---------------------------------------------------------------------------

_CLEARANCE_TOL = 1e-9


def _require_keys(obj: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ScenarioError(f"{where}: unknown field(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ScenarioError(f"{where}: missing field(s) {sorted(missing)}")


def _num(obj: dict, key: str, where: str) -> float:
    v = obj[key]
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ScenarioError(f"{where}.{key}: expected a number, got {type(v).__name__}")
    return float(v)


def load_scenario(path: str | Path) -> tuple[World, dict, dict]:
    """Load and validate a scenario file.

    Returns (world, mav start {'x','y','heading_deg'}, parameter overrides).
    Unknown fields anywhere in the file are rejected.
    """
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read scenario {path}: {e}") from e
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}: JSON parse error at line {e.lineno} col {e.colno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise ScenarioError(f"{path}: top level must be an object")

    _require_keys(
        data,
        {"name", "bounds", "walls", "obstacles", "columns", "mav", "params"},
        {"name", "bounds", "columns", "mav"},
        "scenario",
    )
    name = data["name"]
    if not isinstance(name, str) or not name:
        raise ScenarioError("scenario.name: expected a non-empty string")
    bounds_raw = data["bounds"]
    if not (isinstance(bounds_raw, list) and len(bounds_raw) == 2):
        raise ScenarioError("scenario.bounds: expected [width, height]")
    w, h = float(bounds_raw[0]), float(bounds_raw[1])
    if w <= 0 or h <= 0:
        raise ScenarioError("scenario.bounds: width and height must be positive")

    # boundary walls are implicit
    walls: list[tuple[float, float, float, float]] = [
        (0.0, 0.0, w, 0.0),
        (w, 0.0, w, h),
        (w, h, 0.0, h),
        (0.0, h, 0.0, 0.0),
    ]
    for i, wall in enumerate(data.get("walls", [])):
        where = f"walls[{i}]"
        _require_keys(wall, {"x1", "y1", "x2", "y2"}, {"x1", "y1", "x2", "y2"}, where)
        seg = tuple(_num(wall, k, where) for k in ("x1", "y1", "x2", "y2"))
        for x, y in ((seg[0], seg[1]), (seg[2], seg[3])):
            if not (0.0 <= x <= w and 0.0 <= y <= h):
                raise ScenarioError(f"{where}: endpoint ({x}, {y}) outside bounds")
        walls.append(seg)

    obstacles: list[tuple[float, float, float]] = []
    for i, ob in enumerate(data.get("obstacles", [])):
        where = f"obstacles[{i}]"
        _require_keys(ob, {"cx", "cy", "r"}, {"cx", "cy", "r"}, where)
        cx, cy, r = _num(ob, "cx", where), _num(ob, "cy", where), _num(ob, "r", where)
        if r <= 0:
            raise ScenarioError(f"{where}: radius must be positive")
        if not (r <= cx <= w - r and r <= cy <= h - r):
            raise ScenarioError(f"{where}: disc extends outside bounds")
        obstacles.append((cx, cy, r))

    columns: list[Column] = []
    seen_ids: set[str] = set()
    for i, col in enumerate(data["columns"]):
        where = f"columns[{i}]"
        _require_keys(
            col,
            {"id", "cx", "cy", "radius", "height", "attached", "damage"},
            {"id", "cx", "cy", "radius", "height"},
            where,
        )
        cid = col["id"]
        if not isinstance(cid, str) or not cid:
            raise ScenarioError(f"{where}.id: expected a non-empty string")
        if cid in seen_ids:
            raise ScenarioError(f"{where}: duplicate column id {cid!r}")
        seen_ids.add(cid)
        cx, cy = _num(col, "cx", where), _num(col, "cy", where)
        radius, height = _num(col, "radius", where), _num(col, "height", where)
        if radius <= 0 or height <= 0:
            raise ScenarioError(f"{where}: radius and height must be positive")
        patches: list[DamagePatch] = []
        for j, pd in enumerate(col.get("damage", [])):
            pwhere = f"{where}.damage[{j}]"
            _require_keys(
                pd,
                {"id", "kind", "az_start_deg", "az_end_deg", "z_low", "z_high"},
                {"id", "kind", "az_start_deg", "az_end_deg", "z_low", "z_high"},
                pwhere,
            )
            try:
                kind = DamageKind(pd["kind"])
            except ValueError:
                raise ScenarioError(
                    f"{pwhere}.kind: must be one of {[k.value for k in DamageKind]}"
                ) from None
            a0 = _num(pd, "az_start_deg", pwhere)
            a1 = _num(pd, "az_end_deg", pwhere)
            if not (0.0 <= a0 < 360.0):
                raise ScenarioError(f"{pwhere}.az_start_deg: must lie in [0, 360)")
            if a1 == a0:
                raise ScenarioError(f"{pwhere}: azimuth interval is empty")
            z0, z1 = _num(pd, "z_low", pwhere), _num(pd, "z_high", pwhere)
            if z1 <= z0:
                raise ScenarioError(f"{pwhere}: z_high must exceed z_low")
            patches.append(DamagePatch(pd["id"], kind, a0, a1, z0, z1))
        columns.append(
            Column(
                id=cid,
                cx=cx,
                cy=cy,
                radius=radius,
                height=height,
                attached=bool(col.get("attached", False)),
                patches=tuple(patches),
            )
        )

    mav = data["mav"]
    _require_keys(mav, {"x", "y", "heading_deg"}, {"x", "y", "heading_deg"}, "mav")
    mav_start = {
        "x": _num(mav, "x", "mav"),
        "y": _num(mav, "y", "mav"),
        "heading_deg": _num(mav, "heading_deg", "mav"),
    }
    if not (0.0 <= mav_start["x"] <= w and 0.0 <= mav_start["y"] <= h):
        raise ScenarioError("mav: start position outside bounds")

    params = data.get("params", {})
    if not isinstance(params, dict):
        raise ScenarioError("params: expected an object")

    world = World(
        name=name,
        bounds=(w, h),
        walls=tuple(walls),
        obstacles=tuple(obstacles),
        columns=tuple(columns),
    )
    _validate_world(world)
    return world, mav_start, params


def _validate_world(world: World) -> None:
    w, h = world.bounds
    segs = world.segs
    for c in world.columns:
        if not (c.radius <= c.cx <= w - c.radius and c.radius <= c.cy <= h - c.radius):
            raise ScenarioError(f"column {c.id!r}: disc extends outside bounds")
        # wall clearance: overlap forbidden; tangency requires attached
        for i in range(segs.shape[0]):
            d = kernels.point_clearance(c.cx, c.cy, segs[i : i + 1], np.zeros((0, 3)))
            gap = d - c.radius
            if gap < -_CLEARANCE_TOL:
                raise ScenarioError(f"column {c.id!r} overlaps wall:{i}")
            if gap <= _CLEARANCE_TOL and not c.attached:
                raise ScenarioError(
                    f"column {c.id!r} touches wall:{i}; declare 'attached': true if intended"
                )
        for i, (ox, oy, orad) in enumerate(world.obstacles):
            gap = math.hypot(c.cx - ox, c.cy - oy) - c.radius - orad
            if gap < -_CLEARANCE_TOL:
                raise ScenarioError(f"column {c.id!r} overlaps obstacle:{i}")
        for other in world.columns:
            if other.id <= c.id:
                continue
            gap = math.hypot(c.cx - other.cx, c.cy - other.cy) - c.radius - other.radius
            if gap < -_CLEARANCE_TOL:
                raise ScenarioError(f"columns {c.id!r} and {other.id!r} overlap")
