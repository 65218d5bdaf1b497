"""Simulated MAV sensor payload: forward 1D lidar, three ultrasonic cones,
and a pinhole-style camera producing bounding-box observations.

All reads are pure functions of (world, pose, config); out-of-range is None.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .geom import ArcSet, azimuth_deg, signed_delta_rad, wrap_deg
from .kinematics import MavPose
from .world import Column, World, ray_cast, visible_surface_arc

ULTRASOUND_MOUNT_DEG = {"left": 90.0, "right": -90.0, "rear": 180.0}


@dataclass(frozen=True)
class SensorConfig:
    lidar_max_range: float = 12.0
    ultrasound_max_range: float = 4.0
    ultrasound_cone_half_angle_deg: float = 15.0
    ultrasound_rays: int = 11
    hfov_deg: float = 70.0
    vfov_deg: float = 50.0
    min_detectable_area_fraction: float = 0.005

    def __post_init__(self) -> None:
        if not 0.0 < self.ultrasound_cone_half_angle_deg < 90.0:
            raise ValueError("ultrasound cone half-angle must be in (0, 90) degrees")
        if not (0.0 < self.hfov_deg < 180.0 and 0.0 < self.vfov_deg < 180.0):
            raise ValueError("hfov and vfov must be in (0, 180) degrees")
        if self.ultrasound_rays < 1 or self.ultrasound_rays % 2 == 0:
            raise ValueError("ultrasound_rays must be a positive odd count")


@dataclass(frozen=True)
class ColumnBox:
    column_id: str
    u_min: float
    v_min: float
    u_max: float
    v_max: float
    area_fraction: float

    @property
    def u_center(self) -> float:
        return 0.5 * (self.u_min + self.u_max)

    @property
    def width(self) -> float:
        return self.u_max - self.u_min


@dataclass(frozen=True)
class PatchView:
    patch_id: str
    column_id: str
    kind: str
    u_min: float
    v_min: float
    u_max: float
    v_max: float


@dataclass(frozen=True)
class ImageObservation:
    pose: MavPose
    tick: int
    column_boxes: tuple[ColumnBox, ...]
    visible_patches: tuple[PatchView, ...]


def lidar_read(world: World, pose: MavPose, config: SensorConfig) -> Optional[float]:
    """Single ray along heading; None beyond lidar_max_range."""
    hit = ray_cast(
        world,
        (pose.x, pose.y),
        (math.cos(pose.heading), math.sin(pose.heading)),
        config.lidar_max_range,
    )
    return hit.distance if hit else None


def ultrasound_read(
    world: World, pose: MavPose, sensor: str, config: SensorConfig
) -> Optional[float]:
    """Minimum distance over a fan of rays spanning the sensor cone."""
    mount = ULTRASOUND_MOUNT_DEG[sensor]
    center = pose.heading + math.radians(mount)
    half = math.radians(config.ultrasound_cone_half_angle_deg)
    n = config.ultrasound_rays
    angles = center + np.linspace(-half, half, n)
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    origins = np.broadcast_to(np.array([pose.x, pose.y]), (n, 2)).copy()
    dists, kinds, _ = kernels.ray_hits(
        origins, dirs, config.ultrasound_max_range, world.segs, world.discs
    )
    hit = kinds != kernels.KIND_MISS
    if not hit.any():
        return None
    return float(dists[hit].min())


def camera_capture(
    world: World, pose: MavPose, config: SensorConfig, tick: int = 0
) -> ImageObservation:
    """Project every visible column (and its visible damage patches) into
    normalized image coordinates.

    Horizontal extent is the column's angular width mapped into hfov; vertical
    extent maps the full column height at the surface distance into vfov,
    clamped to the frame. area_fraction is the product of the in-frame box
    dimensions. Columns below min_detectable_area_fraction are omitted.
    """
    hfov = math.radians(config.hfov_deg)
    vfov = math.radians(config.vfov_deg)
    boxes: list[ColumnBox] = []
    patch_views: list[PatchView] = []

    for col in world.columns:
        dist_c = math.hypot(col.cx - pose.x, col.cy - pose.y)
        if dist_c <= col.radius:
            continue
        bearing = signed_delta_rad(
            math.atan2(col.cy - pose.y, col.cx - pose.x), pose.heading
        )
        if abs(bearing) > hfov / 2.0:
            continue
        # line of sight to the nearest surface point must reach this column first
        hit = ray_cast(
            world,
            (pose.x, pose.y),
            (col.cx - pose.x, col.cy - pose.y),
            dist_c + col.radius,
        )
        if hit is None or hit.entity != col.id:
            continue

        half_ang = math.asin(min(1.0, col.radius / dist_c))
        u_center = 0.5 - bearing / hfov
        u_min = max(0.0, u_center - half_ang / hfov)
        u_max = min(1.0, u_center + half_ang / hfov)
        d_surf = dist_c - col.radius
        v_half = min(0.5, math.atan((col.height / 2.0) / d_surf) / vfov)
        v_min, v_max = 0.5 - v_half, 0.5 + v_half
        area = (u_max - u_min) * (v_max - v_min)
        if area < config.min_detectable_area_fraction:
            continue
        boxes.append(ColumnBox(col.id, u_min, v_min, u_max, v_max, area))

        arcs = visible_surface_arc(world, col, (pose.x, pose.y))
        for patch in col.patches:
            vis = arcs.intersection(patch.arc())
            if vis.measure() <= 1e-9:
                continue
            patch_views.append(
                _project_patch(pose, col, patch, vis, d_surf, hfov, vfov)
            )

    return ImageObservation(
        pose=pose, tick=tick, column_boxes=tuple(boxes), visible_patches=tuple(patch_views)
    )


def _project_patch(
    pose: MavPose,
    col: Column,
    patch,
    visible: ArcSet,
    d_surf: float,
    hfov: float,
    vfov: float,
) -> PatchView:
    us: list[float] = []
    for s, e in visible.pieces:
        for az in (s, 0.5 * (s + e), e):
            rad = math.radians(az)
            px = col.cx + col.radius * math.cos(rad)
            py = col.cy + col.radius * math.sin(rad)
            b = signed_delta_rad(math.atan2(py - pose.y, px - pose.x), pose.heading)
            us.append(0.5 - b / hfov)
    z_lo = max(0.0, patch.z_low)
    z_hi = min(col.height, patch.z_high)
    mid = col.height / 2.0
    v_top = 0.5 - math.atan((z_hi - mid) / d_surf) / vfov
    v_bot = 0.5 - math.atan((z_lo - mid) / d_surf) / vfov
    return PatchView(
        patch_id=patch.id,
        column_id=col.id,
        kind=patch.kind.value,
        u_min=max(0.0, min(us)),
        v_min=max(0.0, min(v_top, v_bot)),
        u_max=min(1.0, max(us)),
        v_max=min(1.0, max(v_top, v_bot)),
    )


def detect_column(observation: ImageObservation) -> Optional[ColumnBox]:
    """Largest-area column box; ties go to the lower column id."""
    if not observation.column_boxes:
        return None
    return min(observation.column_boxes, key=lambda b: (-b.area_fraction, b.column_id))


def visible_arc_for_capture(world: World, column: Column, pose: MavPose) -> ArcSet:
    return visible_surface_arc(world, column, (pose.x, pose.y))


def patch_azimuth_arc(patch) -> ArcSet:
    return ArcSet.from_interval(patch.az_start_deg, patch.az_end_deg)


def bearing_to(pose: MavPose, x: float, y: float) -> float:
    """Signed bearing from heading to a world point, radians."""
    return signed_delta_rad(math.atan2(y - pose.y, x - pose.x), pose.heading)


def pose_azimuth_about(pose: MavPose, cx: float, cy: float) -> float:
    return wrap_deg(azimuth_deg((cx, cy), (pose.x, pose.y)))
