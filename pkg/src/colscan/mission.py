"""Semi-autonomous mission controller: manual pilot, column approach, orbit
scan with interval captures and obstacle reversal, completion.

Transitions: Manual -> Approach (detection), Approach -> ScanInit (bbox area
threshold), ScanInit -> Scanning, Scanning -> Scanning (one reversal max),
Scanning -> Complete (second obstacle end or full 360), Complete -> Manual,
plus Approach -> Manual on target loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .geom import azimuth_deg, signed_delta_deg, signed_delta_rad
from .kinematics import MavPose, VelocityCommand, ZERO_COMMAND
from .sensors import ColumnBox, ImageObservation, SensorConfig, detect_column

CCW = 1
CW = -1


class MissionModeKind(str, Enum):
    MANUAL = "manual"
    APPROACH = "approach"
    SCAN_INIT = "scan_init"
    SCANNING = "scanning"
    COMPLETE = "complete"


class CaptureReason(str, Enum):
    SCAN_START = "scan_start"
    INTERVAL = "interval"
    ARC_END = "arc_end"


@dataclass(frozen=True)
class Capture:
    tick: int
    pose: MavPose
    azimuth_deg: float
    reason: CaptureReason


@dataclass
class MissionParams:
    area_threshold: float = 0.10
    capture_interval_deg: float = 30.0
    obstacle_stop_distance: float = 0.5
    approach_speed: float = 0.5
    orbit_speed_deg_s: float = 15.0
    standoff_min: float = 1.0
    max_orbit_radius: float = 6.0
    k_yaw: float = 2.0  # rad/s per unit of bbox-center offset
    radial_gain: float = 1.0  # 1/s, orbit radius servo
    lost_patience: int = 20  # ticks without the target before reverting
    # bbox must be this close to frame center before the scan starts, or the
    # lidar ray may range past the column edge
    center_tolerance: float = 0.05

    def __post_init__(self) -> None:
        if not 0.0 < self.area_threshold < 1.0:
            raise ValueError("area_threshold must lie in (0, 1)")
        if self.capture_interval_deg <= 0.0:
            raise ValueError("capture_interval_deg must be positive")
        if math.fmod(360.0, self.capture_interval_deg) > 1e-9:
            import warnings

            warnings.warn(
                f"capture_interval_deg={self.capture_interval_deg} does not divide 360 evenly",
                stacklevel=2,
            )


@dataclass
class ScanState:
    column_id: str
    orbit_center: tuple[float, float]
    orbit_radius: float
    start_azimuth_deg: float
    direction: int = CCW
    reversed_once: bool = False
    swept_deg: float = 0.0  # signed cumulative
    max_swept: float = 0.0
    min_swept: float = 0.0
    prev_azimuth_deg: float = 0.0
    next_interval_ccw: float = 0.0
    next_interval_cw: float = 0.0
    captures: list[Capture] = field(default_factory=list)
    end_azimuths: list[float] = field(default_factory=list)

    @property
    def total_span_deg(self) -> float:
        return self.max_swept - self.min_swept


class DegenerateTargetError(ValueError):
    """Bounding box fills the frame; the radius estimate is unbounded."""


class OrbitTooLargeError(ValueError):
    pass


def estimate_column_radius(d_lidar: float, bbox_half_angle: float) -> float:
    """Column radius from the lidar surface distance and the bbox half-angle.

    The half-angle subtended by a disc of radius r seen from distance
    d + r to its center satisfies sin(a) = r / (d + r), hence
    r = d * sin(a) / (1 - sin(a)).
    """
    if d_lidar <= 0.0:
        raise ValueError("d_lidar must be positive")
    if not 0.0 < bbox_half_angle < math.pi / 2.0:
        raise ValueError("bbox_half_angle must lie in (0, pi/2)")
    s = math.sin(bbox_half_angle)
    if s >= 1.0 - 1e-9:
        raise DegenerateTargetError("target fills the frame")
    return d_lidar * s / (1.0 - s)


def begin_scan(
    pose: MavPose,
    d_lidar: float,
    bbox: ColumnBox,
    sensor_config: SensorConfig,
    params: MissionParams,
    tick: int,
) -> ScanState:
    """Construct orbit geometry from the current pose, lidar range, and bbox,
    and log the scan-start capture."""
    half_angle = 0.5 * bbox.width * math.radians(sensor_config.hfov_deg)
    r_hat = estimate_column_radius(d_lidar, half_angle)
    radius = d_lidar + r_hat
    if radius > params.max_orbit_radius:
        raise OrbitTooLargeError(
            f"orbit radius {radius:.2f} m exceeds limit {params.max_orbit_radius} m"
        )
    cx = pose.x + radius * math.cos(pose.heading)
    cy = pose.y + radius * math.sin(pose.heading)
    start_az = azimuth_deg((cx, cy), (pose.x, pose.y))
    scan = ScanState(
        column_id=bbox.column_id,
        orbit_center=(cx, cy),
        orbit_radius=radius,
        start_azimuth_deg=start_az,
        prev_azimuth_deg=start_az,
        next_interval_ccw=params.capture_interval_deg,
        next_interval_cw=-params.capture_interval_deg,
    )
    scan.captures.append(Capture(tick, pose, start_az, CaptureReason.SCAN_START))
    return scan


@dataclass
class SensorFrame:
    """One tick's worth of fresh sensor reads."""

    lidar: Optional[float]
    ultrasound: dict[str, Optional[float]]
    observation: ImageObservation


class MissionController:
    """Owns the mission mode and scan bookkeeping; one instance per run.

    ``step`` is called once per tick with fresh sensor reads and returns the
    velocity command plus the events raised this tick. Deterministic: state
    is a pure function of the input sequence.
    """

    def __init__(self, params: MissionParams, sensor_config: SensorConfig, v_max: float = 1.0):
        self.params = params
        self.sensor_config = sensor_config
        self.v_max = v_max
        self.mode = MissionModeKind.MANUAL
        self.scan: Optional[ScanState] = None
        self.target_id: Optional[str] = None
        self.lost_ticks = 0
        self.assessed: set[str] = set()
        self.abandoned: set[str] = set()
        self.completed_scans: list[ScanState] = []

    def mode_label(self) -> str:
        if self.mode is MissionModeKind.SCANNING and self.scan is not None:
            return f"scanning_{'ccw' if self.scan.direction == CCW else 'cw'}"
        return self.mode.value

    # -- per-mode handlers -------------------------------------------------

    def step(
        self, tick: int, pose: MavPose, frame: SensorFrame, pilot_cmd: VelocityCommand
    ) -> tuple[VelocityCommand, list[dict]]:
        events: list[dict] = []
        if self.mode is MissionModeKind.MANUAL:
            cmd = self._step_manual(tick, frame, events, pilot_cmd)
        elif self.mode is MissionModeKind.APPROACH:
            cmd = self._step_approach(tick, frame, events)
        elif self.mode is MissionModeKind.SCAN_INIT:
            cmd = self._step_scan_init(tick, pose, frame, events)
        elif self.mode is MissionModeKind.SCANNING:
            cmd = self._step_scanning(tick, pose, frame, events)
        else:  # COMPLETE
            cmd = self._step_complete(tick, events)
        return cmd, events

    def _switch(self, tick: int, to: MissionModeKind, events: list[dict], **extra) -> None:
        events.append(
            {"tick": tick, "kind": "mode_switch", "from": self.mode.value, "to": to.value, **extra}
        )
        self.mode = to

    def _target_box(self, observation: ImageObservation) -> Optional[ColumnBox]:
        for box in observation.column_boxes:
            if box.column_id == self.target_id:
                return box
        return None

    def _step_manual(self, tick, frame, events, pilot_cmd) -> VelocityCommand:
        skip = self.assessed | self.abandoned
        candidates = [
            b for b in frame.observation.column_boxes if b.column_id not in skip
        ]
        if candidates:
            pick = detect_column(
                ImageObservation(frame.observation.pose, tick, tuple(candidates), ())
            )
            self.target_id = pick.column_id
            self.lost_ticks = 0
            self._switch(tick, MissionModeKind.APPROACH, events, reason="auto", target=pick.column_id)
            return ZERO_COMMAND
        return pilot_cmd

    def _step_approach(self, tick, frame, events) -> VelocityCommand:
        box = self._target_box(frame.observation)
        if box is None:
            self.lost_ticks += 1
            if self.lost_ticks >= self.params.lost_patience:
                events.append({"tick": tick, "kind": "target_lost", "target": self.target_id})
                self.target_id = None
                self._switch(tick, MissionModeKind.MANUAL, events, reason="target_lost")
            return ZERO_COMMAND
        self.lost_ticks = 0
        centered = abs(box.u_center - 0.5) <= self.params.center_tolerance
        if (
            box.area_fraction >= self.params.area_threshold
            and frame.lidar is not None
            and centered
        ):
            self._switch(tick, MissionModeKind.SCAN_INIT, events, area=box.area_fraction)
            return ZERO_COMMAND
        yaw = self.params.k_yaw * (0.5 - box.u_center)
        forward = 0.0
        if (
            box.area_fraction < self.params.area_threshold
            and frame.lidar is not None
            and frame.lidar > self.params.standoff_min
        ):
            forward = self.params.approach_speed
        return VelocityCommand(v_forward=forward, yaw_rate=yaw)

    def _step_scan_init(self, tick, pose, frame, events) -> VelocityCommand:
        box = self._target_box(frame.observation)
        if box is None or frame.lidar is None:
            self._switch(tick, MissionModeKind.APPROACH, events, reason="scan_init_retry")
            return ZERO_COMMAND
        try:
            self.scan = begin_scan(
                pose, frame.lidar, box, self.sensor_config, self.params, tick
            )
        except (DegenerateTargetError, OrbitTooLargeError) as e:
            events.append({"tick": tick, "kind": "scan_aborted", "msg": str(e)})
            # abandoned columns need an operator decision; never auto-retarget
            self.abandoned.add(self.target_id)
            self.target_id = None
            self._switch(tick, MissionModeKind.MANUAL, events, reason="scan_aborted")
            return ZERO_COMMAND
        events.append(
            {
                "tick": tick,
                "kind": "scan_begin",
                "column": self.scan.column_id,
                "orbit_center": list(self.scan.orbit_center),
                "orbit_radius": self.scan.orbit_radius,
                "start_azimuth_deg": self.scan.start_azimuth_deg,
            }
        )
        events.append(self._capture_event(self.scan.captures[0]))
        self._switch(tick, MissionModeKind.SCANNING, events)
        return ZERO_COMMAND

    @staticmethod
    def _capture_event(cap: Capture) -> dict:
        return {
            "tick": cap.tick,
            "kind": "capture",
            "reason": cap.reason.value,
            "azimuth_deg": cap.azimuth_deg,
        }

    def _step_scanning(self, tick, pose, frame, events) -> VelocityCommand:
        scan = self.scan
        assert scan is not None
        params = self.params
        az = azimuth_deg(scan.orbit_center, (pose.x, pose.y))
        scan.swept_deg += signed_delta_deg(az, scan.prev_azimuth_deg)
        scan.prev_azimuth_deg = az
        scan.max_swept = max(scan.max_swept, scan.swept_deg)
        scan.min_swept = min(scan.min_swept, scan.swept_deg)

        # interval captures trigger on newly reached multiples only, so a
        # reversed pass never re-captures azimuths it already photographed
        while scan.swept_deg >= scan.next_interval_ccw:
            cap = Capture(tick, pose, az, CaptureReason.INTERVAL)
            scan.captures.append(cap)
            events.append(self._capture_event(cap))
            scan.next_interval_ccw += params.capture_interval_deg
        while scan.swept_deg <= scan.next_interval_cw:
            cap = Capture(tick, pose, az, CaptureReason.INTERVAL)
            scan.captures.append(cap)
            events.append(self._capture_event(cap))
            scan.next_interval_cw -= params.capture_interval_deg

        side = "right" if scan.direction == CCW else "left"
        reading = frame.ultrasound.get(side)
        if reading is not None and reading < params.obstacle_stop_distance:
            cap = Capture(tick, pose, az, CaptureReason.ARC_END)
            scan.captures.append(cap)
            events.append(self._capture_event(cap))
            scan.end_azimuths.append(az)
            events.append(
                {"tick": tick, "kind": "arc_end", "azimuth_deg": az, "distance": reading}
            )
            if not scan.reversed_once:
                scan.direction = -scan.direction
                scan.reversed_once = True
                events.append({"tick": tick, "kind": "scan_reversed"})
                return ZERO_COMMAND
            self._switch(tick, MissionModeKind.COMPLETE, events, reason="second_arc_end")
            return ZERO_COMMAND

        if scan.total_span_deg >= 360.0:
            self._switch(tick, MissionModeKind.COMPLETE, events, reason="full_rotation")
            return ZERO_COMMAND

        return self._orbit_command(pose, scan)

    def _orbit_command(self, pose: MavPose, scan: ScanState) -> VelocityCommand:
        params = self.params
        cx, cy = scan.orbit_center
        dist = math.hypot(cx - pose.x, cy - pose.y)
        bearing_err = signed_delta_rad(math.atan2(cy - pose.y, cx - pose.x), pose.heading)
        # cap the angular rate so the tangential speed respects v_max; the
        # yaw feedforward must match the actual orbit rate or the heading lag
        # leaks tangential velocity into the radial axis
        omega = math.radians(params.orbit_speed_deg_s)
        omega = min(omega, self.v_max / max(scan.orbit_radius, 1e-6))
        v_lat = -scan.direction * omega * scan.orbit_radius
        v_fwd = params.radial_gain * (dist - scan.orbit_radius)
        yaw = scan.direction * omega + params.k_yaw * bearing_err
        return VelocityCommand(v_forward=v_fwd, v_lateral=v_lat, yaw_rate=yaw)

    def _step_complete(self, tick, events) -> VelocityCommand:
        scan = self.scan
        if scan is not None:
            self.assessed.add(scan.column_id)
            self.completed_scans.append(scan)
            events.append({"tick": tick, "kind": "scan_complete", "column": scan.column_id})
        self.scan = None
        self.target_id = None
        self._switch(tick, MissionModeKind.MANUAL, events, reason="manual")
        return ZERO_COMMAND


def coverage_arcs(captures: list[Capture], column, world):
    """Union of the surface arcs visible from every capture pose."""
    from .world import visible_surface_arc

    if not captures:
        raise ValueError("at least one capture required")
    arcs = None
    for cap in captures:
        arc = visible_surface_arc(world, column, (cap.pose.x, cap.pose.y))
        arcs = arc if arcs is None else arcs.union(arc)
    return arcs


def coverage_so_far(captures: list[Capture], column, world) -> float:
    """Fraction of the column surface azimuths covered by the capture set."""
    return coverage_arcs(captures, column, world).coverage_fraction()
