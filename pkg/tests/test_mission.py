import math

import pytest

from colscan.kinematics import MavPose, VelocityCommand, ZERO_COMMAND
from colscan.mission import (
    CCW,
    Capture,
    CaptureReason,
    DegenerateTargetError,
    MissionController,
    MissionModeKind,
    MissionParams,
    OrbitTooLargeError,
    SensorFrame,
    begin_scan,
    coverage_so_far,
    estimate_column_radius,
)
from colscan.sensors import ColumnBox, ImageObservation, SensorConfig

CFG = SensorConfig()
PARAMS = MissionParams()

FULL_ARC_3M = 2.0 * math.degrees(math.acos(0.1))


def box_for(area, u_center=0.5, column_id="C1", hfov_deg=70.0):
    """Column box with a given area fraction whose width encodes the true
    angular half-angle for a 0.3 m column seen at the matching distance."""
    width = area  # vertical clamped to 1.0 in these synthetic frames
    return ColumnBox(
        column_id,
        u_center - width / 2.0,
        0.0,
        u_center + width / 2.0,
        1.0,
        area,
    )


def frame(boxes=(), lidar=3.0, left=None, right=None, rear=None, pose=MavPose(0, 0, 0), tick=0):
    return SensorFrame(
        lidar=lidar,
        ultrasound={"left": left, "right": right, "rear": rear},
        observation=ImageObservation(pose, tick, tuple(boxes), ()),
    )


class TestEstimateRadius:
    def test_exact_for_ground_truth(self):
        # d=2.7 m with half-angle asin(0.1): r = 0.3 exactly
        r = estimate_column_radius(2.7, math.asin(0.1))
        assert r == pytest.approx(0.3, abs=1e-12)

    def test_formula_hand_check(self):
        # sin(a)=0.2 at d=2.0: r = 0.4/0.8 = 0.5, and 0.5/(2.0+0.5) = 0.2
        r = estimate_column_radius(2.0, math.asin(0.2))
        assert r == pytest.approx(0.5, abs=1e-12)
        assert r / (2.0 + r) == pytest.approx(0.2, abs=1e-12)

    def test_small_angle_limit(self):
        assert estimate_column_radius(2.0, 1e-9) == pytest.approx(0.0, abs=1e-8)

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateTargetError):
            estimate_column_radius(2.0, math.pi / 2.0 - 1e-12)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            estimate_column_radius(-1.0, 0.1)
        with pytest.raises(ValueError):
            estimate_column_radius(1.0, 0.0)


class TestBeginScan:
    def _bbox_halfangle(self, half_angle_rad):
        width = 2.0 * half_angle_rad / math.radians(CFG.hfov_deg)
        return ColumnBox("C1", 0.5 - width / 2, 0.0, 0.5 + width / 2, 1.0, width)

    def test_center_geometry_east_facing(self):
        pose = MavPose(2.0, 5.0, 0.0)
        scan = begin_scan(pose, 2.7, self._bbox_halfangle(math.asin(0.1)), CFG, PARAMS, tick=0)
        assert scan.orbit_center[0] == pytest.approx(5.0, abs=1e-9)
        assert scan.orbit_center[1] == pytest.approx(5.0, abs=1e-9)
        assert scan.orbit_radius == pytest.approx(3.0, abs=1e-9)
        assert scan.start_azimuth_deg == pytest.approx(180.0, abs=1e-9)
        assert len(scan.captures) == 1
        assert scan.captures[0].reason is CaptureReason.SCAN_START

    def test_center_geometry_north_facing(self):
        pose = MavPose(5.0, 2.0, math.radians(90.0))
        scan = begin_scan(pose, 2.7, self._bbox_halfangle(math.asin(0.1)), CFG, PARAMS, tick=0)
        assert scan.orbit_center[0] == pytest.approx(5.0, abs=1e-9)
        assert scan.orbit_center[1] == pytest.approx(5.0, abs=1e-9)
        assert scan.start_azimuth_deg == pytest.approx(270.0, abs=1e-9)

    def test_radius_limit(self):
        pose = MavPose(2.0, 5.0, 0.0)
        with pytest.raises(OrbitTooLargeError):
            begin_scan(pose, 6.5, self._bbox_halfangle(math.asin(0.1)), CFG, PARAMS, tick=0)


class TestTransitions:
    def make(self):
        return MissionController(PARAMS, CFG)

    def test_manual_passthrough_without_detection(self):
        c = self.make()
        pilot = VelocityCommand(0.4, 0, 0.1)
        cmd, events = c.step(0, MavPose(0, 0, 0), frame(), pilot)
        assert cmd == pilot
        assert c.mode is MissionModeKind.MANUAL
        assert events == []

    def test_manual_to_approach_on_detection(self):
        c = self.make()
        cmd, events = c.step(0, MavPose(0, 0, 0), frame([box_for(0.03)]), ZERO_COMMAND)
        assert c.mode is MissionModeKind.APPROACH
        assert any(e["kind"] == "mode_switch" and e["to"] == "approach" for e in events)
        assert c.target_id == "C1"

    def test_approach_forward_below_threshold(self):
        c = self.make()
        c.step(0, MavPose(0, 0, 0), frame([box_for(0.03)]), ZERO_COMMAND)
        cmd, _ = c.step(1, MavPose(0, 0, 0), frame([box_for(0.05)], lidar=3.0), ZERO_COMMAND)
        assert c.mode is MissionModeKind.APPROACH
        assert cmd.v_forward == pytest.approx(PARAMS.approach_speed)

    def test_approach_yaw_centers_target(self):
        c = self.make()
        c.step(0, MavPose(0, 0, 0), frame([box_for(0.03)]), ZERO_COMMAND)
        cmd, _ = c.step(1, MavPose(0, 0, 0), frame([box_for(0.05, u_center=0.3)]), ZERO_COMMAND)
        assert cmd.yaw_rate == pytest.approx(PARAMS.k_yaw * 0.2)

    def test_approach_holds_at_standoff(self):
        c = self.make()
        c.step(0, MavPose(0, 0, 0), frame([box_for(0.03)]), ZERO_COMMAND)
        cmd, _ = c.step(1, MavPose(0, 0, 0), frame([box_for(0.05)], lidar=0.9), ZERO_COMMAND)
        assert cmd.v_forward == 0.0
        assert c.mode is MissionModeKind.APPROACH

    def test_threshold_crossing_enters_scan_init(self):
        c = self.make()
        c.step(0, MavPose(0, 0, 0), frame([box_for(0.03)]), ZERO_COMMAND)
        c.step(1, MavPose(0, 0, 0), frame([box_for(0.05)]), ZERO_COMMAND)
        cmd, events = c.step(2, MavPose(0, 0, 0), frame([box_for(0.12)]), ZERO_COMMAND)
        assert c.mode is MissionModeKind.SCAN_INIT
        assert cmd == ZERO_COMMAND

    def test_lidar_out_of_range_blocks_scan_init(self):
        c = self.make()
        c.step(0, MavPose(0, 0, 0), frame([box_for(0.03)]), ZERO_COMMAND)
        c.step(1, MavPose(0, 0, 0), frame([box_for(0.12)], lidar=None), ZERO_COMMAND)
        assert c.mode is MissionModeKind.APPROACH

    def test_target_lost_reverts_to_manual(self):
        c = self.make()
        c.step(0, MavPose(0, 0, 0), frame([box_for(0.03)]), ZERO_COMMAND)
        for t in range(1, PARAMS.lost_patience + 1):
            cmd, events = c.step(t, MavPose(0, 0, 0), frame([]), ZERO_COMMAND)
            assert cmd == ZERO_COMMAND
        assert c.mode is MissionModeKind.MANUAL
        assert any(e["kind"] == "target_lost" for e in events)

    def test_scan_init_builds_orbit_and_enters_scanning(self):
        c = self.make()
        pose = MavPose(2.0, 5.0, 0.0)
        width = 2.0 * math.asin(0.1) / math.radians(CFG.hfov_deg)
        bbox = ColumnBox("C1", 0.5 - width / 2, 0, 0.5 + width / 2, 1.0, 0.12)
        c.step(0, pose, frame([bbox]), ZERO_COMMAND)  # -> approach
        c.step(1, pose, frame([bbox], lidar=2.7), ZERO_COMMAND)  # -> scan_init
        cmd, events = c.step(2, pose, frame([bbox], lidar=2.7), ZERO_COMMAND)
        assert c.mode is MissionModeKind.SCANNING
        assert c.scan.direction == CCW
        assert not c.scan.reversed_once
        assert c.scan.orbit_radius == pytest.approx(3.0, abs=1e-9)
        kinds = [e["kind"] for e in events]
        assert "scan_begin" in kinds and "capture" in kinds

    def _to_scanning(self, c, pose=MavPose(2.0, 5.0, 0.0)):
        width = 2.0 * math.asin(0.1) / math.radians(CFG.hfov_deg)
        bbox = ColumnBox("C1", 0.5 - width / 2, 0, 0.5 + width / 2, 1.0, 0.12)
        c.step(0, pose, frame([bbox]), ZERO_COMMAND)
        c.step(1, pose, frame([bbox], lidar=2.7), ZERO_COMMAND)
        c.step(2, pose, frame([bbox], lidar=2.7), ZERO_COMMAND)
        assert c.mode is MissionModeKind.SCANNING

    def test_obstacle_reverses_once_then_completes(self):
        c = self.make()
        self._to_scanning(c)
        pose = MavPose(2.0, 5.0, 0.0)
        # travel side for CCW is the right sensor
        cmd, events = c.step(3, pose, frame([], lidar=2.7, right=0.4), ZERO_COMMAND)
        assert c.scan.direction == -CCW
        assert c.scan.reversed_once
        assert any(e["kind"] == "arc_end" for e in events)
        assert cmd == ZERO_COMMAND
        # travel side is now left; second obstacle completes
        cmd, events = c.step(4, pose, frame([], lidar=2.7, left=0.4), ZERO_COMMAND)
        assert c.mode is MissionModeKind.COMPLETE
        assert len(c.scan.end_azimuths) == 2

    def test_non_travel_side_obstacle_ignored(self):
        c = self.make()
        self._to_scanning(c)
        pose = MavPose(2.0, 5.0, 0.0)
        cmd, events = c.step(3, pose, frame([], lidar=2.7, left=0.4, rear=0.2), ZERO_COMMAND)
        assert c.mode is MissionModeKind.SCANNING
        assert not c.scan.reversed_once

    def test_complete_returns_to_manual_and_marks_assessed(self):
        c = self.make()
        self._to_scanning(c)
        pose = MavPose(2.0, 5.0, 0.0)
        c.step(3, pose, frame([], right=0.4), ZERO_COMMAND)
        c.step(4, pose, frame([], left=0.4), ZERO_COMMAND)
        cmd, events = c.step(5, pose, frame([]), ZERO_COMMAND)
        assert c.mode is MissionModeKind.MANUAL
        assert "C1" in c.assessed
        assert any(e["kind"] == "scan_complete" for e in events)
        # an already-assessed column no longer triggers approach
        cmd, events = c.step(6, pose, frame([box_for(0.05)]), ZERO_COMMAND)
        assert c.mode is MissionModeKind.MANUAL

    def test_orbit_command_geometry(self):
        c = self.make()
        self._to_scanning(c)
        pose = MavPose(2.0, 5.0, 0.0)
        cmd, _ = c.step(3, pose, frame([]), ZERO_COMMAND)
        # CCW orbit facing the center: tangential motion is to the body right
        assert cmd.v_lateral < 0
        assert abs(cmd.v_lateral) == pytest.approx(
            min(math.radians(PARAMS.orbit_speed_deg_s) * 3.0, 1.0), abs=1e-9
        )
        assert cmd.yaw_rate > 0  # feedforward follows the azimuth rate


class TestCoverage:
    def test_single_capture_fraction(self, center_world):
        world, _, _ = center_world
        col = world.columns[0]
        cap = Capture(0, MavPose(2.0, 5.0, 0.0), 180.0, CaptureReason.SCAN_START)
        frac = coverage_so_far([cap], col, world)
        assert frac == pytest.approx(FULL_ARC_3M / 360.0, abs=1e-9)

    def test_two_antipodal_captures(self, center_world):
        world, _, _ = center_world
        col = world.columns[0]
        caps = [
            Capture(0, MavPose(2.0, 5.0, 0.0), 180.0, CaptureReason.SCAN_START),
            Capture(1, MavPose(8.0, 5.0, math.pi), 0.0, CaptureReason.INTERVAL),
        ]
        frac = coverage_so_far(caps, col, world)
        assert frac == pytest.approx(2.0 * FULL_ARC_3M / 360.0, abs=1e-9)

    def test_twelve_captures_cover_fully(self, center_world):
        world, _, _ = center_world
        col = world.columns[0]
        caps = []
        for k in range(12):
            az = 30.0 * k
            rad = math.radians(az)
            pose = MavPose(5.0 + 3.0 * math.cos(rad), 5.0 + 3.0 * math.sin(rad), 0.0)
            caps.append(Capture(k, pose, az, CaptureReason.INTERVAL))
        assert coverage_so_far(caps, col, world) == 1.0

    def test_empty_captures_rejected(self, center_world):
        world, _, _ = center_world
        with pytest.raises(ValueError):
            coverage_so_far([], world.columns[0], world)


def test_capture_interval_warns_if_not_divisor():
    with pytest.warns(UserWarning, match="divide 360"):
        MissionParams(capture_interval_deg=50.0)
