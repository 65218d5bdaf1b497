"""colscan: deterministic 2D simulator for semi-autonomous MAV
column-inspection missions with multi-view worst-case damage fusion."""

from .fusion import ColumnAssessment, DamageReport, DamageState, classify_image, figure5_check, fuse
from .kinematics import KinematicsParams, MavPose, VelocityCommand, clamp_command, step
from .mission import (
    CaptureReason,
    MissionController,
    MissionModeKind,
    MissionParams,
    ScanState,
    begin_scan,
    coverage_so_far,
    estimate_column_radius,
)
from .perception import DamageDetection, DetectorConfig, detect_damage
from .runner import PilotScript, RunReport, read_report, replay_verify, run_headless, write_report
from .sensors import ImageObservation, SensorConfig, camera_capture, detect_column, lidar_read, ultrasound_read
from .world import Column, DamageKind, DamagePatch, ScenarioError, World, load_scenario, ray_cast, visible_surface_arc

__version__ = "0.1.0"

__all__ = [
    "CaptureReason",
    "Column",
    "ColumnAssessment",
    "DamageDetection",
    "DamageKind",
    "DamagePatch",
    "DamageReport",
    "DamageState",
    "DetectorConfig",
    "ImageObservation",
    "KinematicsParams",
    "MavPose",
    "MissionController",
    "MissionModeKind",
    "MissionParams",
    "PilotScript",
    "RunReport",
    "ScanState",
    "ScenarioError",
    "SensorConfig",
    "VelocityCommand",
    "World",
    "begin_scan",
    "camera_capture",
    "clamp_command",
    "classify_image",
    "coverage_so_far",
    "detect_column",
    "detect_damage",
    "estimate_column_radius",
    "figure5_check",
    "fuse",
    "lidar_read",
    "load_scenario",
    "ray_cast",
    "read_report",
    "replay_verify",
    "run_headless",
    "step",
    "ultrasound_read",
    "visible_surface_arc",
    "write_report",
]
