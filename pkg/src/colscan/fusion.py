"""Per-image damage classification and worst-case multi-view fusion.

The severity ladder: no detections -> DS0, spalling only -> DS1, any exposed
reinforcement -> DS2. A column's fused state is the maximum image level over
all capture views; low angular coverage is surfaced but never downgrades the
verdict.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Sequence

from .kinematics import MavPose
from .perception import DamageDetection, DetectorConfig, detect_damage
from .sensors import SensorConfig, camera_capture
from .world import DamageKind, World


class DamageState(IntEnum):
    DS0_NONE = 0
    DS1_LIGHT = 1
    DS2_SEVERE = 2

    @property
    def label(self) -> str:
        return {0: "DS0_None", 1: "DS1_Light", 2: "DS2_Severe"}[int(self)]


_KIND_LEVEL = {
    DamageKind.SPALLING: DamageState.DS1_LIGHT,
    DamageKind.REBAR_EXPOSURE: DamageState.DS2_SEVERE,
}


@dataclass(frozen=True)
class DamageReport:
    tick: int
    pose: MavPose
    azimuth_deg: float
    reason: str
    detections: tuple[DamageDetection, ...]
    image_level: DamageState


@dataclass(frozen=True)
class ColumnAssessment:
    column_id: str
    fused_state: DamageState
    reports: tuple[DamageReport, ...]
    coverage_fraction: float
    evidence: tuple[tuple[int, int], ...]  # (report index, detection index)


def classify_image(detections: Sequence[DamageDetection]) -> DamageState:
    level = DamageState.DS0_NONE
    for det in detections:
        level = max(level, _KIND_LEVEL[det.kind])
    return level


def make_report(
    tick: int,
    pose: MavPose,
    azimuth_deg: float,
    reason: str,
    detections: Sequence[DamageDetection],
) -> DamageReport:
    return DamageReport(
        tick=tick,
        pose=pose,
        azimuth_deg=azimuth_deg,
        reason=reason,
        detections=tuple(detections),
        image_level=classify_image(detections),
    )


def fuse(
    column_id: str, reports: Sequence[DamageReport], coverage_fraction: float
) -> ColumnAssessment:
    """Worst case over per-image levels; evidence cites every detection of
    the maximal kind."""
    if not reports:
        raise ValueError("fuse requires at least one report")
    fused = max(r.image_level for r in reports)
    evidence: list[tuple[int, int]] = []
    if fused > DamageState.DS0_NONE:
        for ri, rep in enumerate(reports):
            for di, det in enumerate(rep.detections):
                if _KIND_LEVEL[det.kind] == fused:
                    evidence.append((ri, di))
    return ColumnAssessment(
        column_id=column_id,
        fused_state=fused,
        reports=tuple(reports),
        coverage_fraction=coverage_fraction,
        evidence=tuple(evidence),
    )


def figure5_check(
    world: World,
    single_view_pose: MavPose,
    scan_reports: Sequence[DamageReport],
    coverage_fraction: float,
    sensor_config: SensorConfig | None = None,
    detector_config: DetectorConfig | None = None,
) -> dict:
    """Compare a single fixed-view verdict against the multi-view fusion.

    With damage confined to one azimuth sector, a view from the undamaged
    side reports DS0 while the orbit scan fuses the true state.
    """
    sensor_config = sensor_config or SensorConfig()
    detector_config = detector_config or DetectorConfig()
    obs = camera_capture(world, single_view_pose, sensor_config, tick=0)
    single_state = classify_image(detect_damage(obs, detector_config))
    fused = fuse("single_vs_scan", scan_reports, coverage_fraction).fused_state
    return {
        "single_view_state": single_state,
        "fused_state": fused,
        "coverage_fraction": coverage_fraction,
        "underestimated": single_state < fused,
    }
