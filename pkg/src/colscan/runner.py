"""Headless scenario runner, canonical run reports, and replay verification.

A run advances a fixed-step loop: fresh sensor reads, one mission-controller
step, command clamp, one kinematic step. Every tick is logged; the report
serializes canonically (sorted keys, floats at 6 decimal places) so byte
equality between runs is meaningful.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .config import SimParams, apply_overrides
from .fusion import ColumnAssessment, DamageState, fuse, make_report
from .kinematics import MavPose, VelocityCommand, ZERO_COMMAND, clamp_command, step
from .mission import (
    CaptureReason,
    MissionController,
    MissionModeKind,
    SensorFrame,
    coverage_arcs,
)
from .perception import detect_damage
from .sensors import camera_capture, lidar_read, ultrasound_read
from .world import ScenarioError, World, load_scenario

DEFAULT_TICK_BUDGET = 60000


def quantize_command(cmd: VelocityCommand) -> VelocityCommand:
    """Pilot inputs are quantized to 6 decimals on intake so recorded runs
    replay bit-exactly from their canonical reports."""
    return VelocityCommand(
        v_forward=round(cmd.v_forward, 6),
        v_lateral=round(cmd.v_lateral, 6),
        yaw_rate=round(cmd.yaw_rate, 6),
    )


class PilotScript:
    """Manual-phase command schedule: entries take effect at their tick and
    hold until the next entry."""

    def __init__(self, entries: list[dict]):
        for i, e in enumerate(entries):
            extra = set(e) - {"tick", "v_forward", "v_lateral", "yaw_rate"}
            if extra:
                raise ValueError(f"pilot script entry {i}: unknown field(s) {sorted(extra)}")
            if "tick" not in e:
                raise ValueError(f"pilot script entry {i}: missing tick")
        self.entries = sorted(entries, key=lambda e: e["tick"])

    @classmethod
    def load(cls, path: str | Path) -> "PilotScript":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(data, list):
            raise ValueError("pilot script must be a JSON list")
        return cls(data)

    def command_at(self, tick: int) -> VelocityCommand:
        cmd = ZERO_COMMAND
        for e in self.entries:
            if e["tick"] > tick:
                break
            cmd = VelocityCommand(
                v_forward=float(e.get("v_forward", 0.0)),
                v_lateral=float(e.get("v_lateral", 0.0)),
                yaw_rate=float(e.get("yaw_rate", 0.0)),
            )
        return quantize_command(cmd)

    @property
    def last_tick(self) -> int:
        return self.entries[-1]["tick"] if self.entries else -1


@dataclass
class RunReport:
    scenario_name: str
    scenario_path: str
    scenario_sha256: str
    seed: int
    dt: float
    params: dict
    trajectory: list[dict]
    events: list[dict]
    assessments: list[dict]
    captures: list[dict]
    termination: str
    ticks: int

    def to_dict(self) -> dict:
        return {
            "scenario_name": self.scenario_name,
            "scenario_path": self.scenario_path,
            "scenario_sha256": self.scenario_sha256,
            "seed": self.seed,
            "dt": self.dt,
            "params": self.params,
            "trajectory": self.trajectory,
            "events": self.events,
            "assessments": self.assessments,
            "captures": self.captures,
            "termination": self.termination,
            "ticks": self.ticks,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        return cls(**data)


class Simulation:
    """One scenario run's mutable state; stepped by the headless loop or the
    live telemetry server."""

    def __init__(
        self,
        world: World,
        start: dict,
        params: SimParams,
        seed: int = 0,
    ):
        self.world = world
        self.params = params
        self.seed = seed
        self.pose = MavPose(start["x"], start["y"], math.radians(start["heading_deg"]))
        self.controller = MissionController(
            params.mission, params.sensors, v_max=params.kinematics.v_max
        )
        self.tick = 0
        self.trajectory: list[dict] = []
        self.events: list[dict] = []
        self.assessments: list[ColumnAssessment] = []
        self.episodes = 0
        self._observations: dict[int, Any] = {}
        self._coverage_pieces: dict[str, list] = {}

    def sense(self) -> SensorFrame:
        obs = camera_capture(self.world, self.pose, self.params.sensors, tick=self.tick)
        return SensorFrame(
            lidar=lidar_read(self.world, self.pose, self.params.sensors),
            ultrasound={
                s: ultrasound_read(self.world, self.pose, s, self.params.sensors)
                for s in ("left", "right", "rear")
            },
            observation=obs,
        )

    def step_once(self, pilot_cmd: VelocityCommand) -> tuple[SensorFrame, list[dict]]:
        frame = self.sense()
        mode_before = self.controller.mode
        cmd, events = self.controller.step(self.tick, self.pose, frame, pilot_cmd)

        for ev in list(events):
            if ev["kind"] == "capture":
                # the capture's damage report comes from this tick's image
                dets = detect_damage(frame.observation, self.params.detector)
                ev["detections"] = len(dets)
                self._observations[self.tick] = (frame.observation, dets, ev)
            if ev["kind"] == "scan_complete":
                events.append(self._finalize_assessment(ev["column"]))

        self.trajectory.append(
            {
                "tick": self.tick,
                "x": self.pose.x,
                "y": self.pose.y,
                "heading_deg": math.degrees(self.pose.heading),
                "mode": self.controller.mode_label(),
            }
        )

        cmd = clamp_command(cmd, self.params.kinematics)
        new_pose, collided = step(self.world, self.pose, cmd, self.params.kinematics)
        if collided:
            events.append({"tick": self.tick, "kind": "collision"})
        self.pose = new_pose
        self.events.extend(events)
        if mode_before is MissionModeKind.COMPLETE:
            self.episodes += 1
        self.tick += 1
        return frame, events

    def _finalize_assessment(self, column_id: str) -> dict:
        scan = self.controller.completed_scans[-1]
        column = self.world.column(column_id)
        arcs = coverage_arcs(scan.captures, column, self.world)
        self._coverage_pieces[column_id] = [list(p) for p in arcs.pieces]
        coverage = arcs.coverage_fraction()
        reports = []
        for cap in scan.captures:
            _, dets, _ = self._observations[cap.tick]
            reports.append(
                make_report(cap.tick, cap.pose, cap.azimuth_deg, cap.reason.value, dets)
            )
        assessment = fuse(column_id, reports, coverage)
        self.assessments.append(assessment)
        return {
            "tick": self.tick,
            "kind": "assessment",
            "column": column_id,
            "fused_state": assessment.fused_state.label,
            "coverage_fraction": coverage,
        }


def run_headless(
    scenario: str | Path,
    pilot_script: Optional[PilotScript] = None,
    seed: int = 0,
    overrides: Optional[dict] = None,
    tick_budget: int = DEFAULT_TICK_BUDGET,
    dt: Optional[float] = None,
    exact_ticks: Optional[int] = None,
) -> RunReport:
    """Run a scenario to completion (mission complete and pilot script
    exhausted) or until the tick budget runs out.

    ``exact_ticks`` runs precisely that many ticks with no early exit; replay
    verification uses it to reproduce recorded sessions tick for tick."""
    scenario = Path(scenario)
    world, start, scenario_params = load_scenario(scenario)
    params = apply_overrides(SimParams(), scenario_params)
    if overrides:
        params = apply_overrides(params, overrides)
    if dt is not None:
        from dataclasses import replace

        params.kinematics = replace(params.kinematics, dt=dt)
    if seed != 0:
        from dataclasses import replace

        params.detector = replace(params.detector, seed=seed)
    pilot = pilot_script or PilotScript([])

    sim = Simulation(world, start, params, seed=seed)
    budget = exact_ticks if exact_ticks is not None else tick_budget
    termination = "session_end" if exact_ticks is not None else "tick_budget_exhausted"
    last_recorded = ZERO_COMMAND
    while sim.tick < budget:
        in_manual = sim.controller.mode is MissionModeKind.MANUAL
        cmd = pilot.command_at(sim.tick) if in_manual else ZERO_COMMAND
        if in_manual and cmd != last_recorded:
            # applied pilot commands are part of the record so any report can
            # be replayed from its own content
            sim.events.append(
                {
                    "tick": sim.tick,
                    "kind": "pilot",
                    "v_forward": cmd.v_forward,
                    "v_lateral": cmd.v_lateral,
                    "yaw_rate": cmd.yaw_rate,
                }
            )
            last_recorded = cmd
        sim.step_once(cmd)
        if (
            exact_ticks is None
            and sim.controller.mode is MissionModeKind.MANUAL
            and sim.episodes > 0
            and sim.tick > pilot.last_tick
        ):
            termination = "complete"
            break

    return _build_report(scenario, sim, seed, termination)


def _build_report(scenario: Path, sim: Simulation, seed: int, termination: str) -> RunReport:
    sha = hashlib.sha256(scenario.read_bytes()).hexdigest()
    captures = [
        {
            "tick": ev["tick"],
            "reason": ev["reason"],
            "azimuth_deg": ev["azimuth_deg"],
            "detections": ev.get("detections", 0),
        }
        for ev in sim.events
        if ev["kind"] == "capture"
    ]
    assessments = [_assessment_dict(a, sim) for a in sim.assessments]
    report = RunReport(
        scenario_name=sim.world.name,
        scenario_path=str(scenario),
        scenario_sha256=sha,
        seed=seed,
        dt=sim.params.kinematics.dt,
        params=sim.params.to_dict(),
        trajectory=sim.trajectory,
        events=sim.events,
        assessments=assessments,
        captures=captures,
        termination=termination,
        ticks=sim.tick,
    )
    return RunReport.from_dict(_round_floats(report.to_dict()))


def _assessment_dict(a: ColumnAssessment, sim: Simulation) -> dict:
    scan = next(s for s in sim.controller.completed_scans if s.column_id == a.column_id)
    return {
        "column_id": a.column_id,
        "fused_state": a.fused_state.label,
        "fused_level": int(a.fused_state),
        "coverage_fraction": a.coverage_fraction,
        "covered_azimuths": sim._coverage_pieces.get(a.column_id, []),
        "evidence": [list(e) for e in a.evidence],
        "orbit_center": list(scan.orbit_center),
        "orbit_radius": scan.orbit_radius,
        "start_azimuth_deg": scan.start_azimuth_deg,
        "end_azimuths_deg": list(scan.end_azimuths),
        "swept_max_deg": scan.max_swept,
        "swept_min_deg": scan.min_swept,
        "reports": [
            {
                "tick": r.tick,
                "pose": {
                    "x": r.pose.x,
                    "y": r.pose.y,
                    "heading_deg": math.degrees(r.pose.heading),
                },
                "azimuth_deg": r.azimuth_deg,
                "reason": r.reason,
                "image_level": r.image_level.label,
                "detections": [
                    {
                        "kind": d.kind.value,
                        "bbox": [d.u_min, d.v_min, d.u_max, d.v_max],
                        "confidence": d.confidence,
                        "source_patch": d.source_patch,
                    }
                    for d in r.detections
                ],
            }
            for r in a.reports
        ],
    }


# ---------------------------------------------------------------------------
# canonical serialization
# ---------------------------------------------------------------------------

def _round_floats(obj: Any) -> Any:
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            raise ValueError("non-finite float in report")
        return round(obj, 6)
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _canonical(obj: Any, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            raise ValueError("non-finite float in report")
        out.append(f"{obj:.6f}")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _canonical(v, out)
        out.append("]")
    elif isinstance(obj, dict):
        out.append("{")
        for i, k in enumerate(sorted(obj)):
            if not isinstance(k, str):
                raise ValueError("report keys must be strings")
            if i:
                out.append(",")
            out.append(json.dumps(k, ensure_ascii=True))
            out.append(":")
            _canonical(obj[k], out)
        out.append("}")
    else:
        raise ValueError(f"unserializable value of type {type(obj).__name__}")


def canonical_json(obj: Any) -> str:
    out: list[str] = []
    _canonical(obj, out)
    return "".join(out)


def write_report(report: RunReport, path: str | Path) -> None:
    """Canonical write: sorted keys, floats at 6 decimals, newline-terminated.
    Refuses non-finite values."""
    text = canonical_json(report.to_dict()) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def read_report(path: str | Path) -> RunReport:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    expected = {
        "scenario_name",
        "scenario_path",
        "scenario_sha256",
        "seed",
        "dt",
        "params",
        "trajectory",
        "events",
        "assessments",
        "captures",
        "termination",
        "ticks",
    }
    if set(data) != expected:
        missing = expected - set(data)
        extra = set(data) - expected
        raise ValueError(f"report schema mismatch: missing={sorted(missing)} extra={sorted(extra)}")
    return RunReport.from_dict(data)


def replay_verify(report_path: str | Path) -> tuple[bool, str]:
    """Re-run a report's scenario with its recorded inputs and compare."""
    original = read_report(report_path)
    scenario = Path(original.scenario_path)
    if not scenario.exists():
        return False, f"scenario file {scenario} not found"
    sha = hashlib.sha256(scenario.read_bytes()).hexdigest()
    if sha != original.scenario_sha256:
        return False, "scenario file content changed since the recorded run"
    pilot_entries = [
        {
            "tick": ev["tick"],
            "v_forward": ev.get("v_forward", 0.0),
            "v_lateral": ev.get("v_lateral", 0.0),
            "yaw_rate": ev.get("yaw_rate", 0.0),
        }
        for ev in original.events
        if ev["kind"] == "pilot"
    ]
    rerun = run_headless(
        scenario,
        pilot_script=PilotScript(pilot_entries),
        seed=original.seed,
        overrides=_params_as_overrides(original.params),
        dt=original.dt,
        exact_ticks=original.ticks,
    )
    if rerun.captures != original.captures:
        return False, "capture log mismatch"
    if canonical_json(rerun.trajectory) != canonical_json(original.trajectory):
        return False, "trajectory mismatch"
    return True, "replay reproduces the recorded run"


def _params_as_overrides(params_dict: dict) -> dict:
    return {group: dict(values) for group, values in params_dict.items()}
