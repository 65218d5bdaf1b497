"""Live telemetry and piloting service over a WebSocket stream.

One simulation loop owns all mutable state; clients interact only through
message queues. Any number of viewers may connect; exactly one client holds
the pilot role. On session end the recorded run yields the same report a
headless replay of the captured pilot inputs would produce.

Protocol (one JSON message per frame):
  server -> client:
    {"type": "tick", "t", "pose": {x, y, heading_deg}, "mode",
     "lidar": num|null, "ultrasound": {left, right, rear}, "events": [...]}
    {"type": "assessment", ...column assessment}
    {"type": "error", "msg"}
  client -> server:
    {"type": "pilot", "v_forward", "v_lateral", "yaw_rate"}
    {"type": "session", "cmd": "start"|"reset"|"end"}
    {"type": "claim_pilot"}
"""

from __future__ import annotations

import json
import math
import threading
import time
from pathlib import Path
from typing import Optional

from websockets.sync.server import serve as ws_serve

from .config import SimParams, apply_overrides
from .kinematics import VelocityCommand, ZERO_COMMAND
from .mission import MissionModeKind
from .runner import (
    RunReport,
    Simulation,
    _assessment_dict,
    _build_report,
    quantize_command,
)
from .world import load_scenario


class TelemetryServer:
    def __init__(
        self,
        scenario: str | Path,
        port: int = 8765,
        rate: float = 1.0,
        seed: int = 0,
        overrides: Optional[dict] = None,
        host: str = "127.0.0.1",
    ):
        self.scenario = Path(scenario)
        self.rate = rate
        self.seed = seed
        self.overrides = overrides or {}
        self.host = host
        self.port = port

        self._lock = threading.Lock()
        self._clients: set = set()
        self._pilot_client = None
        self._pending = ZERO_COMMAND
        self._last_recorded = ZERO_COMMAND
        self._running = False
        self._ended = threading.Event()
        self._protocol_events: list[dict] = []
        self.report: Optional[RunReport] = None

        self._build_sim()
        self._server = None
        self._threads: list[threading.Thread] = []

    def _build_sim(self) -> None:
        world, start, scenario_params = load_scenario(self.scenario)
        params = apply_overrides(SimParams(), scenario_params)
        if self.overrides:
            params = apply_overrides(params, self.overrides)
        if self.seed != 0:
            from dataclasses import replace

            params.detector = replace(params.detector, seed=self.seed)
        self.world = world
        self.sim = Simulation(world, start, params, seed=self.seed)

    # -- lifecycle ----------------------------------------------------------

    def start(self) -> None:
        self._server = ws_serve(self._handle_client, self.host, self.port)
        self.port = self._server.socket.getsockname()[1]
        t = threading.Thread(target=self._server.serve_forever, daemon=True)
        t.start()
        self._threads.append(t)
        loop = threading.Thread(target=self._loop, daemon=True)
        loop.start()
        self._threads.append(loop)

    def wait(self, timeout: Optional[float] = None) -> Optional[RunReport]:
        self._ended.wait(timeout)
        return self.report

    def stop(self) -> None:
        self._finalize()
        if self._server is not None:
            self._server.shutdown()

    def _finalize(self) -> None:
        with self._lock:
            if self.report is None:
                self.report = _build_report(self.scenario, self.sim, self.seed, "session_end")
        self._ended.set()

    # -- simulation loop ----------------------------------------------------

    def _loop(self) -> None:
        dt = self.sim.params.kinematics.dt
        while not self._ended.is_set():
            if not self._running:
                time.sleep(0.01)
                continue
            with self._lock:
                in_manual = self.sim.controller.mode is MissionModeKind.MANUAL
                cmd = self._pending if in_manual else ZERO_COMMAND
                if in_manual and cmd != self._last_recorded:
                    self.sim.events.append(
                        {
                            "tick": self.sim.tick,
                            "kind": "pilot",
                            "v_forward": cmd.v_forward,
                            "v_lateral": cmd.v_lateral,
                            "yaw_rate": cmd.yaw_rate,
                        }
                    )
                    self._last_recorded = cmd
                frame, events = self.sim.step_once(cmd)
                extra = self._protocol_events
                self._protocol_events = []
                msg = self._tick_message(frame, events + extra)
                assessments = [e for e in events if e["kind"] == "assessment"]
            self._broadcast(msg)
            for _ in assessments:
                with self._lock:
                    payload = _assessment_dict(self.sim.assessments[-1], self.sim)
                self._broadcast({"type": "assessment", **payload})
            if self.rate > 0:
                time.sleep(dt / self.rate)

    def _tick_message(self, frame, events: list[dict]) -> dict:
        row = self.sim.trajectory[-1]
        return {
            "type": "tick",
            "t": row["tick"],
            "pose": {"x": row["x"], "y": row["y"], "heading_deg": row["heading_deg"]},
            "mode": row["mode"],
            "lidar": frame.lidar,
            "ultrasound": frame.ultrasound,
            "events": events,
        }

    def _snapshot_message(self) -> dict:
        """A tick-shaped snapshot carrying the scenario geometry, sent on
        connect so viewers can draw the map before the session starts."""
        with self._lock:
            pose = self.sim.pose
            scenario_event = {
                "kind": "scenario",
                "name": self.world.name,
                "bounds": list(self.world.bounds),
                "walls": [list(wall) for wall in self.world.walls],
                "obstacles": [list(o) for o in self.world.obstacles],
                "columns": [
                    {"id": c.id, "cx": c.cx, "cy": c.cy, "radius": c.radius, "height": c.height}
                    for c in self.world.columns
                ],
                "obstacle_stop_distance": self.sim.params.mission.obstacle_stop_distance,
            }
            return {
                "type": "tick",
                "t": self.sim.tick,
                "pose": {
                    "x": pose.x,
                    "y": pose.y,
                    "heading_deg": math.degrees(pose.heading),
                },
                "mode": self.sim.controller.mode_label(),
                "lidar": None,
                "ultrasound": {"left": None, "right": None, "rear": None},
                "events": [scenario_event],
            }

    def _broadcast(self, message: dict) -> None:
        text = json.dumps(message)
        with self._lock:
            clients = list(self._clients)
        for ws in clients:
            try:
                ws.send(text)
            except Exception:
                self._drop_client(ws)

    def _drop_client(self, ws) -> None:
        with self._lock:
            self._clients.discard(ws)
            if self._pilot_client is ws:
                self._pilot_client = None

    # -- client handling ----------------------------------------------------

    def _handle_client(self, ws) -> None:
        with self._lock:
            self._clients.add(ws)
        try:
            ws.send(json.dumps(self._snapshot_message()))
            for raw in ws:
                reply = self._handle_message(ws, raw)
                if reply is not None:
                    ws.send(json.dumps(reply))
        except Exception:
            pass
        finally:
            self._drop_client(ws)

    def _handle_message(self, ws, raw) -> Optional[dict]:
        try:
            msg = json.loads(raw)
        except (json.JSONDecodeError, TypeError):
            return {"type": "error", "msg": "invalid JSON"}
        if not isinstance(msg, dict) or "type" not in msg:
            return {"type": "error", "msg": "message must be an object with a type"}
        kind = msg["type"]
        if kind == "claim_pilot":
            with self._lock:
                if self._pilot_client is None or self._pilot_client is ws:
                    self._pilot_client = ws
                    self._protocol_events.append({"kind": "pilot_granted"})
                    return None
            return {"type": "error", "msg": "pilot role taken"}
        if kind == "pilot":
            with self._lock:
                if self._pilot_client is not ws:
                    return {"type": "error", "msg": "pilot role not held"}
                if self.sim.controller.mode is not MissionModeKind.MANUAL:
                    return {"type": "error", "msg": "autopilot engaged"}
                try:
                    self._pending = quantize_command(
                        VelocityCommand(
                            v_forward=float(msg.get("v_forward", 0.0)),
                            v_lateral=float(msg.get("v_lateral", 0.0)),
                            yaw_rate=float(msg.get("yaw_rate", 0.0)),
                        )
                    )
                except (TypeError, ValueError):
                    return {"type": "error", "msg": "pilot fields must be numbers"}
            return None
        if kind == "session":
            cmd = msg.get("cmd")
            if cmd == "start":
                with self._lock:
                    self._running = True
                return None
            if cmd == "reset":
                with self._lock:
                    self._running = False
                    self._pending = ZERO_COMMAND
                    self._last_recorded = ZERO_COMMAND
                    self._build_sim()
                return None
            if cmd == "end":
                with self._lock:
                    self._running = False
                self._finalize()
                return None
            return {"type": "error", "msg": f"unknown session cmd {cmd!r}"}
        return {"type": "error", "msg": f"unknown message type {kind!r}"}


def serve(
    scenario: str | Path,
    port: int = 8765,
    rate: float = 1.0,
    seed: int = 0,
    overrides: Optional[dict] = None,
    host: str = "127.0.0.1",
) -> TelemetryServer:
    """Start the telemetry service; returns the running server handle."""
    server = TelemetryServer(
        scenario, port=port, rate=rate, seed=seed, overrides=overrides, host=host
    )
    server.start()
    return server
