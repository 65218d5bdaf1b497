import { describe, expect, it } from "vitest";

import { ScenarioEvent, TickMsg } from "../src/protocol.js";
import { applyMessage, connectionChanged, initialState } from "../src/state.js";

const scenarioEvent: ScenarioEvent = {
  kind: "scenario",
  name: "center",
  bounds: [10, 10],
  walls: [[0, 0, 10, 0]],
  obstacles: [],
  columns: [{ id: "C1", cx: 5, cy: 5, radius: 0.3, height: 3 }],
  obstacle_stop_distance: 0.5,
};

function tick(t: number, extra: Partial<TickMsg> = {}): TickMsg {
  return {
    type: "tick",
    t,
    pose: { x: 1 + t * 0.01, y: 5, heading_deg: 0 },
    mode: "manual",
    lidar: 3.5,
    ultrasound: { left: null, right: 2.0, rear: null },
    events: [],
    ...extra,
  };
}

describe("cockpit state fold", () => {
  it("stores scenario geometry from the snapshot tick", () => {
    const s = applyMessage(initialState(), tick(0, { events: [scenarioEvent] }));
    expect(s.scenario?.columns[0].id).toBe("C1");
    expect(s.tick?.t).toBe(0);
  });

  it("appends poses to the trail", () => {
    let s = initialState();
    for (let i = 0; i < 5; i++) s = applyMessage(s, tick(i));
    expect(s.trail.length).toBe(5);
    expect(s.trail[4].x).toBeCloseTo(1.04, 10);
  });

  it("mode switch renders on the same tick that carries the event", () => {
    let s = applyMessage(initialState(), tick(0));
    expect(s.lockout).toBe(false);
    s = applyMessage(
      s,
      tick(1, {
        mode: "approach",
        events: [{ kind: "mode_switch", tick: 1, from: "manual", to: "approach" }],
      }),
    );
    expect(s.tick?.mode).toBe("approach");
    expect(s.lockout).toBe(true);
    expect(s.lastModeSwitchTick).toBe(1);
  });

  it("pilot_granted sets the pilot flag", () => {
    const s = applyMessage(initialState(), tick(0, { events: [{ kind: "pilot_granted" }] }));
    expect(s.pilot).toBe(true);
  });

  it("pilot role taken downgrades to viewer", () => {
    let s = applyMessage(initialState(), tick(0, { events: [{ kind: "pilot_granted" }] }));
    s = applyMessage(s, { type: "error", msg: "pilot role taken" });
    expect(s.pilot).toBe(false);
    expect(s.banner).toContain("viewer");
  });

  it("orbit appears on scan_begin and clears on scan_complete", () => {
    let s = applyMessage(
      initialState(),
      tick(10, {
        mode: "scanning_ccw",
        events: [
          {
            kind: "scan_begin",
            tick: 10,
            column: "C1",
            orbit_center: [5, 5],
            orbit_radius: 3,
            start_azimuth_deg: 180,
          },
        ],
      }),
    );
    expect(s.orbit).toEqual({ cx: 5, cy: 5, radius: 3, startAzimuthDeg: 180 });
    s = applyMessage(
      s,
      tick(99, { mode: "complete", events: [{ kind: "scan_complete", tick: 99, column: "C1" }] }),
    );
    expect(s.orbit).toBeNull();
  });

  it("captures become markers carrying the tick pose", () => {
    const s = applyMessage(
      initialState(),
      tick(20, {
        events: [{ kind: "capture", tick: 20, reason: "interval", azimuth_deg: 210 }],
      }),
    );
    expect(s.captures.length).toBe(1);
    expect(s.captures[0].reason).toBe("interval");
    expect(s.captures[0].pose.x).toBeCloseTo(1.2, 10);
  });

  it("assessment messages accumulate", () => {
    const s = applyMessage(initialState(), {
      type: "assessment",
      column_id: "C1",
      fused_state: "DS2_Severe",
      fused_level: 2,
      coverage_fraction: 1.0,
    });
    expect(s.assessments[0].fused_state).toBe("DS2_Severe");
  });

  it("disconnect raises a banner; reconnect clears it", () => {
    let s = connectionChanged(initialState(), "disconnected");
    expect(s.banner).toContain("disconnected");
    s = connectionChanged(s, "connected");
    expect(s.banner).toBeNull();
  });

  it("autopilot-engaged errors are expected and do not raise the banner", () => {
    const s = applyMessage(initialState(), { type: "error", msg: "autopilot engaged" });
    expect(s.banner).toBeNull();
  });
});
