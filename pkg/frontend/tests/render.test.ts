import { describe, expect, it } from "vitest";

import { buildScene } from "../src/render.js";
import { applyMessage, initialState } from "../src/state.js";
import { ScenarioEvent, TickMsg } from "../src/protocol.js";

const scenarioEvent: ScenarioEvent = {
  kind: "scenario",
  name: "center",
  bounds: [10, 10],
  walls: [
    [0, 0, 10, 0],
    [10, 0, 10, 10],
    [10, 10, 0, 10],
    [0, 10, 0, 0],
  ],
  obstacles: [[7, 2, 0.4]],
  columns: [{ id: "C1", cx: 5, cy: 5, radius: 0.3, height: 3 }],
  obstacle_stop_distance: 0.5,
};

function tickMsg(partial: Partial<TickMsg> = {}): TickMsg {
  return {
    type: "tick",
    t: 1,
    pose: { x: 2, y: 5, heading_deg: 0 },
    mode: "manual",
    lidar: 2.7,
    ultrasound: { left: 3.0, right: 0.4, rear: null },
    events: [],
    ...partial,
  };
}

function texts(scene: ReturnType<typeof buildScene>): string[] {
  return scene.shapes.flatMap((s) => (s.kind === "text" ? [s.text] : []));
}

describe("buildScene", () => {
  it("shows a waiting message before any telemetry", () => {
    const scene = buildScene(initialState(), 800, 600);
    expect(texts(scene).some((t) => t.includes("waiting"))).toBe(true);
  });

  it("draws walls, obstacles, columns, vehicle and lidar ray", () => {
    let s = applyMessage(initialState(), tickMsg({ events: [scenarioEvent] }));
    const scene = buildScene(s, 800, 600);
    const lines = scene.shapes.filter((sh) => sh.kind === "line");
    expect(lines.length).toBeGreaterThanOrEqual(5); // 4 walls + lidar ray
    expect(scene.shapes.filter((sh) => sh.kind === "circle").length).toBeGreaterThanOrEqual(2);
    expect(scene.shapes.some((sh) => sh.kind === "poly" && sh.fill)).toBe(true);
  });

  it("colors an ultrasound cone as alert below the stop distance", () => {
    const s = applyMessage(initialState(), tickMsg({ events: [scenarioEvent] }));
    const scene = buildScene(s, 800, 600);
    const wedges = scene.shapes.filter((sh) => sh.kind === "wedge");
    expect(wedges.length).toBe(3);
    expect(wedges.some((w) => w.kind === "wedge" && w.color.startsWith("#ff3333"))).toBe(true);
  });

  it("draws the orbit circle and swept arc while scanning", () => {
    let s = applyMessage(initialState(), tickMsg({ events: [scenarioEvent] }));
    s = applyMessage(
      s,
      tickMsg({
        mode: "scanning_ccw",
        events: [
          {
            kind: "scan_begin",
            tick: 2,
            column: "C1",
            orbit_center: [5, 5],
            orbit_radius: 3,
            start_azimuth_deg: 180,
          },
        ],
      }),
    );
    const scene = buildScene(s, 800, 600);
    expect(scene.shapes.some((sh) => sh.kind === "arc")).toBe(true);
    expect(texts(scene).some((t) => t.includes("scanning_ccw"))).toBe(true);
    expect(texts(scene).some((t) => t.includes("LOCKED OUT") || t.includes("viewer"))).toBe(true);
  });

  it("renders capture markers and the assessment panel", () => {
    let s = applyMessage(initialState(), tickMsg({ events: [scenarioEvent] }));
    s = applyMessage(
      s,
      tickMsg({ events: [{ kind: "capture", tick: 3, reason: "arc_end", azimuth_deg: 90 }] }),
    );
    s = applyMessage(s, {
      type: "assessment",
      column_id: "C1",
      fused_state: "DS1_Light",
      fused_level: 1,
      coverage_fraction: 0.8056,
    });
    const scene = buildScene(s, 800, 600);
    expect(scene.shapes.some((sh) => sh.kind === "marker")).toBe(true);
    expect(texts(scene).some((t) => t.includes("DS1_Light") && t.includes("80.6%"))).toBe(true);
  });

  it("shows the pilot lockout badge outside manual mode", () => {
    let s = applyMessage(initialState(), tickMsg({ events: [scenarioEvent, { kind: "pilot_granted" }] }));
    s = applyMessage(s, tickMsg({ mode: "approach" }));
    const scene = buildScene(s, 800, 600);
    expect(texts(scene).some((t) => t.includes("LOCKED OUT"))).toBe(true);
  });
});
