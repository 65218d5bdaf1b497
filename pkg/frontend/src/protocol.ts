// Telemetry protocol: one JSON message per WebSocket frame. These types
// mirror the server contract exactly; nothing else is sent or expected.

export type Pose = { x: number; y: number; heading_deg: number };

export type UltrasoundReads = {
  left: number | null;
  right: number | null;
  rear: number | null;
};

export type ScenarioEvent = {
  kind: "scenario";
  name: string;
  bounds: [number, number];
  walls: [number, number, number, number][];
  obstacles: [number, number, number][];
  columns: { id: string; cx: number; cy: number; radius: number; height: number }[];
  obstacle_stop_distance: number;
};

export type TickEvent =
  | ScenarioEvent
  | { kind: "mode_switch"; tick: number; from: string; to: string; [k: string]: unknown }
  | { kind: "capture"; tick: number; reason: string; azimuth_deg: number; [k: string]: unknown }
  | {
      kind: "scan_begin";
      tick: number;
      column: string;
      orbit_center: [number, number];
      orbit_radius: number;
      start_azimuth_deg: number;
    }
  | { kind: "scan_complete"; tick: number; column: string }
  | { kind: "pilot_granted" }
  | { kind: string; [k: string]: unknown };

export type TickMsg = {
  type: "tick";
  t: number;
  pose: Pose;
  mode: string;
  lidar: number | null;
  ultrasound: UltrasoundReads;
  events: TickEvent[];
};

export type AssessmentMsg = {
  type: "assessment";
  column_id: string;
  fused_state: string;
  fused_level: number;
  coverage_fraction: number;
  [k: string]: unknown;
};

export type ErrorMsg = { type: "error"; msg: string };

export type ServerMsg = TickMsg | AssessmentMsg | ErrorMsg;

export type PilotMsg = {
  type: "pilot";
  v_forward: number;
  v_lateral: number;
  yaw_rate: number;
};
export type SessionMsg = { type: "session"; cmd: "start" | "reset" | "end" };
export type ClaimPilotMsg = { type: "claim_pilot" };
export type ClientMsg = PilotMsg | SessionMsg | ClaimPilotMsg;

export function parseServerMsg(raw: string): ServerMsg | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const type = (data as { type?: unknown }).type;
  if (type === "tick" || type === "assessment" || type === "error") {
    return data as ServerMsg;
  }
  return null;
}
