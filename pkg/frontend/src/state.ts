// Cockpit state is a pure fold over server messages: the UI never simulates
// anything locally, it only re-renders what the stream said.

import {
  AssessmentMsg,
  Pose,
  ScenarioEvent,
  ServerMsg,
  TickMsg,
} from "./protocol.js";

export type Connection = "connecting" | "connected" | "disconnected";

export type CaptureMarker = {
  tick: number;
  reason: string;
  azimuth_deg: number;
  pose: Pose;
};

export type OrbitInfo = {
  cx: number;
  cy: number;
  radius: number;
  startAzimuthDeg: number;
};

export type CockpitState = {
  connection: Connection;
  pilot: boolean;
  lockout: boolean; // autopilot owns the vehicle
  scenario: ScenarioEvent | null;
  tick: TickMsg | null;
  trail: Pose[];
  captures: CaptureMarker[];
  orbit: OrbitInfo | null;
  assessments: AssessmentMsg[];
  banner: string | null;
  lastModeSwitchTick: number | null;
};

export const TRAIL_LIMIT = 2000;

export function initialState(): CockpitState {
  return {
    connection: "connecting",
    pilot: false,
    lockout: false,
    scenario: null,
    tick: null,
    trail: [],
    captures: [],
    orbit: null,
    assessments: [],
    banner: null,
    lastModeSwitchTick: null,
  };
}

export function applyMessage(state: CockpitState, msg: ServerMsg): CockpitState {
  switch (msg.type) {
    case "tick":
      return applyTick(state, msg);
    case "assessment":
      return { ...state, assessments: [...state.assessments, msg] };
    case "error":
      if (msg.msg === "pilot role taken") {
        return { ...state, pilot: false, banner: "viewer mode (pilot role taken)" };
      }
      if (msg.msg === "autopilot engaged") {
        return state; // expected while locked out; the badge already shows it
      }
      return { ...state, banner: msg.msg };
    default:
      return state;
  }
}

function applyTick(state: CockpitState, msg: TickMsg): CockpitState {
  const next: CockpitState = {
    ...state,
    tick: msg,
    lockout: msg.mode !== "manual",
    trail: [...state.trail, msg.pose].slice(-TRAIL_LIMIT),
  };
  for (const ev of msg.events) {
    switch (ev.kind) {
      case "scenario":
        next.scenario = ev as ScenarioEvent;
        break;
      case "pilot_granted":
        next.pilot = true;
        next.banner = null;
        break;
      case "mode_switch":
        next.lastModeSwitchTick = msg.t;
        break;
      case "scan_begin": {
        const sb = ev as Extract<typeof ev, { kind: "scan_begin" }> & {
          orbit_center: [number, number];
          orbit_radius: number;
          start_azimuth_deg: number;
        };
        next.orbit = {
          cx: sb.orbit_center[0],
          cy: sb.orbit_center[1],
          radius: sb.orbit_radius,
          startAzimuthDeg: sb.start_azimuth_deg,
        };
        break;
      }
      case "scan_complete":
        next.orbit = null;
        break;
      case "capture":
        next.captures = [
          ...next.captures,
          {
            tick: (ev as { tick: number }).tick,
            reason: (ev as { reason: string }).reason,
            azimuth_deg: (ev as { azimuth_deg: number }).azimuth_deg,
            pose: msg.pose,
          },
        ];
        break;
    }
  }
  return next;
}

export function connectionChanged(state: CockpitState, connection: Connection): CockpitState {
  const banner =
    connection === "disconnected" ? "disconnected - reconnecting..." : state.banner;
  return { ...state, connection, banner: connection === "connected" ? null : banner };
}
