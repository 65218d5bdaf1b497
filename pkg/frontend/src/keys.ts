// Keyboard piloting: WASD strafes, Q/E yaws. Held keys map to a constant
// velocity command sent at a fixed rate; releasing everything produces one
// zero command.

import { PilotMsg } from "./protocol.js";

export const KEY_LEGEND =
  "W/S forward/back 0.5 m/s | A/D left/right 0.5 m/s | Q/E yaw 45 deg/s";

const FORWARD = 0.5;
const LATERAL = 0.5;
const YAW = (45 * Math.PI) / 180;

export function commandFromKeys(keys: ReadonlySet<string>): PilotMsg {
  let v_forward = 0;
  let v_lateral = 0;
  let yaw_rate = 0;
  if (keys.has("KeyW")) v_forward += FORWARD;
  if (keys.has("KeyS")) v_forward -= FORWARD;
  if (keys.has("KeyA")) v_lateral += LATERAL;
  if (keys.has("KeyD")) v_lateral -= LATERAL;
  if (keys.has("KeyQ")) yaw_rate += YAW;
  if (keys.has("KeyE")) yaw_rate -= YAW;
  return { type: "pilot", v_forward, v_lateral, yaw_rate };
}

export function isZero(cmd: PilotMsg): boolean {
  return cmd.v_forward === 0 && cmd.v_lateral === 0 && cmd.yaw_rate === 0;
}
