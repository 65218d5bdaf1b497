// Browser entry point: wires the canvas, keyboard, and session buttons to
// the cockpit client.

import { CockpitClient } from "./client.js";
import { buildScene, drawScene } from "./render.js";

const params = new URLSearchParams(window.location.search);
const url = params.get("ws") ?? "ws://127.0.0.1:8765";

const canvas = document.getElementById("map") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;

const client = new CockpitClient(url, (u) => new WebSocket(u));
client.connect();

window.addEventListener("keydown", (ev) => {
  if (["KeyW", "KeyA", "KeyS", "KeyD", "KeyQ", "KeyE"].includes(ev.code)) {
    client.keyDown(ev.code);
    ev.preventDefault();
  }
});
window.addEventListener("keyup", (ev) => client.keyUp(ev.code));
window.addEventListener("blur", () => client.setKeys([]));

for (const [id, fn] of [
  ["start", () => client.startSession()],
  ["reset", () => client.resetSession()],
  ["end", () => client.endSession()],
] as const) {
  document.getElementById(id)?.addEventListener("click", fn);
}

function frame() {
  const dpr = window.devicePixelRatio || 1;
  const w = canvas.clientWidth;
  const h = canvas.clientHeight;
  if (canvas.width !== w * dpr || canvas.height !== h * dpr) {
    canvas.width = w * dpr;
    canvas.height = h * dpr;
    ctx.setTransform(dpr, 0, 0, dpr, 0, 0);
  }
  drawScene(ctx, buildScene(client.state, w, h));
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
