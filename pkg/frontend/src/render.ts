// Rendering splits into a pure scene builder (testable) and a thin canvas
// painter. World coordinates are meters, y up; canvas pixels are y down.

import { KEY_LEGEND } from "./keys.js";
import { CockpitState } from "./state.js";

export type Shape =
  | { kind: "line"; x1: number; y1: number; x2: number; y2: number; color: string; width: number }
  | { kind: "circle"; x: number; y: number; r: number; color: string; fill: boolean; width?: number }
  | { kind: "arc"; x: number; y: number; r: number; a0: number; a1: number; color: string; width: number }
  | { kind: "wedge"; x: number; y: number; r: number; a0: number; a1: number; color: string }
  | { kind: "poly"; points: [number, number][]; color: string; fill: boolean }
  | { kind: "marker"; x: number; y: number; color: string; label?: string }
  | { kind: "text"; x: number; y: number; text: string; color: string; size: number };

export type Scene = { width: number; height: number; shapes: Shape[] };

const MODE_COLORS: Record<string, string> = {
  manual: "#4da3ff",
  approach: "#ffb347",
  scan_init: "#ffd24d",
  complete: "#7bd88f",
};

function modeColor(mode: string): string {
  if (mode.startsWith("scanning")) return "#ff5d8f";
  return MODE_COLORS[mode] ?? "#cccccc";
}

export function buildScene(state: CockpitState, width: number, height: number): Scene {
  const shapes: Shape[] = [];
  const scn = state.scenario;
  const pad = 24;

  if (!scn) {
    shapes.push({
      kind: "text",
      x: width / 2,
      y: height / 2,
      text: state.banner ?? "waiting for telemetry...",
      color: "#999999",
      size: 16,
    });
    return { width, height, shapes };
  }

  const [bw, bh] = scn.bounds;
  const scale = Math.min((width - 2 * pad) / bw, (height - 2 * pad) / bh);
  const wx = (x: number) => pad + x * scale;
  const wy = (y: number) => height - pad - y * scale;

  // room + interior walls
  for (const [x1, y1, x2, y2] of scn.walls) {
    shapes.push({
      kind: "line",
      x1: wx(x1),
      y1: wy(y1),
      x2: wx(x2),
      y2: wy(y2),
      color: "#8d8d8d",
      width: 2,
    });
  }
  for (const [cx, cy, r] of scn.obstacles) {
    shapes.push({ kind: "circle", x: wx(cx), y: wy(cy), r: r * scale, color: "#6b5b4d", fill: true });
  }
  for (const col of scn.columns) {
    shapes.push({
      kind: "circle",
      x: wx(col.cx),
      y: wy(col.cy),
      r: col.radius * scale,
      color: "#b0b0b8",
      fill: true,
    });
    shapes.push({
      kind: "text",
      x: wx(col.cx),
      y: wy(col.cy + col.radius) - 6,
      text: col.id,
      color: "#b0b0b8",
      size: 11,
    });
  }

  // trail
  if (state.trail.length > 1) {
    shapes.push({
      kind: "poly",
      points: state.trail.map((p) => [wx(p.x), wy(p.y)] as [number, number]),
      color: "#3a6ea560",
      fill: false,
    });
  }

  // orbit circle and swept arc while scanning
  const tick = state.tick;
  if (state.orbit && tick) {
    const o = state.orbit;
    shapes.push({
      kind: "circle",
      x: wx(o.cx),
      y: wy(o.cy),
      r: o.radius * scale,
      color: "#ff5d8f55",
      fill: false,
      width: 1,
    });
    const azNow = Math.atan2(tick.pose.y - o.cy, tick.pose.x - o.cx);
    shapes.push({
      kind: "arc",
      x: wx(o.cx),
      y: wy(o.cy),
      r: o.radius * scale,
      a0: (-o.startAzimuthDeg * Math.PI) / 180,
      a1: -azNow,
      color: "#ff5d8f",
      width: 2,
    });
  }

  // capture markers at their logged poses
  for (const cap of state.captures) {
    shapes.push({
      kind: "marker",
      x: wx(cap.pose.x),
      y: wy(cap.pose.y),
      color: cap.reason === "arc_end" ? "#ff4444" : "#7bd88f",
      label: cap.reason === "arc_end" ? "end" : undefined,
    });
  }

  if (tick) {
    const { x, y, heading_deg } = tick.pose;
    const h = (heading_deg * Math.PI) / 180;
    // lidar ray along heading
    if (tick.lidar !== null) {
      shapes.push({
        kind: "line",
        x1: wx(x),
        y1: wy(y),
        x2: wx(x + tick.lidar * Math.cos(h)),
        y2: wy(y + tick.lidar * Math.sin(h)),
        color: "#e4e45c",
        width: 1,
      });
    }
    // ultrasound cones, alert-colored inside the stop distance
    const stop = scn.obstacle_stop_distance;
    const mounts: [keyof typeof tick.ultrasound, number][] = [
      ["left", Math.PI / 2],
      ["right", -Math.PI / 2],
      ["rear", Math.PI],
    ];
    for (const [name, offset] of mounts) {
      const reading = tick.ultrasound[name];
      const range = reading ?? 4.0;
      const color =
        reading === null ? "#44444488" : reading < stop ? "#ff3333aa" : "#58c4dd66";
      const center = h + offset;
      shapes.push({
        kind: "wedge",
        x: wx(x),
        y: wy(y),
        r: range * scale,
        a0: -(center + Math.PI / 12),
        a1: -(center - Math.PI / 12),
        color,
      });
    }
    // vehicle triangle
    const size = 0.28 * scale;
    const pts: [number, number][] = [
      [wx(x + (Math.cos(h) * size) / scale), wy(y + (Math.sin(h) * size) / scale)],
      [wx(x + (Math.cos(h + 2.5) * size * 0.7) / scale), wy(y + (Math.sin(h + 2.5) * size * 0.7) / scale)],
      [wx(x + (Math.cos(h - 2.5) * size * 0.7) / scale), wy(y + (Math.sin(h - 2.5) * size * 0.7) / scale)],
    ];
    shapes.push({ kind: "poly", points: pts, color: modeColor(tick.mode), fill: true });
  }

  // HUD
  const mode = tick?.mode ?? "-";
  shapes.push({ kind: "text", x: pad, y: 16, text: `mode: ${mode}`, color: modeColor(mode), size: 14 });
  const role = state.pilot ? (state.lockout ? "pilot (LOCKED OUT: autopilot)" : "pilot") : "viewer";
  shapes.push({ kind: "text", x: pad + 180, y: 16, text: role, color: state.lockout ? "#ff5d8f" : "#7bd88f", size: 14 });
  shapes.push({
    kind: "text",
    x: pad,
    y: height - 6,
    text: KEY_LEGEND,
    color: "#777777",
    size: 11,
  });
  if (tick) {
    const us = tick.ultrasound;
    const fmt = (v: number | null) => (v === null ? "-" : v.toFixed(2));
    shapes.push({
      kind: "text",
      x: width - pad - 250,
      y: 16,
      text: `t=${tick.t} lidar=${fmt(tick.lidar)} L=${fmt(us.left)} R=${fmt(us.right)} B=${fmt(us.rear)}`,
      color: "#aaaaaa",
      size: 12,
    });
  }
  let yRow = 36;
  for (const a of state.assessments) {
    shapes.push({
      kind: "text",
      x: width - pad - 250,
      y: yRow,
      text: `${a.column_id}: ${a.fused_state} (coverage ${(a.coverage_fraction * 100).toFixed(1)}%)`,
      color: a.fused_level >= 2 ? "#ff4444" : a.fused_level === 1 ? "#ffb347" : "#7bd88f",
      size: 13,
    });
    yRow += 18;
  }
  if (state.banner) {
    shapes.push({
      kind: "text",
      x: width / 2,
      y: 20,
      text: state.banner,
      color: "#ff4444",
      size: 14,
    });
  }
  return { width, height, shapes };
}

export function drawScene(ctx: CanvasRenderingContext2D, scene: Scene): void {
  ctx.clearRect(0, 0, scene.width, scene.height);
  ctx.fillStyle = "#141418";
  ctx.fillRect(0, 0, scene.width, scene.height);
  for (const s of scene.shapes) {
    switch (s.kind) {
      case "line":
        ctx.strokeStyle = s.color;
        ctx.lineWidth = s.width;
        ctx.beginPath();
        ctx.moveTo(s.x1, s.y1);
        ctx.lineTo(s.x2, s.y2);
        ctx.stroke();
        break;
      case "circle":
        ctx.beginPath();
        ctx.arc(s.x, s.y, s.r, 0, 2 * Math.PI);
        if (s.fill) {
          ctx.fillStyle = s.color;
          ctx.fill();
        } else {
          ctx.strokeStyle = s.color;
          ctx.lineWidth = s.width ?? 1;
          ctx.stroke();
        }
        break;
      case "arc":
        ctx.strokeStyle = s.color;
        ctx.lineWidth = s.width;
        ctx.beginPath();
        ctx.arc(s.x, s.y, s.r, s.a0, s.a1);
        ctx.stroke();
        break;
      case "wedge":
        ctx.fillStyle = s.color;
        ctx.beginPath();
        ctx.moveTo(s.x, s.y);
        ctx.arc(s.x, s.y, s.r, s.a0, s.a1);
        ctx.closePath();
        ctx.fill();
        break;
      case "poly":
        ctx.beginPath();
        ctx.moveTo(s.points[0][0], s.points[0][1]);
        for (const [px, py] of s.points.slice(1)) ctx.lineTo(px, py);
        if (s.fill) {
          ctx.closePath();
          ctx.fillStyle = s.color;
          ctx.fill();
        } else {
          ctx.strokeStyle = s.color;
          ctx.lineWidth = 1;
          ctx.stroke();
        }
        break;
      case "marker":
        ctx.strokeStyle = s.color;
        ctx.lineWidth = 2;
        ctx.beginPath();
        ctx.moveTo(s.x - 4, s.y - 4);
        ctx.lineTo(s.x + 4, s.y + 4);
        ctx.moveTo(s.x - 4, s.y + 4);
        ctx.lineTo(s.x + 4, s.y - 4);
        ctx.stroke();
        if (s.label) {
          ctx.fillStyle = s.color;
          ctx.font = "10px monospace";
          ctx.fillText(s.label, s.x + 6, s.y - 6);
        }
        break;
      case "text":
        ctx.fillStyle = s.color;
        ctx.font = `${s.size}px monospace`;
        ctx.fillText(s.text, s.x, s.y);
        break;
    }
  }
}
