// End-to-end against the real telemetry service: spawn `colscan serve`, fly
// the manual phase by key input, and watch the autonomous episode complete.
// Skipped when the Python package is not importable in this environment.

import { ChildProcess, spawn, spawnSync } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { WebSocket } from "ws";

import { CockpitClient, SocketLike } from "../src/client.js";

const havePython =
  spawnSync("python3", ["-c", "import colscan"], { timeout: 30000 }).status === 0;

function wsFactory(url: string): SocketLike {
  return new WebSocket(url) as unknown as SocketLike;
}

function sleep(ms: number): Promise<void> {
  return new Promise((r) => setTimeout(r, ms));
}

async function waitFor(cond: () => boolean, ms = 30000, step = 20): Promise<void> {
  const deadline = Date.now() + ms;
  while (Date.now() < deadline) {
    if (cond()) return;
    await sleep(step);
  }
  throw new Error("condition not met within " + ms + "ms");
}

describe.skipIf(!havePython)("cockpit against the real serve endpoint", () => {
  let proc: ChildProcess;
  let url: string;
  let client: CockpitClient;

  beforeAll(async () => {
    const dir = mkdtempSync(join(tmpdir(), "cockpit-e2e-"));
    const scenario = join(dir, "scenario.json");
    // column initially out of view: a genuine manual phase precedes detection
    writeFileSync(
      scenario,
      JSON.stringify({
        name: "e2e",
        bounds: [10, 10],
        columns: [
          {
            id: "C1",
            cx: 5,
            cy: 5,
            radius: 0.3,
            height: 3,
            damage: [
              {
                id: "d1",
                kind: "rebar_exposure",
                az_start_deg: 150,
                az_end_deg: 210,
                z_low: 0.8,
                z_high: 1.6,
              },
            ],
          },
        ],
        mav: { x: 0.5, y: 5.0, heading_deg: 90.0 },
      }),
    );
    proc = spawn("python3", [
      "-m",
      "colscan.cli",
      "serve",
      "--scenario",
      scenario,
      "--port",
      "0",
      "--rate",
      "20",
    ]);
    url = await new Promise<string>((resolve, reject) => {
      const timer = setTimeout(() => reject(new Error("serve did not start")), 30000);
      proc.stdout!.on("data", (chunk: Buffer) => {
        const m = /ws:\/\/[0-9.]+:\d+/.exec(chunk.toString());
        if (m) {
          clearTimeout(timer);
          resolve(m[0]);
        }
      });
      proc.stderr!.on("data", () => {});
    });
  }, 40000);

  afterAll(() => {
    client?.dispose();
    proc?.kill();
  });

  it("flies the whole mission: manual motion, lockout, assessment", async () => {
    client = new CockpitClient(url, wsFactory, { sendHz: 50 });
    client.connect();
    await waitFor(() => client.state.connection === "connected");
    await waitFor(() => client.state.scenario !== null);
    expect(client.state.scenario!.columns[0].id).toBe("C1");

    client.startSession();
    await waitFor(() => client.state.pilot);
    await waitFor(() => (client.state.tick?.t ?? 0) >= 1);

    // held forward key: the vehicle moves on the following ticks
    const y0 = client.state.tick!.pose.y;
    client.keyDown("KeyW");
    await waitFor(() => client.state.tick!.pose.y > y0 + 0.02);
    client.keyUp("KeyW");

    // yaw right until the column enters the frame and autopilot takes over;
    // capture the exact state at which the mode first renders as approach
    const switchState = new Promise<typeof client.state>((resolve) => {
      client.onChange = (s) => {
        if (s.tick?.mode === "approach") {
          client.onChange = null;
          resolve(s);
        }
      };
    });
    client.keyDown("KeyE");
    const atSwitch = await switchState;
    client.keyUp("KeyE");
    // the switch rendered on the very tick that carried the event
    expect(atSwitch.lastModeSwitchTick).toBe(atSwitch.tick!.t);
    expect(atSwitch.lockout).toBe(true);
    await waitFor(() => client.state.lockout);
    expect(client.pilotAllowed()).toBe(false);

    await waitFor(() => (client.state.tick?.mode ?? "").startsWith("scanning"), 60000);
    expect(client.state.orbit).not.toBeNull();

    await waitFor(() => client.state.assessments.length > 0, 120000);
    const a = client.state.assessments[0];
    expect(a.column_id).toBe("C1");
    expect(a.fused_state).toBe("DS2_Severe");

    await waitFor(() => client.state.tick?.mode === "manual", 30000);
    expect(client.state.captures.length).toBeGreaterThanOrEqual(13);
    client.endSession();
    await sleep(200);
  }, 180000);
});
