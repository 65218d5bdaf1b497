// WebSocket cockpit client: subscribes to the tick stream, claims the pilot
// role, forwards key state as pilot commands at a fixed rate, and reconnects
// with backoff. The socket is injected so tests can run under node's `ws`.

import { commandFromKeys, isZero } from "./keys.js";
import { ClientMsg, parseServerMsg } from "./protocol.js";
import {
  applyMessage,
  CockpitState,
  connectionChanged,
  initialState,
} from "./state.js";

// structurally compatible with both the browser WebSocket and node's `ws`
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev: any) => void) | null;
  onmessage: ((ev: any) => void) | null;
  onclose: ((ev: any) => void) | null;
  onerror: ((ev: any) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export type ClientOptions = {
  sendHz?: number;
  reconnectBaseMs?: number;
  reconnectMaxMs?: number;
  claimPilot?: boolean;
};

export class CockpitClient {
  state: CockpitState = initialState();
  onChange: ((s: CockpitState) => void) | null = null;

  private socket: SocketLike | null = null;
  private keys: Set<string> = new Set();
  private sentZero = true;
  private sendTimer: ReturnType<typeof setInterval> | null = null;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  private reconnectDelay: number;
  private disposed = false;

  constructor(
    private url: string,
    private factory: SocketFactory,
    private opts: ClientOptions = {},
  ) {
    this.reconnectDelay = opts.reconnectBaseMs ?? 500;
  }

  connect(): void {
    if (this.disposed) return;
    this.update(connectionChanged(this.state, "connecting"));
    const sock = this.factory(this.url);
    this.socket = sock;
    sock.onopen = () => {
      this.reconnectDelay = this.opts.reconnectBaseMs ?? 500;
      this.update(connectionChanged(this.state, "connected"));
      if (this.opts.claimPilot !== false) {
        this.sendRaw({ type: "claim_pilot" });
      }
      this.startSendLoop();
    };
    sock.onmessage = (ev) => {
      const msg = parseServerMsg(String(ev.data));
      if (msg) this.update(applyMessage(this.state, msg));
    };
    sock.onclose = () => this.handleDrop();
    sock.onerror = () => {
      /* onclose follows */
    };
  }

  dispose(): void {
    this.disposed = true;
    this.stopSendLoop();
    if (this.reconnectTimer) clearTimeout(this.reconnectTimer);
    this.socket?.close();
    this.socket = null;
  }

  setKeys(keys: Iterable<string>): void {
    this.keys = new Set(keys);
  }

  keyDown(code: string): void {
    this.keys.add(code);
  }

  keyUp(code: string): void {
    this.keys.delete(code);
  }

  startSession(): void {
    this.sendRaw({ type: "session", cmd: "start" });
  }

  resetSession(): void {
    this.sendRaw({ type: "session", cmd: "reset" });
  }

  endSession(): void {
    this.sendRaw({ type: "session", cmd: "end" });
  }

  pilotAllowed(): boolean {
    return (
      this.state.connection === "connected" && this.state.pilot && !this.state.lockout
    );
  }

  private handleDrop(): void {
    this.stopSendLoop();
    this.socket = null;
    if (this.disposed) return;
    this.update(connectionChanged({ ...this.state, pilot: false }, "disconnected"));
    const delay = this.reconnectDelay;
    this.reconnectDelay = Math.min(delay * 2, this.opts.reconnectMaxMs ?? 8000);
    this.reconnectTimer = setTimeout(() => this.connect(), delay);
  }

  private startSendLoop(): void {
    const period = 1000 / (this.opts.sendHz ?? 20);
    this.sentZero = true;
    this.sendTimer = setInterval(() => this.pumpPilot(), period);
  }

  private stopSendLoop(): void {
    if (this.sendTimer) {
      clearInterval(this.sendTimer);
      this.sendTimer = null;
    }
  }

  private pumpPilot(): void {
    if (!this.pilotAllowed()) return; // lockout: commands are not sent at all
    const cmd = commandFromKeys(this.keys);
    if (isZero(cmd)) {
      if (!this.sentZero) {
        this.sendRaw(cmd);
        this.sentZero = true;
      }
      return;
    }
    this.sentZero = false;
    this.sendRaw(cmd);
  }

  private sendRaw(msg: ClientMsg): void {
    try {
      this.socket?.send(JSON.stringify(msg));
    } catch {
      /* dropped socket; reconnect path handles it */
    }
  }

  private update(next: CockpitState): void {
    this.state = next;
    this.onChange?.(next);
  }
}
