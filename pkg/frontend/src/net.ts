/** WebSocket client: hello handshake, decoupled receive (latest snapshot
 * wins), and command sending throttled to the telemetry rate. */

import { decode, encode } from "./protocol.js";
import type { CommandMessage, ControlMessage, HelloMessage, WireMessage } from "./protocol.js";

export interface ClientOptions {
  url: string;
  role: "driver" | "observer";
  clientName?: string;
  onMessage: (msg: WireMessage, nowMs: number) => void;
  onStatus: (status: "disconnected" | "connecting" | "connected") => void;
  now?: () => number;
}

export class ConsoleClient {
  private ws: WebSocket | null = null;
  private opts: ClientOptions;
  private lastCommandAt = -Infinity;
  private pendingCommand: CommandMessage | null = null;
  private minIntervalMs = 50;
  private seq = 0;
  connectedAsDriver = false;

  constructor(opts: ClientOptions) {
    this.opts = opts;
  }

  private now(): number {
    return this.opts.now ? this.opts.now() : Date.now();
  }

  connect(): void {
    this.opts.onStatus("connecting");
    this.ws = new WebSocket(this.opts.url);
    this.ws.onopen = () => {
      const hello: HelloMessage = {
        type: "hello", role: this.opts.role, client: this.opts.clientName ?? "console",
      };
      this.ws?.send(encode(hello));
    };
    this.ws.onmessage = (event) => {
      let msg: WireMessage;
      try {
        msg = decode(String(event.data));
      } catch {
        return;  // skip malformed frames; the stream itself stays usable
      }
      if (msg.type === "hello") {
        this.connectedAsDriver = msg.granted_role === "driver";
        if (msg.telemetry_rate_hz) this.minIntervalMs = 1000 / msg.telemetry_rate_hz;
        this.opts.onStatus("connected");
      }
      this.opts.onMessage(msg, this.now());
    };
    this.ws.onclose = () => {
      this.connectedAsDriver = false;
      this.opts.onStatus("disconnected");
    };
  }

  nextSeq(): number {
    this.seq += 1;
    return this.seq;
  }

  /** Queue a command; actual sends respect the telemetry-rate throttle and
   * are suppressed entirely unless connected as driver. */
  sendCommand(cmd: CommandMessage): void {
    if (!this.ws || this.ws.readyState !== WebSocket.OPEN || !this.connectedAsDriver) {
      return;
    }
    this.pendingCommand = cmd;
    this.flush();
  }

  flush(): void {
    if (!this.pendingCommand || !this.ws || this.ws.readyState !== WebSocket.OPEN) return;
    const now = this.now();
    if (now - this.lastCommandAt < this.minIntervalMs) return;
    this.ws.send(encode(this.pendingCommand));
    this.pendingCommand = null;
    this.lastCommandAt = now;
  }

  sendControl(action: ControlMessage["action"]): void {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(encode({ type: "control", action }));
    }
  }

  close(): void {
    this.ws?.close();
  }
}
