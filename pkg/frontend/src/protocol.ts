/** Wire protocol of the teleoperation service: JSON text frames with a
 * `type` discriminator.  Mirrors the server schema exactly; decode() rejects
 * frames the console could misrender. */

export const PROTOCOL_VERSION = 1;

export interface HelloMessage {
  type: "hello";
  version?: number;
  role?: "driver" | "observer";
  client?: string;
  granted_role?: string | null;
  session?: string | null;
  scenario?: string | null;
  telemetry_rate_hz?: number | null;
}

export interface CommandMessage {
  type: "command";
  seq: number;
  mode: 1 | 2;
  delta_front_deg: number;
  delta_back_deg: number;
  v_back: number;
  v_front: number | null;
}

export interface ControlMessage {
  type: "control";
  action: "pause" | "resume" | "reset";
}

export interface TelemetryPose {
  patch: string;
  u: number;
  v: number;
  heading: number;
  roll: number;
  world: [number, number, number];
}

export interface EventMessage {
  type: "event";
  time: number;
  kind: string;
  payload: Record<string, unknown>;
}

export interface TelemetryMessage {
  type: "telemetry";
  time: number;
  step: number;
  pose: TelemetryPose;
  steering: { front: number; back: number };
  margin: number;
  moving_torque_fraction: number;
  steering_torque_fraction: number;
  events: EventMessage[];
  marker_count: number;
  paused: boolean;
}

export interface AckMessage {
  type: "ack";
  seq?: number | null;
  action?: string | null;
}

export interface ErrorMessage {
  type: "error";
  code: string;
  message: string;
  field?: string | null;
  seq?: number | null;
}

export type WireMessage =
  | HelloMessage
  | CommandMessage
  | ControlMessage
  | TelemetryMessage
  | EventMessage
  | AckMessage
  | ErrorMessage;

export class ProtocolError extends Error {}

const MESSAGE_TYPES = new Set([
  "hello", "command", "control", "telemetry", "event", "ack", "error",
]);

function expectNumber(obj: Record<string, unknown>, key: string, kind: string): number {
  const v = obj[key];
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new ProtocolError(`${kind} frame has no numeric ${key}`);
  }
  return v;
}

export function decode(text: string): WireMessage {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    throw new ProtocolError("frame is not valid JSON");
  }
  if (typeof raw !== "object" || raw === null) {
    throw new ProtocolError("frame is not a JSON object");
  }
  const obj = raw as Record<string, unknown>;
  const type = obj.type;
  if (typeof type !== "string" || !MESSAGE_TYPES.has(type)) {
    throw new ProtocolError(`unknown frame type ${String(type)}`);
  }
  switch (type) {
    case "telemetry": {
      expectNumber(obj, "time", type);
      expectNumber(obj, "step", type);
      expectNumber(obj, "margin", type);
      const pose = obj.pose as Record<string, unknown> | undefined;
      if (!pose || typeof pose.patch !== "string") {
        throw new ProtocolError("telemetry frame has no pose.patch");
      }
      break;
    }
    case "command": {
      const seq = expectNumber(obj, "seq", type);
      if (seq < 0 || !Number.isInteger(seq)) {
        throw new ProtocolError("command seq must be a non-negative integer");
      }
      const f = expectNumber(obj, "delta_front_deg", type);
      const b = expectNumber(obj, "delta_back_deg", type);
      if (Math.abs(f) > 90 || Math.abs(b) > 90) {
        throw new ProtocolError("steering angles must stay within +-90 degrees");
      }
      break;
    }
    case "event": {
      expectNumber(obj, "time", type);
      if (typeof obj.kind !== "string") throw new ProtocolError("event frame has no kind");
      break;
    }
    case "error": {
      if (typeof obj.code !== "string") throw new ProtocolError("error frame has no code");
      break;
    }
  }
  return obj as unknown as WireMessage;
}

export function encode(message: WireMessage): string {
  return JSON.stringify(message);
}
