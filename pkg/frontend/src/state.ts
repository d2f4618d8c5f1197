/** Console state: latest telemetry snapshot, event feed ring, connection
 * health.  Pure reducers; the render loop reads the newest snapshot and
 * drops anything older (latest-snapshot rule). */

import type {
  EventMessage, ErrorMessage, HelloMessage, TelemetryMessage, WireMessage,
} from "./protocol.js";

export const EVENT_RING_SIZE = 100;
export const STALE_AFTER_MS = 1000;

export interface FeedEntry {
  time: number;
  kind: string;
  text: string;
  alert: boolean;
}

export interface ConsoleState {
  connection: "disconnected" | "connecting" | "connected";
  role: string | null;
  scenario: string | null;
  telemetryRateHz: number;
  latest: TelemetryMessage | null;
  lastTelemetryWallMs: number | null;
  feed: FeedEntry[];
  markerCount: number;
  mode: 1 | 2;
  sfAdhesion: number;
  droppedFrames: number;
}

export function initialState(): ConsoleState {
  return {
    connection: "disconnected",
    role: null,
    scenario: null,
    telemetryRateHz: 20,
    latest: null,
    lastTelemetryWallMs: null,
    feed: [],
    markerCount: 0,
    mode: 1,
    sfAdhesion: 5,
    droppedFrames: 0,
  };
}

const ALERT_KINDS = new Set(["fall_risk", "torque_saturation", "boundary"]);

function pushFeed(state: ConsoleState, entry: FeedEntry): void {
  state.feed.push(entry);
  if (state.feed.length > EVENT_RING_SIZE) {
    state.feed.splice(0, state.feed.length - EVENT_RING_SIZE);
  }
}

function eventText(ev: EventMessage): string {
  const bits = Object.entries(ev.payload ?? {})
    .map(([k, v]) => `${k}=${typeof v === "number" ? (v as number).toFixed(3) : String(v)}`)
    .join(" ");
  return bits ? `${ev.kind} ${bits}` : ev.kind;
}

export function reduce(state: ConsoleState, msg: WireMessage, nowMs: number): ConsoleState {
  switch (msg.type) {
    case "hello": {
      const hello = msg as HelloMessage;
      state.role = hello.granted_role ?? null;
      state.scenario = hello.scenario ?? null;
      if (hello.telemetry_rate_hz) state.telemetryRateHz = hello.telemetry_rate_hz;
      state.connection = "connected";
      return state;
    }
    case "telemetry": {
      const t = msg as TelemetryMessage;
      if (state.latest !== null && state.latest.step < t.step - 1) {
        state.droppedFrames += 1;  // latest-snapshot rule: newer wins, note the gap
      }
      state.latest = t;
      state.lastTelemetryWallMs = nowMs;
      state.markerCount = t.marker_count;
      for (const ev of t.events) {
        pushFeed(state, {
          time: ev.time, kind: ev.kind, text: eventText(ev),
          alert: ALERT_KINDS.has(ev.kind),
        });
      }
      return state;
    }
    case "event": {
      const ev = msg as EventMessage;
      pushFeed(state, {
        time: ev.time, kind: ev.kind, text: eventText(ev),
        alert: ALERT_KINDS.has(ev.kind),
      });
      return state;
    }
    case "error": {
      const err = msg as ErrorMessage;
      pushFeed(state, {
        time: state.latest?.time ?? 0, kind: "error",
        text: `${err.code}: ${err.message}`, alert: true,
      });
      return state;
    }
    default:
      return state;
  }
}

export function telemetryAgeMs(state: ConsoleState, nowMs: number): number | null {
  return state.lastTelemetryWallMs === null ? null : nowMs - state.lastTelemetryWallMs;
}

export function isStale(state: ConsoleState, nowMs: number): boolean {
  const age = telemetryAgeMs(state, nowMs);
  return age !== null && age > STALE_AFTER_MS;
}
