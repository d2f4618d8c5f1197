/** Pure view-model construction: console state in, draw ops and gauge values
 * out.  The painter rasterizes the ops; nothing here touches the DOM, which
 * keeps rendering testable and fast. */

import type { ConsoleState } from "./state.js";
import { isStale } from "./state.js";

export interface PatchInfo {
  id: string;
  kind: string;
  bounds: { u: [number, number]; v: [number, number] };
  radius: number | null;
}

export interface MapMarker {
  center: [number, number, number];
  radius: number;
  support: number;
}

export type DrawOp =
  | { op: "rect"; x: number; y: number; w: number; h: number; stroke: string; label?: string }
  | { op: "line"; x1: number; y1: number; x2: number; y2: number; color: string; width: number }
  | { op: "circle"; x: number; y: number; r: number; color: string; fill: boolean }
  | { op: "polyline"; points: Array<[number, number]>; color: string }
  | { op: "text"; x: number; y: number; text: string; color: string };

export interface Gauge {
  label: string;
  value: number;
  limit: number;
  alert: boolean;
}

export interface ViewModel {
  scene: DrawOp[];        // developed-plane view of the current patch
  world: DrawOp[];        // top-down world view: path + rust markers
  gauges: Gauge[];
  feed: Array<{ text: string; alert: boolean }>;
  banner: string | null;
  status: string;
}

const WHEELBASE = 0.11;  // display only; the server owns the real value

export function buildView(
  state: ConsoleState,
  patches: PatchInfo[],
  markers: MapMarker[],
  trace: Array<[number, number]>,
  nowMs: number,
): ViewModel {
  const scene: DrawOp[] = [];
  const world: DrawOp[] = [];
  const t = state.latest;

  if (t) {
    const patch = patches.find((p) => p.id === t.pose.patch);
    if (patch) {
      const scaleV = patch.kind === "plane" ? 1.0 : (patch.radius ?? 1.0);
      scene.push({
        op: "rect",
        x: patch.bounds.u[0], y: patch.bounds.v[0] * scaleV,
        w: patch.bounds.u[1] - patch.bounds.u[0],
        h: (patch.bounds.v[1] - patch.bounds.v[0]) * scaleV,
        stroke: "#8892a0", label: `${patch.id} (${patch.kind})`,
      });
      const scale = patch.kind === "plane" ? 1.0 : (patch.radius ?? 1.0);
      const cx = t.pose.u;
      const cy = t.pose.v * scale;
      const hx = Math.cos(t.pose.heading);
      const hy = Math.sin(t.pose.heading);
      const half = WHEELBASE / 2;
      const wheels: Array<[number, number, number]> = [
        [cx - half * hx, cy - half * hy, t.steering.back],
        [cx + half * hx, cy + half * hy, t.steering.front],
      ];
      scene.push({ op: "line", x1: wheels[0][0], y1: wheels[0][1],
                   x2: wheels[1][0], y2: wheels[1][1], color: "#d8dee9", width: 2 });
      for (const [wx, wy, steer] of wheels) {
        const a = t.pose.heading + steer;
        scene.push({ op: "circle", x: wx, y: wy, r: 0.012, color: "#d8dee9", fill: true });
        scene.push({ op: "line", x1: wx, y1: wy,
                     x2: wx + 0.04 * Math.cos(a), y2: wy + 0.04 * Math.sin(a),
                     color: "#7fc97f", width: 2 });
      }
      if (trace.length > 1) {
        scene.push({ op: "polyline", points: trace, color: "#ffffff" });
      }
    }
    // world panel: path trace unavailable client-side beyond telemetry, so
    // plot the current world position plus the inspection markers
    world.push({ op: "circle", x: t.pose.world[0], y: t.pose.world[1],
                 r: 0.01, color: "#d8dee9", fill: true });
  }
  for (const m of markers) {
    world.push({ op: "circle", x: m.center[0], y: m.center[1],
                 r: Math.max(m.radius, 0.01), color: "#28dc3c", fill: false });
  }

  const margin = t?.margin ?? 0;
  const gauges: Gauge[] = [
    { label: "tip-over margin", value: margin, limit: state.sfAdhesion,
      alert: t !== null && margin < state.sfAdhesion },
    { label: "drive torque", value: t?.moving_torque_fraction ?? 0, limit: 1.0,
      alert: (t?.moving_torque_fraction ?? 0) > 1.0 },
    { label: "steer torque", value: t?.steering_torque_fraction ?? 0, limit: 1.0,
      alert: (t?.steering_torque_fraction ?? 0) > 1.0 },
  ];

  let banner: string | null = null;
  if (state.connection !== "connected") {
    banner = "disconnected";
  } else if (isStale(state, nowMs)) {
    banner = "telemetry stale (> 1 s old)";
  }

  const age = state.lastTelemetryWallMs === null ? null : nowMs - state.lastTelemetryWallMs;
  const status = t
    ? `${state.scenario ?? "?"} | ${state.role ?? "?"} | mode ${state.mode} | ` +
      `t=${t.time.toFixed(2)}s step=${t.step}` +
      (t.paused ? " | PAUSED" : "") +
      (age !== null ? ` | telemetry ${age.toFixed(0)}ms ago` : "") +
      ` | markers ${state.markerCount}`
    : "waiting for telemetry";

  return {
    scene,
    world,
    gauges,
    feed: state.feed.slice(-12).reverse().map((e) => ({
      text: `[${e.time.toFixed(2)}] ${e.text}`, alert: e.alert,
    })),
    banner,
    status,
  };
}
