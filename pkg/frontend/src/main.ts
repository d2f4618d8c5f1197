/** Console entry point: wires inputs, the WebSocket client, the state
 * reducers and the painters together. */

import { applyJoystick, applyKey, initialInput, inputToCommand } from "./input.js";
import { ConsoleClient } from "./net.js";
import { initialState, reduce } from "./state.js";
import { buildView } from "./view.js";
import type { MapMarker, PatchInfo } from "./view.js";
import { paintFeed, paintGauges, paintScene } from "./painter.js";

const qs = new URLSearchParams(location.search);
const wsUrl = qs.get("ws") ?? `ws://${location.host}/ws`;
const apiBase = qs.get("api") ?? `http://${location.host}`;
const role = qs.get("role") === "observer" ? "observer" : "driver";

const state = initialState();
let input = initialInput();
let patches: PatchInfo[] = [];
let markers: MapMarker[] = [];
const trace: Array<[number, number]> = [];

const sceneCanvas = document.getElementById("scene") as HTMLCanvasElement;
const worldCanvas = document.getElementById("world") as HTMLCanvasElement;
const gaugesDiv = document.getElementById("gauges") as HTMLElement;
const feedDiv = document.getElementById("feed") as HTMLElement;
const statusDiv = document.getElementById("status") as HTMLElement;
const bannerDiv = document.getElementById("banner") as HTMLElement;

async function loadServerInfo(): Promise<void> {
  try {
    const scen = await (await fetch(`${apiBase}/api/scenario`)).json();
    patches = scen.patches ?? [];
    if (scen.params?.sf_adhesion) state.sfAdhesion = scen.params.sf_adhesion;
  } catch { /* scenario info is optional for rendering */ }
  try {
    const map = await (await fetch(`${apiBase}/api/map`)).json();
    markers = (map.markers ?? []).map((m: { center: [number, number, number]; radius: number; support: number }) => ({
      center: m.center, radius: m.radius, support: m.support,
    }));
  } catch { /* no overlay */ }
}

const client = new ConsoleClient({
  url: wsUrl,
  role,
  onMessage: (msg, now) => {
    reduce(state, msg, now);
    if (msg.type === "telemetry") {
      const scale = 1.0;  // trace in dev coords of the current patch
      trace.push([msg.pose.u, msg.pose.v * scale]);
      if (trace.length > 600) trace.splice(0, trace.length - 600);
    }
  },
  onStatus: (s) => { state.connection = s; },
});

document.addEventListener("keydown", (e) => {
  if (e.key === "1") state.mode = 1;
  else if (e.key === "2") state.mode = 2;
  else if (e.key === "p") client.sendControl(state.latest?.paused ? "resume" : "pause");
  else input = applyKey(input, e.key, true);
});
document.addEventListener("keyup", (e) => { input = applyKey(input, e.key, false); });

const pad = document.getElementById("joystick") as HTMLElement | null;
if (pad) {
  const engage = (ev: PointerEvent) => {
    const rect = pad.getBoundingClientRect();
    const x = ((ev.clientX - rect.left) / rect.width) * 2 - 1;
    const y = -(((ev.clientY - rect.top) / rect.height) * 2 - 1);
    input = applyJoystick(input, x, y);
  };
  pad.addEventListener("pointerdown", engage);
  pad.addEventListener("pointermove", (ev) => { if (ev.buttons) engage(ev); });
  const release = () => { input = applyJoystick(input, 0, 0); };
  pad.addEventListener("pointerup", release);
  pad.addEventListener("pointerleave", release);
}

function commandTick(): void {
  if (client.connectedAsDriver) {
    client.sendCommand(inputToCommand(input, state.mode, client.nextSeq()));
  }
  client.flush();
}

function renderTick(): void {
  const vm = buildView(state, patches, markers, trace, Date.now());
  paintScene(sceneCanvas, vm.scene);
  paintScene(worldCanvas, vm.world);
  paintGauges(gaugesDiv, vm);
  paintFeed(feedDiv, vm);
  statusDiv.textContent = vm.status;
  bannerDiv.textContent = vm.banner ?? "";
  bannerDiv.style.display = vm.banner ? "block" : "none";
  requestAnimationFrame(renderTick);
}

loadServerInfo().then(() => {
  client.connect();
  setInterval(commandTick, 50);
  requestAnimationFrame(renderTick);
});
