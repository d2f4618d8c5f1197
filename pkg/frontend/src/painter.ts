/** Canvas rasterization of view-model draw ops. */

import type { DrawOp, ViewModel } from "./view.js";

export function paintScene(canvas: HTMLCanvasElement, ops: DrawOp[], pad = 20): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.fillStyle = "#11151c";
  ctx.fillRect(0, 0, canvas.width, canvas.height);

  let minX = Infinity, minY = Infinity, maxX = -Infinity, maxY = -Infinity;
  const touch = (x: number, y: number) => {
    minX = Math.min(minX, x); maxX = Math.max(maxX, x);
    minY = Math.min(minY, y); maxY = Math.max(maxY, y);
  };
  for (const op of ops) {
    if (op.op === "rect") { touch(op.x, op.y); touch(op.x + op.w, op.y + op.h); }
    else if (op.op === "line") { touch(op.x1, op.y1); touch(op.x2, op.y2); }
    else if (op.op === "circle") { touch(op.x - op.r, op.y - op.r); touch(op.x + op.r, op.y + op.r); }
    else if (op.op === "polyline") op.points.forEach(([x, y]) => touch(x, y));
  }
  if (!Number.isFinite(minX)) return;
  const sx = (canvas.width - 2 * pad) / Math.max(maxX - minX, 1e-6);
  const sy = (canvas.height - 2 * pad) / Math.max(maxY - minY, 1e-6);
  const s = Math.min(sx, sy);
  const X = (x: number) => pad + (x - minX) * s;
  const Y = (y: number) => canvas.height - pad - (y - minY) * s;  // y up

  for (const op of ops) {
    switch (op.op) {
      case "rect":
        ctx.strokeStyle = op.stroke;
        ctx.strokeRect(X(op.x), Y(op.y + op.h), op.w * s, op.h * s);
        if (op.label) {
          ctx.fillStyle = op.stroke;
          ctx.font = "12px monospace";
          ctx.fillText(op.label, X(op.x) + 4, Y(op.y + op.h) + 14);
        }
        break;
      case "line":
        ctx.strokeStyle = op.color;
        ctx.lineWidth = op.width;
        ctx.beginPath();
        ctx.moveTo(X(op.x1), Y(op.y1));
        ctx.lineTo(X(op.x2), Y(op.y2));
        ctx.stroke();
        ctx.lineWidth = 1;
        break;
      case "circle":
        ctx.strokeStyle = op.color;
        ctx.fillStyle = op.color;
        ctx.beginPath();
        ctx.arc(X(op.x), Y(op.y), Math.max(op.r * s, 2), 0, 2 * Math.PI);
        op.fill ? ctx.fill() : ctx.stroke();
        break;
      case "polyline":
        ctx.strokeStyle = op.color;
        ctx.beginPath();
        op.points.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(X(x), Y(y)) : ctx.lineTo(X(x), Y(y))));
        ctx.stroke();
        break;
      case "text":
        ctx.fillStyle = op.color;
        ctx.font = "12px monospace";
        ctx.fillText(op.text, X(op.x), Y(op.y));
        break;
    }
  }
}

export function paintGauges(container: HTMLElement, vm: ViewModel): void {
  container.innerHTML = "";
  for (const g of vm.gauges) {
    const row = document.createElement("div");
    row.className = "gauge" + (g.alert ? " alert" : "");
    const frac = Math.min(Math.abs(g.value) / Math.max(g.limit * 2, 1e-9), 1);
    row.innerHTML =
      `<span class="gauge-label">${g.label}</span>` +
      `<span class="gauge-bar"><span class="gauge-fill" style="width:${(frac * 100).toFixed(0)}%"></span></span>` +
      `<span class="gauge-value">${g.value.toFixed(2)} / ${g.limit.toFixed(1)}</span>`;
    container.appendChild(row);
  }
}

export function paintFeed(container: HTMLElement, vm: ViewModel): void {
  container.innerHTML = "";
  for (const line of vm.feed) {
    const div = document.createElement("div");
    div.className = "feed-line" + (line.alert ? " alert" : "");
    div.textContent = line.text;
    container.appendChild(div);
  }
}
