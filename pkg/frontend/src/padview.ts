/** Gesture pad rendering: legend ring, dead zone, live drag arrow. */

import { DEAD_ZONE_PX, PadMode, legendEntries } from "./pad.js";
import { COLORS, Draw2D, ViewDims } from "./views.js";

export interface DragVec {
  dx: number;
  dy: number;
}

export function drawPad(
  ctx: Draw2D,
  dims: ViewDims,
  mode: PadMode,
  drag: DragVec | null,
): void {
  const cx = dims.w / 2;
  const cy = dims.h / 2;
  const r = Math.min(cx, cy) - 10;

  ctx.fillStyle = COLORS.bg;
  ctx.fillRect(0, 0, dims.w, dims.h);

  ctx.strokeStyle = COLORS.shell;
  ctx.lineWidth = 1;
  ctx.setLineDash([]);
  ctx.beginPath();
  ctx.arc(cx, cy, r, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.setLineDash([2, 4]);
  ctx.beginPath();
  ctx.arc(cx, cy, DEAD_ZONE_PX, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.setLineDash([]);

  // legend: one label per sector center
  ctx.font = "11px sans-serif";
  ctx.textAlign = "center";
  ctx.fillStyle = COLORS.text;
  for (const sector of legendEntries(mode)) {
    const a = (sector.angleDeg * Math.PI) / 180;
    const lx = cx + (r - 14) * Math.cos(a);
    const ly = cy - (r - 14) * Math.sin(a) + 4;
    ctx.fillText(sector.kind, lx, ly);
  }

  if (drag !== null) {
    ctx.strokeStyle = COLORS.marker;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(cx, cy);
    ctx.lineTo(cx + drag.dx, cy + drag.dy);
    ctx.stroke();
  }
}
