/**
 * Rendering: two orthographic projections of the workspace annulus, the
 * class-score bars, and the badge/toast view model.
 *
 * Draw functions take a structural subset of CanvasRenderingContext2D so
 * tests can pass a recording fake and assert on the emitted shapes.
 */

import { SCORE_THRESHOLD, WorkspaceBounds } from "./protocol.js";
import { ConsoleState } from "./state.js";

export interface Draw2D {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
  fill(): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
  setLineDash(segments: number[]): void;
  fillStyle: string;
  strokeStyle: string;
  lineWidth: number;
  font: string;
  textAlign: string;
}

export interface ViewDims {
  w: number;
  h: number;
}

export type Plane = "top" | "side";

export const COLORS = {
  bg: "#10141a",
  shell: "#4a5568",
  inner: "#718096",
  trail: "#3182ce",
  marker: "#63b3ed",
  markerStopped: "#a0aec0",
  bar: "#3182ce",
  barWin: "#68d391",
  threshold: "#e53e3e",
  text: "#cbd5e0",
};

const MARKER_R = 6;

/** pixels per millimeter so the outer circle fits with a margin */
export function viewScale(ws: WorkspaceBounds, dims: ViewDims): number {
  return (0.45 * Math.min(dims.w, dims.h)) / ws.rExt;
}

/** project a tool position onto a view plane, returning canvas coordinates */
export function projectPoint(
  ws: WorkspaceBounds,
  dims: ViewDims,
  xyz: [number, number, number],
  plane: Plane,
): { x: number; y: number } {
  const s = viewScale(ws, dims);
  const u = xyz[0];
  const v = plane === "top" ? xyz[1] : xyz[2];
  return { x: dims.w / 2 + u * s, y: dims.h / 2 - v * s };
}

export function drawWorkspaceView(
  ctx: Draw2D,
  dims: ViewDims,
  state: ConsoleState,
  plane: Plane,
): void {
  const ws = state.workspace;
  const s = viewScale(ws, dims);
  const cx = dims.w / 2;
  const cy = dims.h / 2;

  ctx.fillStyle = COLORS.bg;
  ctx.fillRect(0, 0, dims.w, dims.h);

  // both sphere cross sections: reach limit solid, keep-out dashed
  ctx.setLineDash([]);
  ctx.strokeStyle = COLORS.shell;
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.arc(cx, cy, ws.rExt * s, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.setLineDash([4, 4]);
  ctx.strokeStyle = COLORS.inner;
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.arc(cx, cy, ws.rInt * s, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.setLineDash([]);

  ctx.fillStyle = COLORS.text;
  ctx.font = "12px sans-serif";
  ctx.textAlign = "left";
  ctx.fillText(plane === "top" ? "top (x-y)" : "side (x-z)", 8, 16);

  if (state.pose === null) {
    ctx.textAlign = "center";
    ctx.fillText("no telemetry", cx, cy);
    return;
  }

  if (state.trail.length > 1) {
    ctx.strokeStyle = COLORS.trail;
    ctx.lineWidth = 1;
    ctx.beginPath();
    const first = projectPoint(ws, dims, state.trail[0], plane);
    ctx.moveTo(first.x, first.y);
    for (let i = 1; i < state.trail.length; i++) {
      const p = projectPoint(ws, dims, state.trail[i], plane);
      ctx.lineTo(p.x, p.y);
    }
    ctx.stroke();
  }

  const m = projectPoint(ws, dims, state.pose.xyz, plane);
  ctx.fillStyle = state.moving ? COLORS.marker : COLORS.markerStopped;
  ctx.beginPath();
  ctx.arc(m.x, m.y, MARKER_R, 0, 2 * Math.PI);
  ctx.fill();

  // wrist heading tick: rz in the top view, ry in the side view
  const deg = plane === "top" ? state.pose.rpy[2] : state.pose.rpy[1];
  const a = (deg * Math.PI) / 180;
  ctx.strokeStyle = COLORS.marker;
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(m.x, m.y);
  ctx.lineTo(m.x + 2.2 * MARKER_R * Math.cos(a), m.y - 2.2 * MARKER_R * Math.sin(a));
  ctx.stroke();
}

export interface BarGeometry {
  x: number;
  y: number;
  w: number;
  h: number;
  label: string;
  winner: boolean;
}

/** pure layout so tests can check bar heights without a canvas */
export function scoreBarLayout(
  dims: ViewDims,
  scores: number[],
  labels: string[],
  predicted: string,
): BarGeometry[] {
  const n = scores.length;
  if (n === 0) return [];
  const pad = 6;
  const labelBand = 16;
  const slot = (dims.w - 2 * pad) / n;
  const barW = Math.max(2, slot * 0.7);
  const maxH = dims.h - labelBand - 2 * pad;
  return scores.map((score, i) => {
    const h = Math.max(1, score * maxH);
    return {
      x: pad + i * slot + (slot - barW) / 2,
      y: pad + (maxH - h),
      w: barW,
      h,
      label: labels[i],
      winner: labels[i] === predicted,
    };
  });
}

export function drawScoreBars(ctx: Draw2D, dims: ViewDims, state: ConsoleState): void {
  ctx.fillStyle = COLORS.bg;
  ctx.fillRect(0, 0, dims.w, dims.h);
  ctx.font = "10px sans-serif";
  if (state.scores === null) {
    ctx.fillStyle = COLORS.text;
    ctx.textAlign = "center";
    ctx.fillText("no window classified yet", dims.w / 2, dims.h / 2);
    return;
  }
  const { scores, labels, predicted } = state.scores;
  const bars = scoreBarLayout(dims, scores, labels, predicted);
  for (const b of bars) {
    ctx.fillStyle = b.winner ? COLORS.barWin : COLORS.bar;
    ctx.fillRect(b.x, b.y, b.w, b.h);
    ctx.fillStyle = COLORS.text;
    ctx.textAlign = "center";
    ctx.fillText(b.label, b.x + b.w / 2, dims.h - 4);
  }
  // decision threshold line
  const pad = 6;
  const maxH = dims.h - 16 - 2 * pad;
  const ty = pad + maxH * (1 - SCORE_THRESHOLD);
  ctx.strokeStyle = COLORS.threshold;
  ctx.lineWidth = 1;
  ctx.setLineDash([3, 3]);
  ctx.beginPath();
  ctx.moveTo(pad, ty);
  ctx.lineTo(dims.w - pad, ty);
  ctx.stroke();
  ctx.setLineDash([]);
}

export interface BadgeView {
  mode: string;
  modeClass: "idle" | "capturing" | "moving" | "none";
  latency: string;
  unknown: boolean;
  toast: { text: string; red: boolean } | null;
  gesture: string | null;
}

export function badgeView(state: ConsoleState): BadgeView {
  const mode = state.mode ?? "NO SESSION";
  const modeClass =
    state.mode === null ? "none" : (state.mode.toLowerCase() as BadgeView["modeClass"]);
  const latency =
    state.latencyMs === null ? "latency: n/a" : `latency: ${state.latencyMs.toFixed(1)} ms`;
  const p = state.scores;
  const unknown =
    p !== null &&
    (p.predicted === "UNKNOWN" || p.scores.every((v) => v < SCORE_THRESHOLD));
  const toast =
    state.toast === null
      ? null
      : { text: `stopped: ${state.toast.reason}`, red: state.toast.reason === "WATCHDOG" };
  return { mode, modeClass, latency, unknown, toast, gesture: state.lastGesture };
}
