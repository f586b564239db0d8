import { describe, expect, it } from "vitest";

import { CLASS_LABELS, DEFAULT_WORKSPACE, ServerMsg } from "../src/protocol.js";
import { ConsoleState, initialState, reduce } from "../src/state.js";
import {
  badgeView,
  drawScoreBars,
  drawWorkspaceView,
  projectPoint,
  scoreBarLayout,
  viewScale,
} from "../src/views.js";
import { RecordingCtx } from "./fakes.js";

const DIMS = { w: 360, h: 360 };
const WS = DEFAULT_WORKSPACE;
const SCALE = viewScale(WS, DIMS);

function withPose(x: number, y: number, z: number, rpy: [number, number, number] = [0, 0, 0]): ConsoleState {
  const msg: ServerMsg = {
    type: "telemetry",
    payload: { t: 1, pose: { xyz: [x, y, z], rpy }, moving: true, last_stop_reason: null },
  };
  return reduce(initialState(WS), msg);
}

function markerArc(ctx: RecordingCtx) {
  const markers = ctx.arcs().filter((a) => a.r === 6);
  expect(markers).toHaveLength(1);
  return markers[0];
}

describe("drawWorkspaceView", () => {
  it("draws both sphere cross sections even with no telemetry", () => {
    const ctx = new RecordingCtx();
    drawWorkspaceView(ctx, DIMS, initialState(WS), "top");
    const radii = ctx.arcs().map((a) => a.r);
    expect(radii).toContain(WS.rExt * SCALE);
    expect(radii).toContain(WS.rInt * SCALE);
    expect(ctx.texts()).toContain("no telemetry");
  });

  it("puts a pose on the +x boundary exactly on the outer circle", () => {
    const ctx = new RecordingCtx();
    drawWorkspaceView(ctx, DIMS, withPose(WS.rExt, 0, 0), "top");
    const m = markerArc(ctx);
    const d = Math.hypot(m.x - DIMS.w / 2, m.y - DIMS.h / 2);
    expect(d).toBeCloseTo(WS.rExt * SCALE, 10);
  });

  it("projects y in the top view and z in the side view", () => {
    const topCtx = new RecordingCtx();
    const sideCtx = new RecordingCtx();
    const state = withPose(0, 0, 1500);
    drawWorkspaceView(topCtx, DIMS, state, "top");
    drawWorkspaceView(sideCtx, DIMS, state, "side");
    const top = markerArc(topCtx);
    const side = markerArc(sideCtx);
    expect(top.x).toBeCloseTo(180, 10);
    expect(top.y).toBeCloseTo(180, 10); // z is invisible from above
    expect(side.x).toBeCloseTo(180, 10);
    expect(side.y).toBeCloseTo(180 - 1500 * SCALE, 10); // up on screen
  });

  it("matches the pure projection helper", () => {
    const p = projectPoint(WS, DIMS, [1000, -500, 0], "top");
    expect(p.x).toBeCloseTo(180 + 1000 * SCALE, 10);
    expect(p.y).toBeCloseTo(180 + 500 * SCALE, 10);
  });

  it("draws the trail as a polyline", () => {
    let state = withPose(1000, 0, 0);
    state = reduce(state, {
      type: "telemetry",
      payload: { t: 2, pose: { xyz: [1200, 0, 0], rpy: [0, 0, 0] }, moving: true, last_stop_reason: null },
    });
    const ctx = new RecordingCtx();
    drawWorkspaceView(ctx, DIMS, state, "top");
    const lines = ctx.ops.filter((o) => o.op === "lineTo");
    expect(lines.length).toBeGreaterThanOrEqual(1);
  });
});

describe("score bars", () => {
  it("lays out one bar per class with the winner flagged", () => {
    const scores = CLASS_LABELS.map((_, i) => (i === 0 ? 0.9 : 0.05));
    const bars = scoreBarLayout({ w: 520, h: 160 }, scores, [...CLASS_LABELS], "XP");
    expect(bars).toHaveLength(12);
    expect(bars.filter((b) => b.winner).map((b) => b.label)).toEqual(["XP"]);
    const xp = bars[0];
    const other = bars[1];
    expect(xp.h).toBeGreaterThan(other.h * 10);
  });

  it("draws a placeholder before any classification", () => {
    const ctx = new RecordingCtx();
    drawScoreBars(ctx, { w: 520, h: 160 }, initialState(WS));
    expect(ctx.texts()).toContain("no window classified yet");
  });

  it("renders twelve labeled bars once scores arrive", () => {
    let state = initialState(WS);
    state = reduce(state, {
      type: "class_scores",
      payload: {
        t: 1,
        scores: CLASS_LABELS.map(() => 0.3),
        labels: [...CLASS_LABELS],
        predicted: "UNKNOWN",
      },
    });
    const ctx = new RecordingCtx();
    drawScoreBars(ctx, { w: 520, h: 160 }, state);
    for (const label of CLASS_LABELS) {
      expect(ctx.texts()).toContain(label);
    }
    expect(ctx.ops.filter((o) => o.op === "fillRect").length).toBeGreaterThanOrEqual(13);
  });
});

describe("badgeView", () => {
  it("shows the UNKNOWN badge when every score is below threshold", () => {
    let state = initialState(WS);
    state = reduce(state, {
      type: "class_scores",
      payload: {
        t: 1,
        scores: CLASS_LABELS.map(() => 0.49),
        labels: [...CLASS_LABELS],
        predicted: "UNKNOWN",
      },
    });
    expect(badgeView(state).unknown).toBe(true);
  });

  it("keeps the badge off for a confident window", () => {
    let state = initialState(WS);
    state = reduce(state, {
      type: "class_scores",
      payload: {
        t: 1,
        scores: CLASS_LABELS.map((_, i) => (i === 2 ? 0.8 : 0.1)),
        labels: [...CLASS_LABELS],
        predicted: "YP",
      },
    });
    expect(badgeView(state).unknown).toBe(false);
  });

  it("colors only the watchdog toast red", () => {
    let state = initialState(WS);
    state = reduce(state, {
      type: "session_event",
      payload: { event: "stop_requested", t: 1, reason: "WATCHDOG" },
    });
    expect(badgeView(state).toast).toEqual({ text: "stopped: WATCHDOG", red: true });
    state = reduce(state, {
      type: "session_event",
      payload: { event: "stop_requested", t: 2, reason: "OPERATOR" },
    });
    expect(badgeView(state).toast).toEqual({ text: "stopped: OPERATOR", red: false });
  });

  it("formats mode and latency", () => {
    let state = initialState(WS);
    expect(badgeView(state).mode).toBe("NO SESSION");
    expect(badgeView(state).latency).toBe("latency: n/a");
    state = reduce(state, {
      type: "session_event",
      payload: { event: "state_changed", t: 1, mode: "MOVING" },
    });
    state = reduce(state, {
      type: "session_event",
      payload: {
        event: "move_requested",
        t: 1,
        gesture: "ZP",
        increment: [0, 0, 500, 0, 0, 0],
        latency_ms: 12.34,
      },
    });
    const view = badgeView(state);
    expect(view.mode).toBe("MOVING");
    expect(view.modeClass).toBe("moving");
    expect(view.latency).toBe("latency: 12.3 ms");
    expect(view.gesture).toBe("ZP");
  });
});
