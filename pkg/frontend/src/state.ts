/**
 * Console state as a pure reduction over the server envelope stream.
 *
 * Purity is the point: replaying a recorded envelope log through the
 * reducer must land on the identical final state, so nothing in here may
 * read clocks, sockets, or randomness. Rendered robot state only ever
 * comes from telemetry envelopes; session events change badges, never
 * the pose.
 */

import {
  ClassScoresPayload,
  Pose,
  ServerMsg,
  SessionModeName,
  StopReasonName,
  WorkspaceBounds,
  parseServerMsg,
} from "./protocol.js";

export const TRAIL_MAX = 400;
export const ERROR_LOG_MAX = 20;

export interface StopToast {
  reason: StopReasonName;
  t: number;
}

export interface ConsoleState {
  workspace: WorkspaceBounds;
  /** last telemetry pose; null until the first telemetry envelope */
  pose: Pose | null;
  moving: boolean;
  lastStopReason: string | null;
  /** recent tool positions, oldest first, for the motion trail */
  trail: [number, number, number][];
  mode: SessionModeName | null;
  scores: ClassScoresPayload | null;
  /** from the last move_requested event */
  latencyMs: number | null;
  lastGesture: string | null;
  toast: StopToast | null;
  /** bounded log of error envelopes, newest last */
  errors: string[];
}

export function initialState(workspace: WorkspaceBounds): ConsoleState {
  return {
    workspace,
    pose: null,
    moving: false,
    lastStopReason: null,
    trail: [],
    mode: null,
    scores: null,
    latencyMs: null,
    lastGesture: null,
    toast: null,
    errors: [],
  };
}

function pushBounded<T>(xs: T[], x: T, max: number): T[] {
  const out = xs.length >= max ? xs.slice(xs.length - max + 1) : xs.slice();
  out.push(x);
  return out;
}

export function reduce(state: ConsoleState, msg: ServerMsg): ConsoleState {
  switch (msg.type) {
    case "telemetry": {
      const p = msg.payload;
      return {
        ...state,
        pose: p.pose,
        moving: p.moving,
        lastStopReason: p.last_stop_reason,
        trail: pushBounded(state.trail, p.pose.xyz, TRAIL_MAX),
      };
    }
    case "session_event": {
      const p = msg.payload;
      if (p.event === "state_changed") {
        // a fresh capture clears the previous stop toast
        const toast = p.mode === "CAPTURING" ? null : state.toast;
        return { ...state, mode: p.mode, toast };
      }
      if (p.event === "move_requested") {
        return {
          ...state,
          latencyMs: p.latency_ms,
          lastGesture: p.gesture,
        };
      }
      return { ...state, toast: { reason: p.reason, t: p.t } };
    }
    case "class_scores":
      return { ...state, scores: msg.payload };
    case "error":
      return {
        ...state,
        errors: pushBounded(
          state.errors,
          `${msg.payload.error}: ${msg.payload.detail}`,
          ERROR_LOG_MAX,
        ),
      };
    case "eval_progress":
      return state;
  }
}

export interface ReplayResult {
  state: ConsoleState;
  applied: number;
  malformed: number;
}

/** Re-run a recorded envelope log; malformed lines are counted, not applied. */
export function replayLog(lines: string[], workspace: WorkspaceBounds): ReplayResult {
  let state = initialState(workspace);
  let applied = 0;
  let malformed = 0;
  for (const line of lines) {
    const msg = parseServerMsg(line);
    if (msg === null) {
      malformed += 1;
      continue;
    }
    state = reduce(state, msg);
    applied += 1;
  }
  return { state, applied, malformed };
}
