/** Envelope contract spoken with the control service. Nothing else. */

export const ENVELOPE_VERSION = 1;

export const CLASS_LABELS = [
  "XP", "XN", "YP", "YN", "ZP", "ZN",
  "RXP", "RXN", "RYP", "RYN", "RZP", "RZN",
] as const;

export type ClassLabel = (typeof CLASS_LABELS)[number];
export type UiGestureKind = ClassLabel | "LEFT_START" | "LEFT_STOP";
export type SessionModeName = "IDLE" | "CAPTURING" | "MOVING";
export type StopReasonName = "OPERATOR" | "WATCHDOG" | "UNKNOWN_GESTURE";

export const SCORE_THRESHOLD = 0.5;

/* service defaults; the wire protocol carries poses, not workspace bounds */
export interface WorkspaceBounds {
  rInt: number;
  rExt: number;
}
export const DEFAULT_WORKSPACE: WorkspaceBounds = { rInt: 500, rExt: 2000 };

// -- client -> server ------------------------------------------------------

export interface SensorFramePayload {
  t: number;
  arm: "L" | "R";
  ax: number;
  ay: number;
  az: number;
}

export interface UiGesturePayload {
  kind: UiGestureKind;
  intensity: number; // [0.5, 1.5]
}

export interface SubscribePayload {
  streams?: string[];
}

export type ClientMsg =
  | { v: 1; type: "sensor_frame"; payload: SensorFramePayload }
  | { v: 1; type: "ui_gesture"; payload: UiGesturePayload }
  | { v: 1; type: "subscribe"; payload: SubscribePayload };

export function encodeClientMsg(msg: ClientMsg): string {
  return JSON.stringify(msg);
}

// -- server -> client ------------------------------------------------------

export interface Pose {
  xyz: [number, number, number];
  rpy: [number, number, number];
}

export interface TelemetryPayload {
  t: number;
  pose: Pose;
  moving: boolean;
  last_stop_reason: string | null;
}

export type SessionEventPayload =
  | { event: "state_changed"; t: number; mode: SessionModeName }
  | {
      event: "move_requested";
      t: number;
      gesture: ClassLabel;
      increment: number[];
      latency_ms: number | null;
    }
  | { event: "stop_requested"; t: number; reason: StopReasonName };

export interface ClassScoresPayload {
  t: number;
  scores: number[];
  labels: string[];
  predicted: string; // a class label or "UNKNOWN"
}

export interface ErrorPayload {
  error: string;
  detail: string;
}

export type ServerMsg =
  | { type: "telemetry"; payload: TelemetryPayload }
  | { type: "session_event"; payload: SessionEventPayload }
  | { type: "class_scores"; payload: ClassScoresPayload }
  | { type: "eval_progress"; payload: Record<string, unknown> }
  | { type: "error"; payload: ErrorPayload };

// -- parsing ---------------------------------------------------------------

function isRecord(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

function isNum(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function isVec3(v: unknown): v is [number, number, number] {
  return Array.isArray(v) && v.length === 3 && v.every(isNum);
}

function parsePose(v: unknown): Pose | null {
  if (!isRecord(v) || !isVec3(v.xyz) || !isVec3(v.rpy)) return null;
  return { xyz: v.xyz, rpy: v.rpy };
}

const MODES: readonly string[] = ["IDLE", "CAPTURING", "MOVING"];
const REASONS: readonly string[] = ["OPERATOR", "WATCHDOG", "UNKNOWN_GESTURE"];

function parseSessionEvent(p: Record<string, unknown>): SessionEventPayload | null {
  if (!isNum(p.t)) return null;
  switch (p.event) {
    case "state_changed":
      if (typeof p.mode !== "string" || !MODES.includes(p.mode)) return null;
      return { event: "state_changed", t: p.t, mode: p.mode as SessionModeName };
    case "move_requested": {
      if (typeof p.gesture !== "string") return null;
      if (!(CLASS_LABELS as readonly string[]).includes(p.gesture)) return null;
      const inc = p.increment;
      if (!Array.isArray(inc) || inc.length !== 6 || !inc.every(isNum)) return null;
      const lat = p.latency_ms;
      if (!(lat === null || isNum(lat))) return null;
      return {
        event: "move_requested",
        t: p.t,
        gesture: p.gesture as ClassLabel,
        increment: inc,
        latency_ms: lat,
      };
    }
    case "stop_requested":
      if (typeof p.reason !== "string" || !REASONS.includes(p.reason)) return null;
      return { event: "stop_requested", t: p.t, reason: p.reason as StopReasonName };
    default:
      return null;
  }
}

/**
 * Parse one wire message. Returns null for anything malformed so the
 * caller can log it and leave the view unchanged.
 */
export function parseServerMsg(text: string): ServerMsg | null {
  let obj: unknown;
  try {
    obj = JSON.parse(text);
  } catch {
    return null;
  }
  if (!isRecord(obj) || obj.v !== ENVELOPE_VERSION) return null;
  const payload = obj.payload;
  if (!isRecord(payload)) return null;
  switch (obj.type) {
    case "telemetry": {
      const pose = parsePose(payload.pose);
      if (!isNum(payload.t) || pose === null) return null;
      if (typeof payload.moving !== "boolean") return null;
      const reason = payload.last_stop_reason;
      if (!(reason === null || typeof reason === "string")) return null;
      return {
        type: "telemetry",
        payload: { t: payload.t, pose, moving: payload.moving, last_stop_reason: reason ?? null },
      };
    }
    case "session_event": {
      const ev = parseSessionEvent(payload);
      return ev === null ? null : { type: "session_event", payload: ev };
    }
    case "class_scores": {
      const { t, scores, labels, predicted } = payload;
      if (!isNum(t) || typeof predicted !== "string") return null;
      if (!Array.isArray(scores) || !scores.every(isNum)) return null;
      if (!Array.isArray(labels) || !labels.every((l) => typeof l === "string")) return null;
      if (scores.length !== labels.length) return null;
      return { type: "class_scores", payload: { t, scores, labels, predicted } };
    }
    case "eval_progress":
      return { type: "eval_progress", payload };
    case "error": {
      if (typeof payload.error !== "string" || typeof payload.detail !== "string") return null;
      return { type: "error", payload: { error: payload.error, detail: payload.detail } };
    }
    default:
      return null;
  }
}
