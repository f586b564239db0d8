/**
 * Console entry point: DOM wiring and the single render loop.
 *
 * One inbox collects parsed envelopes in arrival order; each animation
 * frame drains it through the pure reducer and redraws. User inputs all
 * go out through one NetClient queue.
 */

import { NetClient, NetStatus, WsLike } from "./net.js";
import {
  ClientMsg,
  DEFAULT_WORKSPACE,
  SensorFramePayload,
  ServerMsg,
  UiGestureKind,
} from "./protocol.js";
import { dragToGesture, PadMode } from "./pad.js";
import { drawPad, DragVec } from "./padview.js";
import { ConsoleState, initialState, reduce, replayLog } from "./state.js";
import { badgeView, Draw2D, drawScoreBars, drawWorkspaceView, ViewDims } from "./views.js";

const RECORD_MAX_LINES = 50_000;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

function canvasCtx(id: string): { ctx: Draw2D; dims: ViewDims } {
  const canvas = el<HTMLCanvasElement>(id);
  const raw = canvas.getContext("2d");
  if (raw === null) throw new Error(`no 2d context for #${id}`);
  // CanvasRenderingContext2D satisfies Draw2D at runtime; the structural
  // type exists so tests can substitute a recording fake
  return { ctx: raw as unknown as Draw2D, dims: { w: canvas.width, h: canvas.height } };
}

function wsUrl(): string {
  const param = new URLSearchParams(location.search).get("ws");
  if (param !== null) return param;
  const host = location.hostname !== "" ? location.hostname : "127.0.0.1";
  return `ws://${host}:8765/`;
}

function main(): void {
  const top = canvasCtx("top-view");
  const side = canvasCtx("side-view");
  const scores = canvasCtx("scores");
  const pad = canvasCtx("pad");
  const padCanvas = el<HTMLCanvasElement>("pad");

  const statusEl = el<HTMLSpanElement>("status");
  const modeEl = el<HTMLSpanElement>("mode");
  const latencyEl = el<HTMLSpanElement>("latency");
  const gestureEl = el<HTMLSpanElement>("gesture");
  const unknownEl = el<HTMLSpanElement>("unknown");
  const toastEl = el<HTMLDivElement>("toast");
  const errorsEl = el<HTMLDivElement>("errors");
  const replayInfoEl = el<HTMLSpanElement>("replay-info");

  let state: ConsoleState = initialState(DEFAULT_WORKSPACE);
  const inbox: ServerMsg[] = [];

  let recording = false;
  let log: string[] = [];

  const net = new NetClient({
    url: wsUrl(),
    factory: (url) => new WebSocket(url) as unknown as WsLike,
  });
  net.onMessage = (msg) => inbox.push(msg);
  net.onRaw = (text) => {
    if (recording && log.length < RECORD_MAX_LINES) log.push(text);
  };
  net.onMalformed = (text) => console.warn("malformed envelope ignored:", text);
  net.onStatus = (status: NetStatus) => {
    statusEl.textContent = status;
    statusEl.className = `badge ${status}`;
  };
  net.connect();

  const sendGesture = (kind: UiGestureKind, intensity: number): void => {
    net.send({ v: 1, type: "ui_gesture", payload: { kind, intensity } });
  };

  // -- pad input ------------------------------------------------------------

  let padMode: PadMode = "translate";
  let drag: DragVec | null = null;
  let dragOrigin: { x: number; y: number } | null = null;
  const padRadius = padCanvas.width / 2 - 10;

  const padPoint = (ev: PointerEvent): { x: number; y: number } => {
    const rect = padCanvas.getBoundingClientRect();
    return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
  };
  padCanvas.addEventListener("pointerdown", (ev) => {
    padCanvas.setPointerCapture(ev.pointerId);
    dragOrigin = padPoint(ev);
    drag = { dx: 0, dy: 0 };
  });
  padCanvas.addEventListener("pointermove", (ev) => {
    if (dragOrigin === null) return;
    const p = padPoint(ev);
    drag = { dx: p.x - dragOrigin.x, dy: p.y - dragOrigin.y };
  });
  padCanvas.addEventListener("pointerup", () => {
    if (drag !== null) {
      const gesture = dragToGesture(drag.dx, drag.dy, padMode, padRadius);
      if (gesture !== null) sendGesture(gesture.kind, gesture.intensity);
    }
    drag = null;
    dragOrigin = null;
  });
  padCanvas.addEventListener("pointercancel", () => {
    drag = null;
    dragOrigin = null;
  });

  const modeTranslate = el<HTMLButtonElement>("mode-translate");
  const modeRotate = el<HTMLButtonElement>("mode-rotate");
  const setPadMode = (m: PadMode): void => {
    padMode = m;
    modeTranslate.classList.toggle("active", m === "translate");
    modeRotate.classList.toggle("active", m === "rotate");
  };
  modeTranslate.addEventListener("click", () => setPadMode("translate"));
  modeRotate.addEventListener("click", () => setPadMode("rotate"));
  setPadMode("translate");

  // -- session controls -----------------------------------------------------

  const startBtn = el<HTMLButtonElement>("btn-start");
  let holding = false;
  const beginHold = (): void => {
    if (holding) return;
    holding = true;
    startBtn.classList.add("active");
    sendGesture("LEFT_START", 1.0);
  };
  const endHold = (): void => {
    if (!holding) return;
    holding = false;
    startBtn.classList.remove("active");
    sendGesture("LEFT_STOP", 1.0);
  };
  startBtn.addEventListener("pointerdown", beginHold);
  startBtn.addEventListener("pointerup", endHold);
  startBtn.addEventListener("pointerleave", endHold);
  startBtn.addEventListener("pointercancel", endHold);

  el<HTMLButtonElement>("btn-stop").addEventListener("click", () => {
    sendGesture("LEFT_STOP", 1.0);
  });
  document.addEventListener("keydown", (ev) => {
    if (ev.key === "Escape") sendGesture("LEFT_STOP", 1.0);
  });

  // -- advanced raw-frame mode ----------------------------------------------

  const advancedToggle = el<HTMLInputElement>("advanced-toggle");
  const advancedEl = el<HTMLDivElement>("advanced");
  advancedToggle.addEventListener("change", () => {
    advancedEl.hidden = !advancedToggle.checked;
  });

  el<HTMLButtonElement>("btn-stream").addEventListener("click", () => {
    const text = el<HTMLTextAreaElement>("frames").value;
    const frames: SensorFramePayload[] = [];
    for (const line of text.split("\n")) {
      if (line.trim() === "") continue;
      try {
        const obj = JSON.parse(line);
        frames.push({
          t: Number(obj.t),
          arm: obj.arm === "L" ? "L" : "R",
          ax: Number(obj.ax),
          ay: Number(obj.ay),
          az: Number(obj.az),
        });
      } catch {
        console.warn("skipping bad frame line:", line);
      }
    }
    let i = 0;
    const timer = setInterval(() => {
      if (i >= frames.length) {
        clearInterval(timer);
        return;
      }
      const msg: ClientMsg = { v: 1, type: "sensor_frame", payload: frames[i] };
      net.send(msg);
      i += 1;
    }, 10);
  });

  // -- envelope log record / replay ------------------------------------------

  const recordBtn = el<HTMLButtonElement>("btn-record");
  recordBtn.addEventListener("click", () => {
    recording = !recording;
    if (recording) log = [];
    recordBtn.textContent = recording ? "stop recording" : "record";
    recordBtn.classList.toggle("active", recording);
    replayInfoEl.textContent = recording ? "recording..." : `${log.length} envelopes held`;
  });
  el<HTMLButtonElement>("btn-replay").addEventListener("click", () => {
    recording = false;
    recordBtn.textContent = "record";
    recordBtn.classList.remove("active");
    const result = replayLog(log, DEFAULT_WORKSPACE);
    state = result.state;
    replayInfoEl.textContent =
      `replayed ${result.applied} envelopes` +
      (result.malformed > 0 ? ` (${result.malformed} malformed)` : "");
  });

  // -- render loop ------------------------------------------------------------

  const frame = (): void => {
    while (inbox.length > 0) {
      state = reduce(state, inbox.shift() as ServerMsg);
    }
    drawWorkspaceView(top.ctx, top.dims, state, "top");
    drawWorkspaceView(side.ctx, side.dims, state, "side");
    drawScoreBars(scores.ctx, scores.dims, state);
    drawPad(pad.ctx, pad.dims, padMode, drag);

    const badges = badgeView(state);
    modeEl.textContent = badges.mode;
    modeEl.className = `badge ${badges.modeClass}`;
    latencyEl.textContent = badges.latency;
    gestureEl.textContent = badges.gesture === null ? "" : `last move: ${badges.gesture}`;
    unknownEl.hidden = !badges.unknown;
    if (badges.toast === null) {
      toastEl.hidden = true;
    } else {
      toastEl.hidden = false;
      toastEl.textContent = badges.toast.text;
      toastEl.className = badges.toast.red ? "toast red" : "toast";
    }
    errorsEl.textContent = state.errors.slice(-3).join("\n");

    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);
}

main();
