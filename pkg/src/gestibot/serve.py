"""Live service: sensor intake -> session FSM -> robot, fanned out to
WebSocket clients.

One process hosts the robot simulator on its TCP protocol port, a session
FSM fed by client sensor frames (timestamps re-stamped with the server's
monotonic clock, since browser clocks are untrusted), and a WebSocket
endpoint speaking typed envelopes. Every MoveRequested is forwarded as an
IMOV line over a real TCP connection to the robot port, and the measured
activation-to-IMOV latency is published in the session_event envelope.
"""

from __future__ import annotations

import asyncio
import json
import logging
import time

import numpy as np

from .classifier import (
    SCORE_THRESHOLD,
    forward,
    load_model_file,
    normalize_window,
)
from .config import ServeConfig
from .frames import AccelSample, Arm, FrameError, sample_from_obj
from .gestures import TRAINABLE_CLASSES, GestureClass, parse_class
from .robot import RobotServer, RobotSim
from .session import (
    Session,
    SessionMode,
    MoveRequested,
    StateChanged,
    StopRequested,
    WatchdogConfig,
)
from .synth import SynthParams, gesture_injection_frames
from .ws import WsConnection, WsError, accept_websocket

__all__ = ["GestibotService", "CLIENT_MSG_TYPES", "SERVER_MSG_TYPES"]

log = logging.getLogger(__name__)

CLIENT_MSG_TYPES = ("sensor_frame", "ui_gesture", "subscribe")
# eval_progress is reserved for server-side evaluation runs
SERVER_MSG_TYPES = ("telemetry", "session_event", "class_scores",
                    "eval_progress", "error")

_UI_HOLD_LIMIT_S = 60.0  # virtual START hold auto-releases after this


def _envelope(msg_type: str, payload: dict) -> str:
    return json.dumps({"v": 1, "type": msg_type, "payload": payload})


class GestibotService:
    """Long-running serve-mode host. start() binds ports; run in one loop."""

    def __init__(self, cfg: ServeConfig):
        self.cfg = cfg
        # refuses to start on a wrong-topology or corrupt model file
        self._model = load_model_file(cfg.model_path)
        self._workspace = cfg.workspace()
        self._sim = RobotSim(
            self._workspace,
            lin_speed=cfg.lin_speed,
            rot_speed=cfg.rot_speed,
        )
        self._robot_server = RobotServer(
            self._sim, cfg.host, cfg.robot_port,
            tick_hz=cfg.tick_hz, telemetry_hz=cfg.telemetry_hz,
        )
        self._session = Session(
            self._classify_window,
            self._workspace,
            lambda: self._sim.pose,
            watchdog=WatchdogConfig(cfg.watchdog_timeout_ms),
        )
        self._clients: dict[WsConnection, set[str]] = {}
        self._tasks: list[asyncio.Task] = []
        self._client_server: asyncio.base_events.Server | None = None
        self._robot_writer: asyncio.StreamWriter | None = None
        self._rng = np.random.default_rng()
        self._t0 = 0.0
        self._last_stamp = 0.0
        self._pending_scores: np.ndarray | None = None
        self._activation_rx: float | None = None
        self._ui_hold_task: asyncio.Task | None = None

    # -- lifecycle ----------------------------------------------------------

    async def start(self) -> None:
        loop = asyncio.get_running_loop()
        self._t0 = loop.time()
        try:
            await self._robot_server.start()
        except OSError as exc:
            raise RuntimeError(
                f"cannot bind robot port {self.cfg.robot_port}: {exc}"
            ) from exc
        reader, writer = await asyncio.open_connection(
            self.cfg.host, self._robot_server.port
        )
        self._robot_writer = writer
        self._tasks.append(asyncio.ensure_future(self._robot_reply_loop(reader)))
        try:
            self._client_server = await asyncio.start_server(
                self._on_ws_client, self.cfg.host, self.cfg.client_port
            )
        except OSError as exc:
            raise RuntimeError(
                f"cannot bind client port {self.cfg.client_port}: {exc}"
            ) from exc
        self._tasks.append(asyncio.ensure_future(self._watchdog_loop()))
        self._tasks.append(asyncio.ensure_future(self._telemetry_loop()))
        log.info("serving clients on %s:%d, robot protocol on %s:%d",
                 self.cfg.host, self.client_port, self.cfg.host,
                 self.robot_port)

    async def stop(self) -> None:
        for task in self._tasks:
            task.cancel()
        for task in self._tasks:
            try:
                await task
            except (asyncio.CancelledError, Exception):
                pass
        self._tasks.clear()
        if self._ui_hold_task is not None:
            self._ui_hold_task.cancel()
        if self._robot_writer is not None:
            self._robot_writer.close()
        if self._client_server is not None:
            self._client_server.close()
            await self._client_server.wait_closed()
        for conn in list(self._clients):
            await conn.close()
        self._clients.clear()
        await self._robot_server.stop()

    @property
    def client_port(self) -> int:
        assert self._client_server is not None, "service not started"
        return self._client_server.sockets[0].getsockname()[1]

    @property
    def robot_port(self) -> int:
        return self._robot_server.port

    def _now_ms(self) -> float:
        return (asyncio.get_running_loop().time() - self._t0) * 1000.0

    # -- session plumbing ---------------------------------------------------

    def _classify_window(self, window: np.ndarray) -> GestureClass:
        scores = forward(self._model, normalize_window(window))
        self._pending_scores = scores
        best = int(np.argmax(scores))
        if scores[best] < SCORE_THRESHOLD:
            return GestureClass.UNKNOWN
        return GestureClass(best)

    async def _handle_frame(self, sample: AccelSample) -> None:
        rx = time.perf_counter()
        # bump guards against coarse clocks stamping two frames identically,
        # which the session would drop as out-of-order
        now = self._now_ms()
        if now <= self._last_stamp:
            now = self._last_stamp + 1e-3
        self._last_stamp = now
        restamped = sample._replace(t=now)
        events = self._session.ingest(restamped)
        for event in events:
            if isinstance(event, StateChanged) and event.mode is SessionMode.CAPTURING:
                self._activation_rx = rx
        await self._dispatch_events(events)
        if self._pending_scores is not None:
            scores = self._pending_scores
            self._pending_scores = None
            best = int(np.argmax(scores))
            predicted = (
                GestureClass(best).name
                if scores[best] >= SCORE_THRESHOLD else GestureClass.UNKNOWN.name
            )
            await self._broadcast("class_scores", {
                "t": restamped.t,
                "scores": [float(v) for v in scores],
                "labels": [c.name for c in TRAINABLE_CLASSES],
                "predicted": predicted,
            })

    async def _dispatch_events(self, events) -> None:
        for event in events:
            if isinstance(event, MoveRequested):
                await self._send_robot({
                    "cmd": "IMOV", "inc": list(event.increment),
                })
                latency_ms = None
                if self._activation_rx is not None:
                    latency_ms = (time.perf_counter() - self._activation_rx) * 1000.0
                    self._activation_rx = None
                await self._broadcast("session_event", {
                    "event": "move_requested",
                    "t": event.t,
                    "gesture": event.gesture.name,
                    "increment": list(event.increment),
                    "latency_ms": latency_ms,
                })
            elif isinstance(event, StopRequested):
                await self._send_robot({
                    "cmd": "STOP", "reason": event.reason.value,
                })
                await self._broadcast("session_event", {
                    "event": "stop_requested",
                    "t": event.t,
                    "reason": event.reason.value,
                })
            elif isinstance(event, StateChanged):
                await self._broadcast("session_event", {
                    "event": "state_changed",
                    "t": event.t,
                    "mode": event.mode.name,
                })

    async def _send_robot(self, obj: dict) -> None:
        assert self._robot_writer is not None
        if obj.get("cmd") == "IMOV":
            # cross-module safety: IMOV only ever leaves while MOVING
            assert self._session.mode is SessionMode.MOVING
        self._robot_writer.write((json.dumps(obj) + "\n").encode())
        await self._robot_writer.drain()

    async def _robot_reply_loop(self, reader: asyncio.StreamReader) -> None:
        while True:
            line = await reader.readline()
            if not line:
                break
            try:
                reply = json.loads(line)
            except json.JSONDecodeError:
                continue
            if not reply.get("ok", False):
                log.warning("robot rejected command: %s", reply)

    async def _watchdog_loop(self) -> None:
        period = min(0.01, self.cfg.watchdog_timeout_ms / 4000.0)
        while True:
            await asyncio.sleep(period)
            events = self._session.watchdog_tick(self._now_ms())
            if events:
                await self._dispatch_events(events)

    async def _telemetry_loop(self) -> None:
        period = 1.0 / self.cfg.telemetry_hz
        while True:
            await asyncio.sleep(period)
            if not self._clients:
                continue
            await self._broadcast("telemetry", self._sim.telemetry(self._now_ms()))

    # -- client handling ----------------------------------------------------

    async def _on_ws_client(self, reader: asyncio.StreamReader,
                            writer: asyncio.StreamWriter) -> None:
        try:
            conn, _path = await accept_websocket(reader, writer)
        except (WsError, asyncio.IncompleteReadError, ConnectionResetError):
            writer.close()
            return
        self._clients[conn] = set(SERVER_MSG_TYPES)  # subscribed to all
        try:
            while True:
                text = await conn.recv_text()
                if text is None:
                    break
                await self._handle_client_msg(conn, text)
        except (WsError, ConnectionResetError):
            pass
        finally:
            self._clients.pop(conn, None)

    async def _handle_client_msg(self, conn: WsConnection, text: str) -> None:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError:
            await self._send_error(conn, "bad_json", "payload is not JSON")
            return
        if not isinstance(obj, dict):
            await self._send_error(conn, "bad_envelope", "envelope must be an object")
            return
        msg_type = obj.get("type")
        payload = obj.get("payload")
        if msg_type == "sensor_frame":
            try:
                sample = sample_from_obj(payload)
            except FrameError as exc:
                await self._send_error(conn, "bad_frame", str(exc))
                return
            await self._handle_frame(sample)
        elif msg_type == "ui_gesture":
            await self._handle_ui_gesture(conn, payload)
        elif msg_type == "subscribe":
            streams = None
            if isinstance(payload, dict):
                streams = payload.get("streams")
            if streams is None:
                self._clients[conn] = set(SERVER_MSG_TYPES)
            elif isinstance(streams, list) and all(isinstance(s, str) for s in streams):
                self._clients[conn] = set(streams)
            else:
                await self._send_error(conn, "bad_subscribe",
                                       "streams must be a list of names")
        else:
            await self._send_error(conn, "unknown_type",
                                   f"unknown envelope type {msg_type!r}")

    async def _handle_ui_gesture(self, conn: WsConnection, payload) -> None:
        if not isinstance(payload, dict):
            await self._send_error(conn, "bad_gesture", "payload must be an object")
            return
        kind = payload.get("kind")
        intensity = payload.get("intensity", 1.0)
        if not isinstance(intensity, (int, float)) or not 0.5 <= intensity <= 1.5:
            await self._send_error(conn, "bad_gesture",
                                   "intensity must be within [0.5, 1.5]")
            return
        if kind == "LEFT_START":
            self._start_ui_hold()
            return
        if kind == "LEFT_STOP":
            await self._stop_ui_hold()
            return
        try:
            cls = parse_class(kind) if isinstance(kind, str) else None
        except ValueError:
            cls = None
        if cls is None or cls is GestureClass.UNKNOWN:
            await self._send_error(conn, "bad_gesture",
                                   f"unknown gesture kind {kind!r}")
            return
        params = SynthParams(peak_accel=float(intensity),
                             seed=int(self._rng.integers(1 << 31)))
        frames = gesture_injection_frames(cls, params)
        asyncio.ensure_future(self._inject_frames(frames))

    def _start_ui_hold(self) -> None:
        if self._ui_hold_task is not None and not self._ui_hold_task.done():
            return  # already holding

        async def hold() -> None:
            loop = asyncio.get_running_loop()
            deadline = loop.time() + _UI_HOLD_LIMIT_S
            while loop.time() < deadline:
                noise = self._rng.normal(0.0, 0.05, 3)
                await self._handle_frame(AccelSample(
                    0.0, Arm.LEFT,
                    -1.0 + noise[0], noise[1], noise[2],
                ))
                await asyncio.sleep(0.01)

        self._ui_hold_task = asyncio.ensure_future(hold())

    async def _stop_ui_hold(self) -> None:
        if self._ui_hold_task is not None:
            self._ui_hold_task.cancel()
            self._ui_hold_task = None
        for _ in range(3):
            noise = self._rng.normal(0.0, 0.05, 3)
            await self._handle_frame(AccelSample(
                0.0, Arm.LEFT,
                noise[0], noise[1], 1.0 + noise[2],
            ))
            await asyncio.sleep(0.01)

    async def _inject_frames(self, frames) -> None:
        for frame in frames:
            await self._handle_frame(frame)
            await asyncio.sleep(0.01)

    async def _send_error(self, conn: WsConnection, code: str, detail: str) -> None:
        try:
            await conn.send_text(_envelope("error", {"error": code,
                                                     "detail": detail}))
        except (WsError, ConnectionResetError):
            pass

    async def _broadcast(self, msg_type: str, payload: dict) -> None:
        if not self._clients:
            return
        text = _envelope(msg_type, payload)
        dead = []
        for conn, streams in self._clients.items():
            if msg_type not in streams:
                continue
            try:
                await conn.send_text(text)
            except (WsError, ConnectionResetError, RuntimeError):
                dead.append(conn)
        for conn in dead:
            self._clients.pop(conn, None)

    async def run_forever(self) -> None:
        await asyncio.Future()
