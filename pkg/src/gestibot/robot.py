"""Simulated robot arm: incremental linear moves at constant speed inside
the workspace shell, with a newline-delimited JSON TCP protocol and a
telemetry stream for subscribers.
"""

from __future__ import annotations

import asyncio
import json
import logging
import math

from .geometry import Pose, Vec3, Workspace, contains

__all__ = [
    "DEFAULT_LIN_SPEED",
    "DEFAULT_ROT_SPEED",
    "DEFAULT_START_POSE",
    "RobotSim",
    "RobotServer",
]

log = logging.getLogger(__name__)

DEFAULT_LIN_SPEED = 200.0  # mm/s
DEFAULT_ROT_SPEED = 90.0   # deg/s
DEFAULT_START_POSE = Pose((1000.0, 0.0, 0.0), (0.0, 0.0, 0.0))

_EPS = 1e-9


def _segment_min_dist_to_origin(p: Vec3, q: Vec3) -> float:
    """Minimum |p + s*(q-p)| over s in [0, 1]."""
    dx, dy, dz = q[0] - p[0], q[1] - p[1], q[2] - p[2]
    dd = dx * dx + dy * dy + dz * dz
    if dd == 0.0:
        return math.sqrt(p[0] ** 2 + p[1] ** 2 + p[2] ** 2)
    s = -(p[0] * dx + p[1] * dy + p[2] * dz) / dd
    s = min(1.0, max(0.0, s))
    cx, cy, cz = p[0] + s * dx, p[1] + s * dy, p[2] + s * dz
    return math.sqrt(cx * cx + cy * cy + cz * cz)


class RobotSim:
    """Single-writer robot state machine.

    Commands mutate target/moving; tick() integrates the pose toward the
    target at constant speeds, arriving exactly with no overshoot. The pose
    stays inside the workspace because IMOV validates the whole motion
    segment, not just the endpoint (the shell is not convex: a chord can
    cut through the inner sphere).
    """

    def __init__(self, workspace: Workspace | None = None,
                 pose: Pose = DEFAULT_START_POSE,
                 lin_speed: float = DEFAULT_LIN_SPEED,
                 rot_speed: float = DEFAULT_ROT_SPEED):
        self.workspace = workspace or Workspace()
        if not contains(self.workspace, pose.position):
            raise ValueError("start pose outside workspace")
        if lin_speed <= 0 or rot_speed <= 0:
            raise ValueError("speeds must be positive")
        self.pose = pose
        self.target: Pose | None = None
        self.lin_speed = lin_speed
        self.rot_speed = rot_speed
        self.last_stop_reason: str | None = None

    @property
    def moving(self) -> bool:
        return self.target is not None

    # -- commands ---------------------------------------------------------

    def imov(self, inc) -> dict:
        try:
            values = [float(v) for v in inc]
        except (TypeError, ValueError):
            return {"ok": False, "err": "bad_inc"}
        if len(values) != 6:
            return {"ok": False, "err": "bad_inc"}
        if not all(math.isfinite(v) for v in values):
            return {"ok": False, "err": "non_finite"}
        if sum(1 for v in values if v != 0.0) > 1:
            return {"ok": False, "err": "multi_axis"}

        pos = self.pose.position
        rot = self.pose.rotation
        tpos = (pos[0] + values[0], pos[1] + values[1], pos[2] + values[2])
        trot = (rot[0] + values[3], rot[1] + values[4], rot[2] + values[5])
        ws = self.workspace
        if not contains(ws, tpos):
            return {"ok": False, "err": "out_of_bounds"}
        if _segment_min_dist_to_origin(pos, tpos) < ws.r_int - _EPS:
            return {"ok": False, "err": "out_of_bounds"}
        for axis in range(3):
            lo, hi = ws.rot_limits[axis]
            if not (lo - _EPS <= trot[axis] <= hi + _EPS):
                return {"ok": False, "err": "out_of_bounds"}

        # replaces any in-flight target
        self.target = Pose(tpos, trot)
        return {"ok": True, "moving": True}

    def stop(self, reason: str | None = None) -> dict:
        self.target = None
        self.last_stop_reason = reason or "operator"
        return {"ok": True, "moving": False}

    def getpos(self) -> dict:
        return {
            "ok": True,
            "pose": {"xyz": list(self.pose.position),
                     "rpy": list(self.pose.rotation)},
            "moving": self.moving,
        }

    # -- wire protocol ----------------------------------------------------

    def handle_line(self, line: str) -> dict:
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            return {"ok": False, "err": "bad_json"}
        if not isinstance(obj, dict):
            return {"ok": False, "err": "bad_json"}
        cmd = obj.get("cmd")
        if cmd == "IMOV":
            return self.imov(obj.get("inc"))
        if cmd == "STOP":
            reason = obj.get("reason")
            return self.stop(reason if isinstance(reason, str) else None)
        if cmd == "GETPOS":
            return self.getpos()
        return {"ok": False, "err": "bad_cmd"}

    # -- integration ------------------------------------------------------

    def tick(self, dt_s: float) -> None:
        """Advance toward the target; arrive exactly, never overshoot."""
        if dt_s <= 0:
            raise ValueError("dt must be positive")
        if self.target is None:
            return
        pos = self.pose.position
        tpos = self.target.position
        dx, dy, dz = tpos[0] - pos[0], tpos[1] - pos[1], tpos[2] - pos[2]
        dist = math.sqrt(dx * dx + dy * dy + dz * dz)
        step = self.lin_speed * dt_s
        if dist <= step:
            npos = tpos
        else:
            f = step / dist
            npos = (pos[0] + f * dx, pos[1] + f * dy, pos[2] + f * dz)

        rot = self.pose.rotation
        trot = self.target.rotation
        rstep = self.rot_speed * dt_s
        nrot = []
        for cur, tgt in zip(rot, trot):
            d = tgt - cur
            if abs(d) <= rstep:
                nrot.append(tgt)
            else:
                nrot.append(cur + math.copysign(rstep, d))

        self.pose = Pose(npos, (nrot[0], nrot[1], nrot[2]))
        if self.pose == self.target:
            self.target = None

    def telemetry(self, t_ms: float) -> dict:
        return {
            "t": int(round(t_ms)),
            "pose": {"xyz": list(self.pose.position),
                     "rpy": list(self.pose.rotation)},
            "moving": self.moving,
            "last_stop_reason": self.last_stop_reason,
        }


class RobotServer:
    """TCP front end: one JSON command per line, one JSON reply per line.

    A client that sends {"cmd":"SUB"} additionally receives the telemetry
    stream on the same socket at the configured rate.
    """

    def __init__(self, sim: RobotSim, host: str = "127.0.0.1", port: int = 0,
                 tick_hz: float = 100.0, telemetry_hz: float = 10.0):
        if tick_hz <= 0 or telemetry_hz <= 0:
            raise ValueError("rates must be positive")
        self.sim = sim
        self.host = host
        self._requested_port = port
        self.tick_hz = tick_hz
        self.telemetry_hz = telemetry_hz
        self._server: asyncio.base_events.Server | None = None
        self._tasks: list[asyncio.Task] = []
        self._subs: set[asyncio.StreamWriter] = set()
        self._t0 = 0.0

    @property
    def port(self) -> int:
        assert self._server is not None, "server not started"
        return self._server.sockets[0].getsockname()[1]

    async def start(self) -> None:
        loop = asyncio.get_running_loop()
        self._t0 = loop.time()
        self._server = await asyncio.start_server(
            self._on_client, self.host, self._requested_port
        )
        self._tasks.append(asyncio.ensure_future(self._tick_loop()))
        self._tasks.append(asyncio.ensure_future(self._telemetry_loop()))

    async def stop(self) -> None:
        for task in self._tasks:
            task.cancel()
        for task in self._tasks:
            try:
                await task
            except (asyncio.CancelledError, Exception):
                pass
        self._tasks.clear()
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
            self._server = None

    def _now_ms(self) -> float:
        return (asyncio.get_running_loop().time() - self._t0) * 1000.0

    async def _on_client(self, reader: asyncio.StreamReader,
                         writer: asyncio.StreamWriter) -> None:
        try:
            while True:
                line = await reader.readline()
                if not line:
                    break
                text = line.decode("utf-8", errors="replace").strip()
                if not text:
                    continue
                reply = self._dispatch(text, writer)
                writer.write((json.dumps(reply) + "\n").encode())
                await writer.drain()
        except (ConnectionResetError, asyncio.IncompleteReadError):
            pass
        finally:
            self._subs.discard(writer)
            writer.close()

    def _dispatch(self, text: str, writer: asyncio.StreamWriter) -> dict:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError:
            return {"ok": False, "err": "bad_json"}
        if isinstance(obj, dict) and obj.get("cmd") == "SUB":
            self._subs.add(writer)
            return {"ok": True, "subscribed": True}
        return self.sim.handle_line(text)

    async def _tick_loop(self) -> None:
        loop = asyncio.get_running_loop()
        period = 1.0 / self.tick_hz
        last = loop.time()
        while True:
            await asyncio.sleep(period)
            now = loop.time()
            dt = now - last
            last = now
            if dt > 0:
                self.sim.tick(dt)

    async def _telemetry_loop(self) -> None:
        period = 1.0 / self.telemetry_hz
        while True:
            await asyncio.sleep(period)
            if not self._subs:
                continue
            line = (json.dumps(self.sim.telemetry(self._now_ms())) + "\n").encode()
            dead = []
            for writer in self._subs:
                try:
                    writer.write(line)
                    await writer.drain()
                except (ConnectionResetError, RuntimeError):
                    dead.append(writer)
            for writer in dead:
                self._subs.discard(writer)
