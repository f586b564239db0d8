"""Live control-session state machine.

Dual-arm sample streams drive a three-mode FSM: the left arm arms/disarms
the system via start/stop postures, the right arm supplies a three-sample
capture window that is classified into a motion request. A watchdog stops
everything when the left-arm stream goes quiet.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Callable

import numpy as np

from . import geometry
from .classifier import MlpModel, classify, normalize_window
from .frames import AccelSample, Arm
from .gestures import GestureClass, class_to_direction

__all__ = [
    "DOMINANT_G",
    "OFF_AXIS_G",
    "WINDOW_SIZE",
    "LeftPosture",
    "SessionMode",
    "StopReason",
    "MoveRequested",
    "StopRequested",
    "StateChanged",
    "SessionEvent",
    "WatchdogConfig",
    "Session",
    "classify_left",
    "classify_right_static",
    "classifier_from_model",
]

DOMINANT_G = 0.7   # dominant-axis magnitude for a posture to count
OFF_AXIS_G = 0.4   # other axes must stay below this
WINDOW_SIZE = 3


class LeftPosture(Enum):
    STOP = "STOP"
    START = "START"
    INDETERMINATE = "INDETERMINATE"


class SessionMode(IntEnum):
    IDLE = 0
    CAPTURING = 1
    MOVING = 2


class StopReason(Enum):
    OPERATOR = "OPERATOR"
    WATCHDOG = "WATCHDOG"
    UNKNOWN_GESTURE = "UNKNOWN_GESTURE"


@dataclass(frozen=True)
class MoveRequested:
    t: float
    gesture: GestureClass
    increment: geometry.PoseIncrement


@dataclass(frozen=True)
class StopRequested:
    t: float
    reason: StopReason


@dataclass(frozen=True)
class StateChanged:
    t: float
    mode: SessionMode


SessionEvent = MoveRequested | StopRequested | StateChanged


@dataclass(frozen=True)
class WatchdogConfig:
    heartbeat_timeout_ms: float = 200.0

    def __post_init__(self) -> None:
        if self.heartbeat_timeout_ms <= 10.0:  # must exceed sample period
            raise ValueError("heartbeat timeout must exceed the sample period")


def classify_left(s: AccelSample) -> LeftPosture:
    """Left-arm posture from one sample. STOP has priority over START."""
    if s.arm is not Arm.LEFT:
        raise ValueError("classify_left requires a left-arm sample")
    if s.az >= DOMINANT_G and abs(s.ax) <= OFF_AXIS_G and abs(s.ay) <= OFF_AXIS_G:
        return LeftPosture.STOP
    if s.ax <= -DOMINANT_G and abs(s.ay) <= OFF_AXIS_G and abs(s.az) <= OFF_AXIS_G:
        return LeftPosture.START
    return LeftPosture.INDETERMINATE


def classify_right_static(s: AccelSample) -> GestureClass | None:
    """Analytic posture read of the right arm; diagnostics and test oracle
    only. The trained network is authoritative in the session loop.
    """
    if s.arm is not Arm.RIGHT:
        raise ValueError("classify_right_static requires a right-arm sample")
    if s.ax <= -DOMINANT_G and abs(s.ay) <= OFF_AXIS_G and abs(s.az) <= OFF_AXIS_G:
        return GestureClass.RYN
    if s.ax >= DOMINANT_G and abs(s.ay) <= OFF_AXIS_G and abs(s.az) <= OFF_AXIS_G:
        return GestureClass.RYP
    if s.ay <= -DOMINANT_G and abs(s.ax) <= OFF_AXIS_G and abs(s.az) <= OFF_AXIS_G:
        return GestureClass.RXN
    if s.ay >= DOMINANT_G and abs(s.ax) <= OFF_AXIS_G and abs(s.az) <= OFF_AXIS_G:
        return GestureClass.RXP
    return None


def classifier_from_model(model: MlpModel) -> Callable[[np.ndarray], GestureClass]:
    """Standard classifier callable: raw g window -> GestureClass."""

    def _classify(window: np.ndarray) -> GestureClass:
        return classify(model, normalize_window(window))

    return _classify


class Session:
    """Single-writer session FSM.

    classifier maps a raw 9-component window (g units, arrival order) to a
    GestureClass; pose_provider reports the robot pose increments are
    computed against. posture_debounce > 1 requires that many consecutive
    identical left postures before a START transition fires; STOP is never
    debounced (safety rule: same-call stop).
    """

    def __init__(
        self,
        classifier: Callable[[np.ndarray], GestureClass],
        workspace: geometry.Workspace,
        pose_provider: Callable[[], geometry.Pose],
        watchdog: WatchdogConfig | None = None,
        posture_debounce: int = 1,
        start_time_ms: float = 0.0,
    ):
        if posture_debounce < 1:
            raise ValueError("posture_debounce must be >= 1")
        self._classifier = classifier
        self._workspace = workspace
        self._pose_provider = pose_provider
        self._watchdog = watchdog or WatchdogConfig()
        self._debounce = posture_debounce

        self.mode = SessionMode.IDLE
        self.active_class: GestureClass | None = None
        self.last_left_t = start_time_ms
        self.dropped_samples = 0
        self._window: list[AccelSample] = []
        self._last_t: dict[Arm, float] = {}
        self._start_run = 0  # consecutive START-classified left samples
        self._activation_t: float | None = None

    @property
    def window(self) -> tuple[AccelSample, ...]:
        return tuple(self._window)

    def ingest(self, s: AccelSample) -> list[SessionEvent]:
        last = self._last_t.get(s.arm)
        if last is not None and s.t <= last:
            self.dropped_samples += 1
            return []
        self._last_t[s.arm] = s.t

        if s.arm is Arm.LEFT:
            return self._ingest_left(s)
        return self._ingest_right(s)

    def _ingest_left(self, s: AccelSample) -> list[SessionEvent]:
        self.last_left_t = s.t
        posture = classify_left(s)
        events: list[SessionEvent] = []

        if posture is LeftPosture.STOP:
            self._start_run = 0
            # Operator stop is unconditional and never debounced.
            events.append(StopRequested(s.t, StopReason.OPERATOR))
            if self.mode is not SessionMode.IDLE:
                self._to_idle()
                events.append(StateChanged(s.t, SessionMode.IDLE))
            return events

        if posture is LeftPosture.START:
            self._start_run += 1
            if self.mode is SessionMode.IDLE and self._start_run >= self._debounce:
                self.mode = SessionMode.CAPTURING
                self._window = []
                self._activation_t = s.t
                events.append(StateChanged(s.t, SessionMode.CAPTURING))
            return events

        self._start_run = 0
        return events

    def _ingest_right(self, s: AccelSample) -> list[SessionEvent]:
        if self.mode is not SessionMode.CAPTURING:
            return []  # pre-activation or mid-move right samples are ignored
        self._window.append(s)
        if len(self._window) < WINDOW_SIZE:
            return []

        raw = np.array(
            [v for smp in self._window for v in (smp.ax, smp.ay, smp.az)],
            dtype=np.float64,
        )
        cls = self._classifier(raw)
        events: list[SessionEvent] = []
        if cls is GestureClass.UNKNOWN:
            self._to_idle()
            events.append(StopRequested(s.t, StopReason.UNKNOWN_GESTURE))
            events.append(StateChanged(s.t, SessionMode.IDLE))
            return events

        try:
            increment = geometry.increment_for(
                self._pose_provider(), class_to_direction(cls), self._workspace
            )
        except geometry.WorkspaceError:
            # recognized but unrealizable from the current pose (e.g. pinned
            # on the boundary along that axis): same fail-safe as UNKNOWN
            self._to_idle()
            events.append(StopRequested(s.t, StopReason.UNKNOWN_GESTURE))
            events.append(StateChanged(s.t, SessionMode.IDLE))
            return events
        self.mode = SessionMode.MOVING
        self.active_class = cls
        self._window = []
        events.append(MoveRequested(s.t, cls, increment))
        events.append(StateChanged(s.t, SessionMode.MOVING))
        return events

    def watchdog_tick(self, now_ms: float) -> list[SessionEvent]:
        """Stop on left-arm heartbeat silence; no-op while IDLE."""
        if self.mode is SessionMode.IDLE:
            return []
        if now_ms - self.last_left_t > self._watchdog.heartbeat_timeout_ms:
            self._to_idle()
            return [
                StopRequested(now_ms, StopReason.WATCHDOG),
                StateChanged(now_ms, SessionMode.IDLE),
            ]
        return []

    def _to_idle(self) -> None:
        self.mode = SessionMode.IDLE
        self.active_class = None
        self._window = []
        self._start_run = 0
        self._activation_t = None

    @property
    def activation_t(self) -> float | None:
        """Timestamp of the START edge that opened the current capture."""
        return self._activation_t
