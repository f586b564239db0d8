"""Seeded synthetic accelerometer streams for all gesture classes.

Real arms are replaced by a signal family built from three ingredients: a
rising sine acceleration profile for dynamic gestures, a smooth gravity
rotation for static postures, and a tangential two-axis signature for Z
rotations. Streams are emitted at exactly 100 Hz and are deterministic per
seed, so datasets, evaluations, and replay files reproduce byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .frames import AccelSample, Arm
from .gestures import (
    RZ_CLASSES,
    STATIC_POSTURE_CLASSES,
    TRAINABLE_CLASSES,
    TRANSLATION_CLASSES,
    GestureClass,
)
from .session import LeftPosture

__all__ = [
    "SAMPLE_PERIOD_MS",
    "SLERP_MS",
    "ACTIVATION_PHASE",
    "PEAK_RANGE",
    "RISE_RANGE",
    "RZ_AMPLITUDE_FACTOR",
    "SynthParams",
    "LabeledTrace",
    "synth_translation",
    "synth_rotation",
    "synth_rz",
    "synth_left",
    "synth_trace",
    "scenario",
    "extract_window",
    "gesture_injection_frames",
    "synth_dataset",
]

SAMPLE_PERIOD_MS = 10.0  # 100 Hz stream
SLERP_MS = 100.0         # gravity-rotation transition length
# The simulated operator activates once the gesture is visibly underway:
# the left START edge lags gesture onset by this fraction of the rise time
# (rounded up to the sample grid), so capture windows sit at a similar
# profile phase regardless of how slow the particular gesture is.
ACTIVATION_PHASE = 0.2
RZ_AMPLITUDE_FACTOR = 0.6
PEAK_RANGE = (0.5, 1.5)
RISE_RANGE = (200.0, 400.0)

_GRAVITY_TARGETS: dict[GestureClass, tuple[float, float, float]] = {
    GestureClass.RYN: (-1.0, 0.0, 0.0),
    GestureClass.RYP: (+1.0, 0.0, 0.0),
    GestureClass.RXN: (0.0, -1.0, 0.0),
    GestureClass.RXP: (0.0, +1.0, 0.0),
}

_LEFT_TARGETS: dict[LeftPosture, tuple[float, float, float]] = {
    LeftPosture.START: (-1.0, 0.0, 0.0),
    LeftPosture.STOP: (0.0, 0.0, 1.0),
}

_TRANSLATION_AXES: dict[GestureClass, tuple[int, float]] = {
    GestureClass.XP: (0, +1.0),
    GestureClass.XN: (0, -1.0),
    GestureClass.YP: (1, +1.0),
    GestureClass.YN: (1, -1.0),
    GestureClass.ZP: (2, +1.0),
    GestureClass.ZN: (2, -1.0),
}


@dataclass(frozen=True)
class SynthParams:
    peak_accel: float = 1.0      # g, jitter range PEAK_RANGE
    rise_time_ms: float = 300.0  # ms, jitter range RISE_RANGE
    noise_sigma: float = 0.05    # g, i.i.d. Gaussian per axis
    gravity: float = 1.0         # g, along world Z
    seed: int = 0

    def __post_init__(self) -> None:
        if self.peak_accel <= 0:
            raise ValueError("peak_accel must be > 0")
        if self.rise_time_ms <= 0:
            raise ValueError("rise_time_ms must be > 0")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")


@dataclass(frozen=True)
class LabeledTrace:
    label: GestureClass | LeftPosture
    samples: tuple[AccelSample, ...]


def _rng_for(p: SynthParams, rng: np.random.Generator | None) -> np.random.Generator:
    return rng if rng is not None else np.random.default_rng(p.seed)


def _grid(end_ms: float, start_ms: float = 0.0) -> list[float]:
    n = int(math.floor((end_ms - start_ms) / SAMPLE_PERIOD_MS))
    return [start_ms + i * SAMPLE_PERIOD_MS for i in range(n + 1)]


def _emit(arm: Arm, t: float, value: tuple[float, float, float],
          sigma: float, rng: np.random.Generator) -> AccelSample:
    # standard normals scaled by sigma: the draw stream is identical across
    # sigma values, so sigma only scales noise, never reorders jitter draws
    noise = rng.normal(0.0, 1.0, 3)
    return AccelSample(t, arm,
                       value[0] + sigma * noise[0],
                       value[1] + sigma * noise[1],
                       value[2] + sigma * noise[2])


def _rise_q(t: float, rise_ms: float) -> float:
    return math.sin(math.pi * t / (2.0 * rise_ms))


def _translation_value(cls: GestureClass, t: float, p: SynthParams
                       ) -> tuple[float, float, float]:
    axis, sign = _TRANSLATION_AXES[cls]
    v = [0.0, 0.0, 0.0]
    if t <= p.rise_time_ms:
        v[axis] = sign * p.peak_accel * _rise_q(t, p.rise_time_ms)
    v[2] += p.gravity
    return (v[0], v[1], v[2])


def _rz_value(cls: GestureClass, t: float, p: SynthParams
              ) -> tuple[float, float, float]:
    a = RZ_AMPLITUDE_FACTOR * p.peak_accel
    q = _rise_q(t, p.rise_time_ms) if t <= p.rise_time_ms else 0.0
    if cls is GestureClass.RZP:
        return (-a * q, +a * q, p.gravity)
    return (+a * q, -a * q, p.gravity)


def _slerp_value(target: tuple[float, float, float], t: float,
                 gravity: float) -> tuple[float, float, float]:
    # smooth 90 degree swing from world-Z gravity toward a horizontal target
    if target[2] != 0.0:  # already at rest along gravity, nothing to swing
        return (gravity * target[0], gravity * target[1], gravity * target[2])
    if t >= SLERP_MS:
        u = 1.0
    else:
        u = t / SLERP_MS
        u = u * u * (3.0 - 2.0 * u)
    angle = 0.5 * math.pi * u
    s, c = math.sin(angle), math.cos(angle)
    return (gravity * s * target[0], gravity * s * target[1], gravity * c)


def synth_translation(cls: GestureClass, p: SynthParams,
                      rng: np.random.Generator | None = None) -> LabeledTrace:
    """Rising-phase translation trace: a(t) = s*peak*sin(pi*t/(2*rise)) on
    the active axis for t in [0, rise], gravity on az, then noise.
    """
    if cls not in TRANSLATION_CLASSES:
        raise ValueError(f"{cls.name} is not a translation class")
    rng = _rng_for(p, rng)
    samples = tuple(
        _emit(Arm.RIGHT, t, _translation_value(cls, t, p), p.noise_sigma, rng)
        for t in _grid(p.rise_time_ms)
    )
    return LabeledTrace(cls, samples)


def synth_rotation(cls: GestureClass, p: SynthParams,
                   rng: np.random.Generator | None = None,
                   duration_ms: float = 300.0) -> LabeledTrace:
    """Static posture trace: gravity slerps to the posture's resting
    direction over 100 ms, then holds.
    """
    if cls not in STATIC_POSTURE_CLASSES:
        raise ValueError(f"{cls.name} is not a static posture class")
    rng = _rng_for(p, rng)
    target = _GRAVITY_TARGETS[cls]
    samples = tuple(
        _emit(Arm.RIGHT, t, _slerp_value(target, t, p.gravity),
              p.noise_sigma, rng)
        for t in _grid(duration_ms)
    )
    return LabeledTrace(cls, samples)


def synth_rz(cls: GestureClass, p: SynthParams,
             rng: np.random.Generator | None = None) -> LabeledTrace:
    """Z-rotation trace: tangential signature in the x-y plane with
    amplitude 0.6*peak on both axes, gravity unchanged on az.
    """
    if cls not in RZ_CLASSES:
        raise ValueError(f"{cls.name} is not a Z-rotation class")
    rng = _rng_for(p, rng)
    samples = tuple(
        _emit(Arm.RIGHT, t, _rz_value(cls, t, p), p.noise_sigma, rng)
        for t in _grid(p.rise_time_ms)
    )
    return LabeledTrace(cls, samples)


def synth_left(posture: LeftPosture, p: SynthParams,
               rng: np.random.Generator | None = None,
               duration_ms: float = 300.0, settled: bool = False) -> LabeledTrace:
    """Left-arm posture trace (START or STOP), slerped from horizontal
    unless settled=True.
    """
    if posture not in _LEFT_TARGETS:
        raise ValueError("left posture must be START or STOP")
    rng = _rng_for(p, rng)
    target = _LEFT_TARGETS[posture]
    samples = tuple(
        _emit(
            Arm.LEFT, t,
            (target[0] * p.gravity, target[1] * p.gravity, target[2] * p.gravity)
            if settled else _slerp_value(target, t, p.gravity),
            p.noise_sigma, rng,
        )
        for t in _grid(duration_ms)
    )
    return LabeledTrace(posture, samples)


def synth_trace(label: GestureClass, p: SynthParams,
                rng: np.random.Generator | None = None) -> LabeledTrace:
    if label in TRANSLATION_CLASSES:
        return synth_translation(label, p, rng)
    if label in STATIC_POSTURE_CLASSES:
        return synth_rotation(label, p, rng)
    if label in RZ_CLASSES:
        return synth_rz(label, p, rng)
    raise ValueError(f"cannot synthesize {label!r}")


def _right_value(cls: GestureClass, t: float, p: SynthParams
                 ) -> tuple[float, float, float]:
    if cls in TRANSLATION_CLASSES:
        return _translation_value(cls, t, p)
    if cls in RZ_CLASSES:
        return _rz_value(cls, t, p)
    return _slerp_value(_GRAVITY_TARGETS[cls], t, p.gravity)


def scenario(cls: GestureClass, p: SynthParams,
             rng: np.random.Generator | None = None,
             hold_ms: float = 10_000.0,
             stop_tail_ms: float = 100.0) -> list[AccelSample]:
    """Full dual-arm sample stream for one gesture.

    The right arm performs the gesture from t=0 (dynamic classes) or settles
    into the posture (slerp then hold). The left arm holds a settled START
    posture beginning at ACTIVATION_PHASE of the rise time (dynamic) or just
    after the posture transition completes (static), keeping the session
    armed for hold_ms, then holds STOP for stop_tail_ms. Within one timestamp the
    right-arm sample precedes the left-arm sample, so right samples at the
    activation instant are pre-edge and discarded by the session.
    """
    if cls not in TRAINABLE_CLASSES:
        raise ValueError(f"cannot build a scenario for {cls!r}")
    rng = _rng_for(p, rng)
    sigma = p.noise_sigma
    if cls in STATIC_POSTURE_CLASSES:
        left_t0 = SLERP_MS + SAMPLE_PERIOD_MS
    else:
        left_t0 = SAMPLE_PERIOD_MS * math.ceil(
            ACTIVATION_PHASE * p.rise_time_ms / SAMPLE_PERIOD_MS
        )
    end = hold_ms + stop_tail_ms

    right: list[AccelSample] = [
        _emit(Arm.RIGHT, t, _right_value(cls, t, p), sigma, rng)
        for t in _grid(end)
    ]
    start_v = _LEFT_TARGETS[LeftPosture.START]
    stop_v = _LEFT_TARGETS[LeftPosture.STOP]
    left: list[AccelSample] = [
        _emit(Arm.LEFT, t,
              (start_v[0] * p.gravity, start_v[1] * p.gravity, start_v[2] * p.gravity),
              sigma, rng)
        for t in _grid(hold_ms, left_t0)
    ]
    if stop_tail_ms > 0:
        left.extend(
            _emit(Arm.LEFT, t,
                  (stop_v[0] * p.gravity, stop_v[1] * p.gravity, stop_v[2] * p.gravity),
                  sigma, rng)
            for t in _grid(end, hold_ms + SAMPLE_PERIOD_MS)
        )

    merged = right + left
    merged.sort(key=lambda s: (s.t, 0 if s.arm is Arm.RIGHT else 1))
    return merged


def extract_window(samples: Iterable[AccelSample]) -> np.ndarray:
    """Raw 9-component feature window, extracted by running the actual
    session machinery over the stream (single source of truth for the
    window rule).
    """
    from . import geometry
    from .session import Session

    captured: list[np.ndarray] = []

    def probe(window: np.ndarray) -> GestureClass:
        captured.append(np.array(window, dtype=np.float64))
        return GestureClass.UNKNOWN

    sess = Session(probe, geometry.Workspace(),
                   lambda: geometry.Pose((1000.0, 0.0, 0.0)))
    for s in samples:
        sess.ingest(s)
        if captured:
            break
    if not captured:
        raise ValueError("stream contains no completed capture window")
    return captured[0]


def gesture_injection_frames(cls: GestureClass, p: SynthParams,
                             rng: np.random.Generator | None = None,
                             count: int = 20) -> list[AccelSample]:
    """Right-arm frames for UI-triggered injection into a live session.

    A live operator has already armed the session before the virtual gesture
    begins, so the stream starts at the phase a scenario window would cover
    (everything before the simulated activation edge is skipped); the first
    three frames then match the training window distribution.
    """
    rng = _rng_for(p, rng)
    if cls in STATIC_POSTURE_CLASSES:
        skip_after = SLERP_MS
    else:
        skip_after = SAMPLE_PERIOD_MS * math.ceil(
            ACTIVATION_PHASE * p.rise_time_ms / SAMPLE_PERIOD_MS
        )
    end = skip_after + (count + 1) * SAMPLE_PERIOD_MS
    frames = [
        _emit(Arm.RIGHT, t, _right_value(cls, t, p), p.noise_sigma, rng)
        for t in _grid(end)
        if t > skip_after
    ]
    return frames[:count]


def synth_dataset(n_per_class: int, p: SynthParams,
                  rng: np.random.Generator | None = None
                  ) -> tuple[np.ndarray, np.ndarray]:
    """Raw windows and labels, n_per_class examples per class in class
    order, peak/rise jittered uniformly within their ranges. Deterministic
    per seed.
    """
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    rng = _rng_for(p, rng)
    rows: list[np.ndarray] = []
    labels: list[int] = []
    for cls in TRAINABLE_CLASSES:
        for _ in range(n_per_class):
            jittered = replace(
                p,
                peak_accel=rng.uniform(*PEAK_RANGE),
                rise_time_ms=rng.uniform(*RISE_RANGE),
            )
            stream = scenario(cls, jittered, rng, hold_ms=160.0, stop_tail_ms=0.0)
            rows.append(extract_window(stream))
            labels.append(cls.value)
    return np.array(rows), np.array(labels, dtype=np.int64)
