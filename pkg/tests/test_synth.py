"""Synthetic signal family: profiles, determinism, and separability."""

from __future__ import annotations

import math

import numpy as np
import pytest

from gestibot.classifier import normalize_window
from gestibot.frames import Arm
from gestibot.gestures import TRAINABLE_CLASSES, GestureClass
from gestibot.session import LeftPosture, classify_left
from gestibot.synth import (
    ACTIVATION_PHASE,
    SAMPLE_PERIOD_MS,
    SLERP_MS,
    SynthParams,
    extract_window,
    gesture_injection_frames,
    scenario,
    synth_dataset,
    synth_left,
    synth_rotation,
    synth_rz,
    synth_trace,
    synth_translation,
)

from oracles import centroid_fit, centroid_predict

QUIET = SynthParams(noise_sigma=0.0, seed=0)


def sample_at(trace, t: float):
    for s in trace.samples:
        if s.t == t:
            return s
    raise AssertionError(f"no sample at t={t}")


# -- translation profiles -----------------------------------------------------

def test_xp_profile_value_at_10ms():
    trace = synth_translation(GestureClass.XP, QUIET)
    s = sample_at(trace, 10.0)
    assert s.ax == pytest.approx(math.sin(math.pi / 60.0), abs=1e-12)
    assert s.ax == pytest.approx(0.05234, abs=5e-6)
    assert s.ay == 0.0
    assert s.az == 1.0


def test_zn_profile_value_at_150ms():
    trace = synth_translation(GestureClass.ZN, QUIET)
    s = sample_at(trace, 150.0)
    assert s.az == pytest.approx(1.0 - math.sin(math.pi / 4.0), abs=1e-12)
    assert s.az == pytest.approx(0.29289, abs=5e-6)
    assert s.ax == 0.0 and s.ay == 0.0


def test_every_quiet_trace_starts_at_rest_gravity():
    for cls in TRAINABLE_CLASSES:
        trace = synth_trace(cls, QUIET)
        first = trace.samples[0]
        assert first.t == 0.0
        assert (first.ax, first.ay, first.az) == (0.0, 0.0, 1.0)


def test_peak_scales_the_profile():
    p = SynthParams(peak_accel=1.4, noise_sigma=0.0, seed=0)
    trace = synth_translation(GestureClass.YP, p)
    s = sample_at(trace, 300.0)  # sin(pi/2) = 1 at the rise time
    assert s.ay == pytest.approx(1.4, abs=1e-12)


def test_translation_rejects_wrong_class():
    with pytest.raises(ValueError):
        synth_translation(GestureClass.RZP, QUIET)


# -- static posture profiles ----------------------------------------------------

@pytest.mark.parametrize("cls,expected", [
    (GestureClass.RYN, (-1.0, 0.0, 0.0)),
    (GestureClass.RYP, (+1.0, 0.0, 0.0)),
    (GestureClass.RXN, (0.0, -1.0, 0.0)),
    (GestureClass.RXP, (0.0, +1.0, 0.0)),
])
def test_posture_settles_on_its_gravity_direction(cls, expected):
    trace = synth_rotation(cls, QUIET)
    for s in trace.samples:
        if s.t >= SLERP_MS:
            assert (s.ax, s.ay, s.az) == pytest.approx(expected, abs=1e-12)


def test_posture_transition_midpoint_is_a_45_degree_swing():
    trace = synth_rotation(GestureClass.RYN, QUIET)
    s = sample_at(trace, 50.0)  # smoothstep(0.5) = 0.5 -> 45 degrees
    assert s.ax == pytest.approx(-math.sqrt(0.5), abs=1e-12)
    assert s.az == pytest.approx(math.sqrt(0.5), abs=1e-12)


def test_rotation_rejects_wrong_class():
    with pytest.raises(ValueError):
        synth_rotation(GestureClass.XP, QUIET)


# -- z-rotation profiles ----------------------------------------------------------

def test_rzp_signature_at_rise_time():
    trace = synth_rz(GestureClass.RZP, QUIET)
    s = sample_at(trace, 300.0)
    assert (s.ax, s.ay, s.az) == pytest.approx((-0.6, 0.6, 1.0), abs=1e-12)


def test_rzn_mirrors_rzp():
    pos = synth_rz(GestureClass.RZP, QUIET)
    neg = synth_rz(GestureClass.RZN, QUIET)
    for a, b in zip(pos.samples, neg.samples):
        assert b.ax == pytest.approx(-a.ax, abs=1e-12)
        assert b.ay == pytest.approx(-a.ay, abs=1e-12)
        assert b.az == a.az


def test_rz_gravity_axis_stays_level():
    for cls in (GestureClass.RZP, GestureClass.RZN):
        trace = synth_rz(cls, QUIET)
        mean_az = np.mean([s.az for s in trace.samples])
        assert abs(mean_az - 1.0) <= 0.02


def test_rz_rejects_wrong_class():
    with pytest.raises(ValueError):
        synth_rz(GestureClass.RXP, QUIET)


# -- common stream properties ------------------------------------------------------

def test_sample_spacing_is_exactly_10ms():
    for cls in TRAINABLE_CLASSES:
        trace = synth_trace(cls, SynthParams(seed=5))
        ts = [s.t for s in trace.samples]
        diffs = np.diff(ts)
        assert np.all(diffs == SAMPLE_PERIOD_MS)


def test_traces_are_deterministic_per_seed():
    p = SynthParams(noise_sigma=0.05, seed=17)
    a = synth_trace(GestureClass.YN, p)
    b = synth_trace(GestureClass.YN, p)
    assert a.samples == b.samples


def test_noise_stream_is_aligned_across_sigma():
    # sigma only scales the same underlying draws, it never reorders them
    v0 = np.array([(s.ax, s.ay, s.az) for s in
                   synth_trace(GestureClass.XP, SynthParams(noise_sigma=0.0, seed=9)).samples])
    v1 = np.array([(s.ax, s.ay, s.az) for s in
                   synth_trace(GestureClass.XP, SynthParams(noise_sigma=0.1, seed=9)).samples])
    v2 = np.array([(s.ax, s.ay, s.az) for s in
                   synth_trace(GestureClass.XP, SynthParams(noise_sigma=0.2, seed=9)).samples])
    assert np.allclose((v2 - v0), 2.0 * (v1 - v0), atol=1e-12)


def test_synth_params_validation():
    with pytest.raises(ValueError):
        SynthParams(peak_accel=0.0)
    with pytest.raises(ValueError):
        SynthParams(rise_time_ms=0.0)
    with pytest.raises(ValueError):
        SynthParams(noise_sigma=-0.1)


# -- left-arm postures ---------------------------------------------------------------

def test_left_traces_classify_correctly_after_the_transition():
    for posture in (LeftPosture.START, LeftPosture.STOP):
        good = 0
        total = 0
        for seed in range(5):
            p = SynthParams(noise_sigma=0.1, seed=seed)
            trace = synth_left(posture, p, duration_ms=2000.0)
            for s in trace.samples:
                if s.t < SLERP_MS:
                    continue
                total += 1
                if classify_left(s) is posture:
                    good += 1
        assert good / total >= 0.99


def test_left_settled_trace_skips_the_transition():
    trace = synth_left(LeftPosture.START, QUIET, settled=True)
    s = trace.samples[0]
    assert (s.ax, s.ay, s.az) == (-1.0, 0.0, 0.0)
    assert trace.samples[0].arm is Arm.LEFT


def test_left_rejects_indeterminate():
    with pytest.raises(ValueError):
        synth_left(LeftPosture.INDETERMINATE, QUIET)


# -- scenario / window extraction ------------------------------------------------------

def test_scenario_activation_edge_is_phase_locked_to_the_rise():
    stream = scenario(GestureClass.XP, QUIET, hold_ms=400.0, stop_tail_ms=0.0)
    left_ts = [s.t for s in stream if s.arm is Arm.LEFT]
    expected_t0 = SAMPLE_PERIOD_MS * math.ceil(
        ACTIVATION_PHASE * QUIET.rise_time_ms / SAMPLE_PERIOD_MS
    )
    assert left_ts[0] == expected_t0 == 60.0


def test_scenario_posture_activation_waits_for_the_transition():
    stream = scenario(GestureClass.RYP, QUIET, hold_ms=400.0, stop_tail_ms=0.0)
    left_ts = [s.t for s in stream if s.arm is Arm.LEFT]
    assert left_ts[0] == SLERP_MS + SAMPLE_PERIOD_MS


def test_scenario_orders_right_before_left_within_a_timestamp():
    stream = scenario(GestureClass.XP, QUIET, hold_ms=300.0, stop_tail_ms=0.0)
    keys = [(s.t, 0 if s.arm is Arm.RIGHT else 1) for s in stream]
    assert keys == sorted(keys)


def test_scenario_window_matches_the_closed_form_profile():
    stream = scenario(GestureClass.XP, QUIET, hold_ms=400.0, stop_tail_ms=0.0)
    window = extract_window(stream)
    # activation at 60 ms: the window is the samples at 70, 80, 90 ms
    expected = []
    for t in (70.0, 80.0, 90.0):
        expected += [math.sin(math.pi * t / 600.0), 0.0, 1.0]
    assert window == pytest.approx(expected, abs=1e-12)


def test_scenario_includes_an_operator_stop_tail():
    stream = scenario(GestureClass.XP, QUIET, hold_ms=300.0, stop_tail_ms=100.0)
    tail = [s for s in stream if s.arm is Arm.LEFT and s.t > 300.0]
    assert tail, "expected STOP samples after the hold"
    assert all(classify_left(s) is LeftPosture.STOP for s in tail)


def test_scenario_rejects_unknown():
    with pytest.raises(ValueError):
        scenario(GestureClass.UNKNOWN, QUIET)


def test_extract_window_requires_a_completed_capture():
    stream = scenario(GestureClass.XP, QUIET, hold_ms=400.0, stop_tail_ms=0.0)
    left_only = [s for s in stream if s.arm is Arm.LEFT]
    with pytest.raises(ValueError):
        extract_window(left_only)


def test_injection_frames_match_the_scenario_window():
    frames = gesture_injection_frames(GestureClass.XP, QUIET, count=10)
    assert len(frames) == 10
    assert all(f.arm is Arm.RIGHT for f in frames)
    stream = scenario(GestureClass.XP, QUIET, hold_ms=400.0, stop_tail_ms=0.0)
    window = extract_window(stream)
    first_three = [v for f in frames[:3] for v in (f.ax, f.ay, f.az)]
    assert first_three == pytest.approx(list(window), abs=1e-12)


# -- datasets ----------------------------------------------------------------------------

def test_dataset_counts_and_balance():
    windows, labels = synth_dataset(3, SynthParams(seed=7))
    assert windows.shape == (36, 9)
    assert labels.shape == (36,)
    for cls in TRAINABLE_CLASSES:
        assert np.sum(labels == cls.value) == 3


def test_dataset_is_deterministic_per_seed():
    p = SynthParams(seed=7)
    w1, l1 = synth_dataset(4, p)
    w2, l2 = synth_dataset(4, p)
    assert np.array_equal(w1, w2)
    assert np.array_equal(l1, l2)


def test_dataset_rejects_nonpositive_counts():
    with pytest.raises(ValueError):
        synth_dataset(0, QUIET)


def test_quiet_class_means_are_separated():
    windows, labels = synth_dataset(30, SynthParams(noise_sigma=0.0, seed=11))
    X = normalize_window(windows)
    means = np.stack([X[labels == c.value].mean(axis=0)
                      for c in TRAINABLE_CLASSES])
    min_sep = min(
        float(np.linalg.norm(means[i] - means[j]))
        for i in range(12) for j in range(i + 1, 12)
    )
    assert min_sep > 0.1


def test_quiet_dataset_is_perfectly_separable_by_centroids():
    windows, labels = synth_dataset(30, SynthParams(noise_sigma=0.0, seed=11))
    X = normalize_window(windows)
    pred = centroid_predict(centroid_fit(X, labels), X)
    assert np.array_equal(pred, labels)
