"""Recognition-rate evaluation over freshly synthesized gesture scenarios."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .classifier import MlpModel, classify, normalize_window
from .gestures import (
    RZ_CLASSES,
    STATIC_POSTURE_CLASSES,
    TRAINABLE_CLASSES,
    TRANSLATION_CLASSES,
    GestureClass,
)
from .synth import PEAK_RANGE, RISE_RANGE, SynthParams, extract_window, scenario

__all__ = [
    "EvalReport",
    "run_eval",
    "format_table",
    "format_confusion",
    "report_to_json",
]

N_CLASSES = len(TRAINABLE_CLASSES)


@dataclass
class EvalReport:
    """Recognition rates plus the full confusion matrix.

    confusion has 13 rows (predicted class, UNKNOWN last) and 12 columns
    (true class); each column sums to trials_per_class.
    """

    trials_per_class: int
    confusion: np.ndarray
    per_class_rate: dict[str, float]  # percent
    mean_rate: float                  # percent, unweighted over 12 classes

    def group_rate(self, classes) -> float:
        return float(np.mean([self.per_class_rate[c.name] for c in classes]))

    @property
    def translations_rate(self) -> float:
        return self.group_rate(sorted(TRANSLATION_CLASSES))

    @property
    def postures_rate(self) -> float:
        return self.group_rate(sorted(STATIC_POSTURE_CLASSES))

    @property
    def rz_rate(self) -> float:
        return self.group_rate(sorted(RZ_CLASSES))


def run_eval(model: MlpModel, trials_per_class: int = 100,
             params: SynthParams | None = None,
             progress: Callable[[int, int], None] | None = None) -> EvalReport:
    """Synthesize trials_per_class fresh scenarios per class (jittered like
    training data), run the full window-extraction + classification path,
    and tabulate rates. Deterministic for a given model and params.seed.
    """
    if trials_per_class < 1:
        raise ValueError("trials_per_class must be >= 1")
    p = params or SynthParams()
    rng = np.random.default_rng(p.seed)
    confusion = np.zeros((N_CLASSES + 1, N_CLASSES), dtype=np.int64)
    total = N_CLASSES * trials_per_class
    done = 0
    for cls in TRAINABLE_CLASSES:
        for _ in range(trials_per_class):
            jittered = replace(
                p,
                peak_accel=rng.uniform(*PEAK_RANGE),
                rise_time_ms=rng.uniform(*RISE_RANGE),
            )
            stream = scenario(cls, jittered, rng, hold_ms=160.0,
                              stop_tail_ms=0.0)
            try:
                window = extract_window(stream)
            except ValueError:
                # no capture window formed (possible at extreme noise):
                # the gesture was never recognized
                pred = GestureClass.UNKNOWN
            else:
                pred = classify(model, normalize_window(window))
            confusion[pred.value, cls.value] += 1
            done += 1
            if progress is not None:
                progress(done, total)

    rates = {
        cls.name: 100.0 * confusion[cls.value, cls.value] / trials_per_class
        for cls in TRAINABLE_CLASSES
    }
    return EvalReport(
        trials_per_class=trials_per_class,
        confusion=confusion,
        per_class_rate=rates,
        mean_rate=float(np.mean(list(rates.values()))),
    )


def format_table(report: EvalReport) -> str:
    """Per-class recognition table (synthetic analog, not human-subject
    data) followed by group and mean rows.
    """
    lines = [
        f"Synthetic recognition analog ({report.trials_per_class} trials/class)",
        "",
        "Class   Rate %",
        "-----   ------",
    ]
    for cls in TRAINABLE_CLASSES:
        lines.append(f"{cls.name:<7s} {report.per_class_rate[cls.name]:6.1f}")
    lines.append("-----   ------")
    lines.append(f"{'Mean':<7s} {report.mean_rate:6.1f}")
    lines.append("")
    lines.append(
        f"groups: postures {report.postures_rate:.1f}  "
        f"translations {report.translations_rate:.1f}  "
        f"rz {report.rz_rate:.1f}"
    )
    return "\n".join(lines)


def format_confusion(report: EvalReport) -> str:
    """Confusion matrix, rows = predicted (UNKNOWN last), cols = true."""
    names = [c.name for c in TRAINABLE_CLASSES]
    head = "pred\\true " + " ".join(f"{n:>4s}" for n in names)
    lines = [head]
    row_names = names + [GestureClass.UNKNOWN.name]
    for i, rname in enumerate(row_names):
        row = " ".join(f"{int(v):>4d}" for v in report.confusion[i])
        lines.append(f"{rname:<9s} {row}")
    return "\n".join(lines)


def report_to_json(report: EvalReport) -> str:
    obj = {
        "trials_per_class": report.trials_per_class,
        "labels": [c.name for c in TRAINABLE_CLASSES],
        "predicted_labels": [c.name for c in TRAINABLE_CLASSES]
        + [GestureClass.UNKNOWN.name],
        "confusion": report.confusion.tolist(),
        "per_class_rate": report.per_class_rate,
        "mean_rate": report.mean_rate,
        "group_rates": {
            "postures": report.postures_rate,
            "translations": report.translations_rate,
            "rz": report.rz_rate,
        },
    }
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
