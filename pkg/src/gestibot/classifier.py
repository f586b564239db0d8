"""Gesture network: a 9-10-12 sigmoid MLP trained by per-example backprop.

The feature vector is one capture window (three consecutive right-arm
acceleration samples, nine components) normalized from g units into [-1, 1].
Each output unit scores one gesture class; a prediction below threshold on
every unit is rejected as UNKNOWN.
"""

from __future__ import annotations

import struct
import time
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .gestures import TRAINABLE_CLASSES, GestureClass

__all__ = [
    "N_INPUT",
    "N_HIDDEN",
    "N_OUTPUT",
    "FULL_SCALE_G",
    "SCORE_THRESHOLD",
    "MlpModel",
    "Gradients",
    "TrainingReport",
    "ModelFormatError",
    "GestureNet",
    "sigmoid",
    "normalize_window",
    "init_model",
    "forward",
    "forward_batch",
    "example_error",
    "gradients",
    "train_step",
    "classify",
    "classify_scores",
    "save_model",
    "load_model",
    "save_model_file",
    "load_model_file",
]

N_INPUT = 9
N_HIDDEN = 10
N_OUTPUT = 12

FULL_SCALE_G = 3.0  # sensor full scale; features are clipped to +-1 of this
SCORE_THRESHOLD = 0.5

_MAGIC = b"GMLP"
_VERSION = 1
_HEADER = struct.Struct("<4sHHHH")


class ModelFormatError(ValueError):
    """Raised when serialized model bytes are malformed."""


@dataclass
class MlpModel:
    """Weights of the 9-10-12 network, float64 throughout."""

    w_hidden: np.ndarray  # (N_HIDDEN, N_INPUT)
    b_hidden: np.ndarray  # (N_HIDDEN,)
    w_out: np.ndarray     # (N_OUTPUT, N_HIDDEN)
    b_out: np.ndarray     # (N_OUTPUT,)

    def __post_init__(self) -> None:
        self.w_hidden = np.asarray(self.w_hidden, dtype=np.float64)
        self.b_hidden = np.asarray(self.b_hidden, dtype=np.float64)
        self.w_out = np.asarray(self.w_out, dtype=np.float64)
        self.b_out = np.asarray(self.b_out, dtype=np.float64)
        if self.w_hidden.shape != (N_HIDDEN, N_INPUT):
            raise ValueError(f"w_hidden shape {self.w_hidden.shape}")
        if self.b_hidden.shape != (N_HIDDEN,):
            raise ValueError(f"b_hidden shape {self.b_hidden.shape}")
        if self.w_out.shape != (N_OUTPUT, N_HIDDEN):
            raise ValueError(f"w_out shape {self.w_out.shape}")
        if self.b_out.shape != (N_OUTPUT,):
            raise ValueError(f"b_out shape {self.b_out.shape}")

    def copy(self) -> "MlpModel":
        return MlpModel(
            self.w_hidden.copy(), self.b_hidden.copy(),
            self.w_out.copy(), self.b_out.copy(),
        )


class Gradients(NamedTuple):
    w_hidden: np.ndarray
    b_hidden: np.ndarray
    w_out: np.ndarray
    b_out: np.ndarray


@dataclass
class TrainingReport:
    cycles_run: int
    epochs_run: int
    final_error: float          # mean per-example squared error over the set
    duration_s: float
    per_class_accuracy: dict[str, float]
    missing_classes: tuple[str, ...] = ()


def sigmoid(t: np.ndarray | float) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-t))


def normalize_window(raw: np.ndarray) -> np.ndarray:
    """Map raw accelerations in g to features: clip(raw / 3, -1, 1)."""
    raw = np.asarray(raw, dtype=np.float64)
    return np.clip(raw / FULL_SCALE_G, -1.0, 1.0)


def init_model(rng: np.random.Generator) -> MlpModel:
    """Uniform [-0.5, 0.5] initialization; draw order is part of the format
    of a training run (hidden weights, hidden biases, out weights, out biases).
    """
    return MlpModel(
        w_hidden=rng.uniform(-0.5, 0.5, (N_HIDDEN, N_INPUT)),
        b_hidden=rng.uniform(-0.5, 0.5, N_HIDDEN),
        w_out=rng.uniform(-0.5, 0.5, (N_OUTPUT, N_HIDDEN)),
        b_out=rng.uniform(-0.5, 0.5, N_OUTPUT),
    )


def forward(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Output activations for one feature vector, shape (N_OUTPUT,)."""
    x = np.asarray(x, dtype=np.float64)
    hidden = sigmoid(model.w_hidden @ x + model.b_hidden)
    return sigmoid(model.w_out @ hidden + model.b_out)


def forward_batch(model: MlpModel, X: np.ndarray) -> np.ndarray:
    """Output activations for a batch, shape (n, N_OUTPUT)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    hidden = sigmoid(X @ model.w_hidden.T + model.b_hidden)
    return sigmoid(hidden @ model.w_out.T + model.b_out)


def example_error(model: MlpModel, x: np.ndarray, target: np.ndarray) -> float:
    """E = 1/2 * sum((target - out)^2) for one example."""
    out = forward(model, x)
    diff = target - out
    return 0.5 * float(diff @ diff)


def gradients(model: MlpModel, x: np.ndarray, target: np.ndarray) -> Gradients:
    """Exact dE/dw for one example under E = 1/2 * sum((target - out)^2)."""
    x = np.asarray(x, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    hidden = sigmoid(model.w_hidden @ x + model.b_hidden)
    out = sigmoid(model.w_out @ hidden + model.b_out)
    delta_out = (out - target) * out * (1.0 - out)
    delta_hidden = (model.w_out.T @ delta_out) * hidden * (1.0 - hidden)
    return Gradients(
        w_hidden=np.outer(delta_hidden, x),
        b_hidden=delta_hidden,
        w_out=np.outer(delta_out, hidden),
        b_out=delta_out,
    )


def train_step(model: MlpModel, x: np.ndarray, target: np.ndarray,
               learning_rate: float) -> None:
    """One in-place stochastic gradient step on a single example."""
    g = gradients(model, x, target)
    model.w_hidden -= learning_rate * g.w_hidden
    model.b_hidden -= learning_rate * g.b_hidden
    model.w_out -= learning_rate * g.w_out
    model.b_out -= learning_rate * g.b_out


def classify_scores(model: MlpModel, x: np.ndarray) -> np.ndarray:
    return forward(model, x)


def classify(model: MlpModel, x: np.ndarray,
             threshold: float = SCORE_THRESHOLD) -> GestureClass:
    """Class of the maximum output if it clears threshold, else UNKNOWN.

    Ties resolve to the lowest class index (argmax picks the first maximum).
    """
    scores = forward(model, x)
    best = int(np.argmax(scores))
    if scores[best] < threshold:
        return GestureClass.UNKNOWN
    return GestureClass(best)


class GestureNet(BaseEstimator, ClassifierMixin):
    """Sklearn-style estimator around the fixed-topology gesture network.

    X rows are normalized nine-component windows; y holds integer class
    indices 0..11 (GestureClass values). `cycles` counts single-example
    presentations, not epochs; examples are presented in a freshly shuffled
    order each epoch.
    """

    def __init__(self, learning_rate: float = 0.25, cycles: int = 100_000,
                 seed: int = 0, target_error: float | None = None,
                 threshold: float = SCORE_THRESHOLD):
        self.learning_rate = learning_rate
        self.cycles = cycles
        self.seed = seed
        self.target_error = target_error
        self.threshold = threshold

    def fit(self, X: np.ndarray, y: np.ndarray) -> "GestureNet":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if X.ndim != 2 or X.shape[1] != N_INPUT:
            raise ValueError(f"X must be (n, {N_INPUT}), got {X.shape}")
        if X.shape[0] == 0:
            raise ValueError("training set is empty")
        if y.shape != (X.shape[0],):
            raise ValueError("y length must match X")
        if np.any((y < 0) | (y >= N_OUTPUT)):
            raise ValueError("labels must be gesture class indices 0..11")

        present = set(int(v) for v in y)
        missing = tuple(
            c.name for c in TRAINABLE_CLASSES if c.value not in present
        )

        targets = np.zeros((X.shape[0], N_OUTPUT))
        targets[np.arange(X.shape[0]), y] = 1.0

        rng = np.random.default_rng(self.seed)
        model = init_model(rng)
        n = X.shape[0]
        lr = float(self.learning_rate)

        t0 = time.perf_counter()
        presented = 0
        epochs = 0
        stop = False
        while presented < self.cycles and not stop:
            order = rng.permutation(n)
            for idx in order:
                if presented >= self.cycles:
                    break
                train_step(model, X[idx], targets[idx], lr)
                presented += 1
            epochs += 1
            if self.target_error is not None:
                if self._set_error(model, X, targets) <= self.target_error:
                    stop = True
        duration = time.perf_counter() - t0

        self.model_ = model
        self.classes_ = np.arange(N_OUTPUT)
        self.report_ = TrainingReport(
            cycles_run=presented,
            epochs_run=epochs,
            final_error=self._set_error(model, X, targets),
            duration_s=duration,
            per_class_accuracy=self._per_class_accuracy(model, X, y),
            missing_classes=missing,
        )
        return self

    @staticmethod
    def _set_error(model: MlpModel, X: np.ndarray, targets: np.ndarray) -> float:
        out = forward_batch(model, X)
        return float(np.mean(0.5 * np.sum((targets - out) ** 2, axis=1)))

    def _per_class_accuracy(self, model: MlpModel, X: np.ndarray,
                            y: np.ndarray) -> dict[str, float]:
        pred = self._predict_model(model, X)
        acc: dict[str, float] = {}
        for c in TRAINABLE_CLASSES:
            mask = y == c.value
            if mask.any():
                acc[c.name] = float(np.mean(pred[mask] == c.value))
        return acc

    def _predict_model(self, model: MlpModel, X: np.ndarray) -> np.ndarray:
        scores = forward_batch(model, X)
        pred = np.argmax(scores, axis=1)
        rejected = scores[np.arange(len(pred)), pred] < self.threshold
        pred[rejected] = GestureClass.UNKNOWN.value
        return pred

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        self._check_fitted()
        return forward_batch(self.model_, X)

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Predicted class indices; sub-threshold rows map to UNKNOWN (12)."""
        self._check_fitted()
        return self._predict_model(self.model_, np.atleast_2d(X))

    def _check_fitted(self) -> None:
        if not hasattr(self, "model_"):
            raise RuntimeError("GestureNet is not fitted yet; call fit first")


def save_model(model: MlpModel) -> bytes:
    """Serialize: header <4sHHHH> (magic, version, n_in, n_hidden, n_out)
    then float64 little-endian w_hidden (row-major), b_hidden, w_out, b_out.
    """
    parts = [_HEADER.pack(_MAGIC, _VERSION, N_INPUT, N_HIDDEN, N_OUTPUT)]
    for arr in (model.w_hidden, model.b_hidden, model.w_out, model.b_out):
        parts.append(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    return b"".join(parts)


def load_model(data: bytes) -> MlpModel:
    if len(data) < _HEADER.size:
        raise ModelFormatError("model file truncated before header")
    magic, version, n_in, n_hid, n_out = _HEADER.unpack_from(data)
    if magic != _MAGIC:
        raise ModelFormatError(f"bad magic {magic!r}")
    if version != _VERSION:
        raise ModelFormatError(f"unsupported model version {version}")
    if (n_in, n_hid, n_out) != (N_INPUT, N_HIDDEN, N_OUTPUT):
        raise ModelFormatError(
            f"unsupported topology {n_in}-{n_hid}-{n_out}"
        )
    counts = (n_hid * n_in, n_hid, n_out * n_hid, n_out)
    expected = _HEADER.size + 8 * sum(counts)
    if len(data) != expected:
        raise ModelFormatError(
            f"model file is {len(data)} bytes, expected {expected}"
        )
    offset = _HEADER.size
    arrays = []
    for count in counts:
        arrays.append(np.frombuffer(data, dtype="<f8", count=count,
                                    offset=offset).astype(np.float64))
        offset += 8 * count
    return MlpModel(
        w_hidden=arrays[0].reshape(n_hid, n_in),
        b_hidden=arrays[1],
        w_out=arrays[2].reshape(n_out, n_hid),
        b_out=arrays[3],
    )


def save_model_file(path: str, model: MlpModel) -> None:
    with open(path, "wb") as fh:
        fh.write(save_model(model))


def load_model_file(path: str) -> MlpModel:
    with open(path, "rb") as fh:
        return load_model(fh.read())
