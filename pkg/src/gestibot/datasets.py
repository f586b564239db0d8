"""Dataset file format: one labeled raw capture window per line.

Header line `gestibot-dataset v1`, then CSV rows `label,a1,...,a9` with the
nine window components in raw g units (normalization happens at training
time, not in the file).
"""

from __future__ import annotations

import math

import numpy as np

from .gestures import GestureClass, parse_class

__all__ = [
    "DATASET_HEADER",
    "DatasetFormatError",
    "write_dataset",
    "read_dataset",
]

DATASET_HEADER = "gestibot-dataset v1"
_WINDOW_LEN = 9


class DatasetFormatError(ValueError):
    """Raised on a malformed dataset file."""


def write_dataset(path: str, windows: np.ndarray, labels: np.ndarray) -> None:
    windows = np.asarray(windows, dtype=np.float64)
    labels = np.asarray(labels)
    if windows.ndim != 2 or windows.shape[1] != _WINDOW_LEN:
        raise ValueError(f"windows must be (n, {_WINDOW_LEN})")
    if labels.shape != (windows.shape[0],):
        raise ValueError("labels length must match windows")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(DATASET_HEADER + "\n")
        for row, label in zip(windows, labels):
            name = GestureClass(int(label)).name
            fh.write(name + "," + ",".join(repr(float(v)) for v in row) + "\n")


def read_dataset(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Raw windows (n, 9) and integer labels (n,)."""
    rows: list[list[float]] = []
    labels: list[int] = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != DATASET_HEADER:
            raise DatasetFormatError(
                f"bad header {header!r}, expected {DATASET_HEADER!r}"
            )
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 1 + _WINDOW_LEN:
                raise DatasetFormatError(
                    f"line {lineno}: expected {1 + _WINDOW_LEN} fields, "
                    f"got {len(parts)}"
                )
            try:
                cls = parse_class(parts[0])
            except ValueError as exc:
                raise DatasetFormatError(f"line {lineno}: {exc}") from None
            if cls is GestureClass.UNKNOWN:
                raise DatasetFormatError(
                    f"line {lineno}: UNKNOWN is not a valid training label"
                )
            try:
                values = [float(v) for v in parts[1:]]
            except ValueError:
                raise DatasetFormatError(
                    f"line {lineno}: non-numeric component"
                ) from None
            if not all(math.isfinite(v) for v in values):
                raise DatasetFormatError(f"line {lineno}: non-finite component")
            rows.append(values)
            labels.append(cls.value)
    if not rows:
        raise DatasetFormatError("dataset contains no examples")
    return np.array(rows), np.array(labels, dtype=np.int64)
