"""Gesture class vocabulary and the mapping onto robot motion axes."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

__all__ = [
    "GestureClass",
    "Axis",
    "MotionKind",
    "Direction",
    "TRAINABLE_CLASSES",
    "TRANSLATION_CLASSES",
    "STATIC_POSTURE_CLASSES",
    "RZ_CLASSES",
    "class_to_direction",
    "parse_class",
]


class GestureClass(IntEnum):
    """Recognizable commands. Integer values are the network output indices."""

    XP = 0
    XN = 1
    YP = 2
    YN = 3
    ZP = 4
    ZN = 5
    RXP = 6
    RXN = 7
    RYP = 8
    RYN = 9
    RZP = 10
    RZN = 11
    UNKNOWN = 12  # rejection bucket, never a training target


class Axis(IntEnum):
    X = 0
    Y = 1
    Z = 2


class MotionKind(IntEnum):
    TRANSLATION = 0
    ROTATION = 1


TRAINABLE_CLASSES: tuple[GestureClass, ...] = tuple(
    c for c in GestureClass if c is not GestureClass.UNKNOWN
)
TRANSLATION_CLASSES: frozenset[GestureClass] = frozenset(
    (GestureClass.XP, GestureClass.XN, GestureClass.YP,
     GestureClass.YN, GestureClass.ZP, GestureClass.ZN)
)
STATIC_POSTURE_CLASSES: frozenset[GestureClass] = frozenset(
    (GestureClass.RXP, GestureClass.RXN, GestureClass.RYP, GestureClass.RYN)
)
RZ_CLASSES: frozenset[GestureClass] = frozenset(
    (GestureClass.RZP, GestureClass.RZN)
)


@dataclass(frozen=True)
class Direction:
    """Motion request decoded from a gesture class.

    For translations ``vector`` is a signed unit basis vector and ``axis`` /
    ``sign`` mirror it; for rotations ``vector`` is None and ``axis``/``sign``
    select the joint-space rotation sense.
    """

    kind: MotionKind
    axis: Axis
    sign: int
    vector: tuple[float, float, float] | None = None


_TRANSLATION_DIRS: dict[GestureClass, tuple[Axis, int]] = {
    GestureClass.XP: (Axis.X, +1),
    GestureClass.XN: (Axis.X, -1),
    GestureClass.YP: (Axis.Y, +1),
    GestureClass.YN: (Axis.Y, -1),
    GestureClass.ZP: (Axis.Z, +1),
    GestureClass.ZN: (Axis.Z, -1),
}

_ROTATION_DIRS: dict[GestureClass, tuple[Axis, int]] = {
    GestureClass.RXP: (Axis.X, +1),
    GestureClass.RXN: (Axis.X, -1),
    GestureClass.RYP: (Axis.Y, +1),
    GestureClass.RYN: (Axis.Y, -1),
    GestureClass.RZP: (Axis.Z, +1),
    GestureClass.RZN: (Axis.Z, -1),
}


def class_to_direction(cls: GestureClass) -> Direction:
    """Map a recognized class to its motion direction.

    Raises ValueError for UNKNOWN: the rejection bucket carries no motion.
    """
    if cls in _TRANSLATION_DIRS:
        axis, sign = _TRANSLATION_DIRS[cls]
        vec = [0.0, 0.0, 0.0]
        vec[axis] = float(sign)
        return Direction(MotionKind.TRANSLATION, axis, sign, tuple(vec))
    if cls in _ROTATION_DIRS:
        axis, sign = _ROTATION_DIRS[cls]
        return Direction(MotionKind.ROTATION, axis, sign, None)
    raise ValueError(f"no motion direction for {cls!r}")


def parse_class(label: str) -> GestureClass:
    """Parse a class label such as 'XP' or 'RZN' (case-insensitive)."""
    try:
        return GestureClass[label.strip().upper()]
    except KeyError:
        raise ValueError(f"unknown gesture class label: {label!r}") from None
