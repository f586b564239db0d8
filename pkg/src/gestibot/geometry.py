"""Workspace geometry: the two-sphere shell and motion increments.

The reachable volume is the set of points between an internal sphere (the
robot cannot fold into itself) and an external sphere (full arm extension),
both centered at the base. A translation command moves along a signed axis
until the first sphere boundary in that direction; a rotation command swings
a joint to its signed limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .gestures import Axis, Direction, MotionKind

__all__ = [
    "Vec3",
    "Pose",
    "PoseIncrement",
    "Workspace",
    "WorkspaceError",
    "contains",
    "ray_sphere_hit",
    "translation_increment",
    "rotation_increment",
    "increment_for",
]

Vec3 = tuple[float, float, float]

DEFAULT_R_INT = 500.0
DEFAULT_R_EXT = 2000.0
DEFAULT_ROT_LIMIT_DEG = 170.0


class WorkspaceError(RuntimeError):
    """Current pose violates workspace preconditions."""


@dataclass(frozen=True)
class Pose:
    """Tool pose: position in mm, rotation as per-axis angles in degrees."""

    position: Vec3 = (0.0, 0.0, 0.0)
    rotation: Vec3 = (0.0, 0.0, 0.0)


class PoseIncrement(NamedTuple):
    """Relative motion: (i1,i2,i3) translation mm, (i4,i5,i6) rotation deg."""

    i1: float = 0.0
    i2: float = 0.0
    i3: float = 0.0
    i4: float = 0.0
    i5: float = 0.0
    i6: float = 0.0

    @property
    def translation(self) -> Vec3:
        return (self.i1, self.i2, self.i3)

    @property
    def rotation(self) -> Vec3:
        return (self.i4, self.i5, self.i6)

    def nonzero_count(self) -> int:
        return sum(1 for v in self if v != 0.0)


@dataclass(frozen=True)
class Workspace:
    """Annular shell between two concentric spheres plus rotation limits.

    back_off scales translation increments; 1.0 targets the boundary exactly,
    values just below 1.0 leave a safety margin.
    """

    r_int: float = DEFAULT_R_INT
    r_ext: float = DEFAULT_R_EXT
    rot_limits: tuple[tuple[float, float], ...] = field(
        default=tuple(
            (-DEFAULT_ROT_LIMIT_DEG, DEFAULT_ROT_LIMIT_DEG) for _ in range(3)
        )
    )
    back_off: float = 1.0

    def __post_init__(self) -> None:
        if not (0.0 < self.r_int < self.r_ext):
            raise ValueError("require 0 < r_int < r_ext")
        if len(self.rot_limits) != 3:
            raise ValueError("rot_limits must cover exactly three axes")
        for lo, hi in self.rot_limits:
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ValueError(f"bad rotation limit interval ({lo}, {hi})")
        if not (0.0 < self.back_off <= 1.0):
            raise ValueError("back_off must be in (0, 1]")


def contains(ws: Workspace, p: Vec3) -> bool:
    """True when p lies in the closed shell r_int <= |p| <= r_ext."""
    d2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2]
    return ws.r_int * ws.r_int <= d2 <= ws.r_ext * ws.r_ext


def ray_sphere_hit(origin: Vec3, direction: Vec3, radius: float) -> float | None:
    """Smallest k > 0 with |origin + k*direction| == radius, else None.

    Uses the numerically stable quadratic form (no catastrophic cancellation
    when |origin| >> step size).
    """
    dx, dy, dz = direction
    a = dx * dx + dy * dy + dz * dz
    if a == 0.0:
        raise ValueError("direction must be nonzero")
    ox, oy, oz = origin
    b = 2.0 * (ox * dx + oy * dy + oz * dz)
    c = ox * ox + oy * oy + oz * oz - radius * radius
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return None
    sq = math.sqrt(disc)
    # q carries the large-magnitude root; the other is recovered as c/q.
    q = -0.5 * (b + math.copysign(sq, b))
    roots = []
    if q != 0.0:
        roots.append(q / a)
        roots.append(c / q)
    else:  # b == 0 and c == 0: grazing through the center-distance == radius
        roots.append(0.0)
    hits = [k for k in roots if k > 0.0]
    return min(hits) if hits else None


def _require_unit_basis(d: Vec3) -> None:
    nonzero = [v for v in d if v != 0.0]
    if len(nonzero) != 1 or abs(nonzero[0]) != 1.0:
        raise ValueError(f"direction must be a signed unit basis vector, got {d}")


def translation_increment(current: Pose, direction: Vec3, ws: Workspace) -> PoseIncrement:
    """Increment moving from current.position along direction to the first
    sphere boundary hit (internal sphere if the ray strikes it, else the
    external sphere), scaled by ws.back_off.
    """
    _require_unit_basis(direction)
    pos = current.position
    if not contains(ws, pos):
        raise WorkspaceError(f"pose position {pos} outside workspace shell")
    k = ray_sphere_hit(pos, direction, ws.r_int)
    if k is None:
        k = ray_sphere_hit(pos, direction, ws.r_ext)
    if k is None:  # unreachable from inside the shell
        raise WorkspaceError("no boundary along direction; workspace corrupt")
    k *= ws.back_off
    return PoseIncrement(
        k * direction[0], k * direction[1], k * direction[2], 0.0, 0.0, 0.0
    )


def rotation_increment(current: Pose, axis: Axis, sign: int, ws: Workspace) -> PoseIncrement:
    """Increment swinging `axis` from the current angle to its signed limit.

    Zero increment is legal when already at the limit.
    """
    if sign not in (-1, 1):
        raise ValueError("sign must be -1 or +1")
    lo, hi = ws.rot_limits[axis]
    cur = current.rotation[axis]
    if not lo <= cur <= hi:
        raise WorkspaceError(
            f"rotation axis {axis.name} at {cur} deg outside limits [{lo}, {hi}]"
        )
    delta = (hi - cur) if sign > 0 else (lo - cur)
    inc = [0.0] * 6
    inc[3 + axis] = delta
    return PoseIncrement(*inc)


def increment_for(current: Pose, direction: Direction, ws: Workspace) -> PoseIncrement:
    """Dispatch a decoded gesture Direction to the matching increment rule."""
    if direction.kind is MotionKind.TRANSLATION:
        assert direction.vector is not None
        return translation_increment(current, direction.vector, ws)
    return rotation_increment(current, direction.axis, direction.sign, ws)
