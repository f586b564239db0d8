"""Sensor frame records and their newline-delimited JSON wire form."""

from __future__ import annotations

import json
import math
from enum import Enum
from typing import Iterable, NamedTuple

__all__ = [
    "Arm",
    "AccelSample",
    "FrameError",
    "frame_to_json",
    "parse_frame",
    "sample_from_obj",
    "write_frames",
    "read_frames",
]


class Arm(str, Enum):
    LEFT = "L"
    RIGHT = "R"


class AccelSample(NamedTuple):
    """One accelerometer reading: t in ms, components in g."""

    t: float
    arm: Arm
    ax: float
    ay: float
    az: float


class FrameError(ValueError):
    """Raised on a malformed sensor frame line."""


def frame_to_json(s: AccelSample) -> str:
    # t is carried as integer milliseconds on the wire.
    obj = {
        "t": int(round(s.t)),
        "arm": s.arm.value,
        "ax": s.ax,
        "ay": s.ay,
        "az": s.az,
    }
    return json.dumps(obj, separators=(",", ":"))


def parse_frame(line: str) -> AccelSample:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise FrameError(f"invalid JSON: {exc}") from None
    return sample_from_obj(obj)


def sample_from_obj(obj: object) -> AccelSample:
    if not isinstance(obj, dict):
        raise FrameError("frame must be a JSON object")
    try:
        t = obj["t"]
        arm = obj["arm"]
        ax, ay, az = obj["ax"], obj["ay"], obj["az"]
    except KeyError as exc:
        raise FrameError(f"missing field {exc.args[0]!r}") from None
    if not isinstance(t, (int, float)) or isinstance(t, bool):
        raise FrameError("t must be a number")
    if arm not in ("L", "R"):
        raise FrameError(f"arm must be 'L' or 'R', got {arm!r}")
    comps = []
    for name, v in (("ax", ax), ("ay", ay), ("az", az)):
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise FrameError(f"{name} must be a number")
        v = float(v)
        if not math.isfinite(v):
            raise FrameError(f"{name} must be finite")
        comps.append(v)
    return AccelSample(float(t), Arm(arm), comps[0], comps[1], comps[2])


def write_frames(path: str, samples: Iterable[AccelSample]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(frame_to_json(s))
            fh.write("\n")


def read_frames(path: str, *, strict: bool = True) -> tuple[list[AccelSample], int]:
    """Read an NDJSON frame file.

    strict=True raises FrameError (with the line number) on the first bad
    line; strict=False skips bad lines and returns their count.
    """
    samples: list[AccelSample] = []
    skipped = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                samples.append(parse_frame(line))
            except FrameError as exc:
                if strict:
                    raise FrameError(f"line {lineno}: {exc}") from None
                skipped += 1
    return samples, skipped
