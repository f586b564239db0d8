"""Sensor frame wire format."""

from __future__ import annotations

import json

import pytest

from gestibot.frames import (
    AccelSample,
    Arm,
    FrameError,
    frame_to_json,
    parse_frame,
    read_frames,
    sample_from_obj,
    write_frames,
)


def test_frame_round_trip():
    s = AccelSample(120.0, Arm.RIGHT, 0.25, -0.5, 1.0)
    back = parse_frame(frame_to_json(s))
    assert back == s


def test_wire_timestamps_are_integer_milliseconds():
    obj = json.loads(frame_to_json(AccelSample(119.6, Arm.LEFT, 0, 0, 1)))
    assert obj["t"] == 120
    assert isinstance(obj["t"], int)
    assert obj["arm"] == "L"


def test_parse_frame_examples():
    s = parse_frame('{"t": 30, "arm": "R", "ax": 0.5, "ay": 0, "az": 1}')
    assert s.arm is Arm.RIGHT
    assert s.t == 30.0
    assert s.ax == 0.5


@pytest.mark.parametrize("line", [
    "not json",
    "[1, 2, 3]",
    '{"t": 1, "arm": "R", "ax": 0.1, "ay": 0.2}',            # missing az
    '{"t": 1, "arm": "M", "ax": 0.1, "ay": 0.2, "az": 1.0}',  # bad arm
    '{"t": 1, "arm": "R", "ax": "x", "ay": 0.2, "az": 1.0}',  # non-numeric
    '{"t": 1, "arm": "R", "ax": NaN, "ay": 0.2, "az": 1.0}',  # non-finite
    '{"t": true, "arm": "R", "ax": 0.1, "ay": 0.2, "az": 1}',  # bool is not a number
    '{"t": 1, "arm": "R", "ax": true, "ay": 0.2, "az": 1.0}',
])
def test_parse_frame_rejects_malformed_lines(line):
    with pytest.raises(FrameError):
        parse_frame(line)


def test_sample_from_obj_requires_an_object():
    with pytest.raises(FrameError):
        sample_from_obj([1, 2, 3])


def test_write_read_round_trip(tmp_path):
    samples = [
        AccelSample(0.0, Arm.LEFT, -1.0, 0.0, 0.0),
        AccelSample(10.0, Arm.RIGHT, 0.25, 0.0, 1.0),
    ]
    path = str(tmp_path / "frames.jsonl")
    write_frames(path, samples)
    back, skipped = read_frames(path)
    assert back == samples
    assert skipped == 0


def test_read_frames_strict_reports_the_line_number(tmp_path):
    path = tmp_path / "frames.jsonl"
    path.write_text('{"t":0,"arm":"L","ax":0,"ay":0,"az":1}\nbroken\n')
    with pytest.raises(FrameError, match="line 2"):
        read_frames(str(path))


def test_read_frames_lenient_skips_and_counts(tmp_path):
    path = tmp_path / "frames.jsonl"
    path.write_text(
        '{"t":0,"arm":"L","ax":0,"ay":0,"az":1}\n'
        "broken\n"
        "\n"
        '{"t":10,"arm":"R","ax":0,"ay":0,"az":1}\n'
    )
    samples, skipped = read_frames(str(path), strict=False)
    assert len(samples) == 2
    assert skipped == 1  # blank lines are not counted as bad
