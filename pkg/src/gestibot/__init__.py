"""Accelerometer-driven gesture control for a simulated robot arm.

Subpackages cover the whole pipeline: synthetic signal generation, the
gesture network, workspace geometry, the live session state machine, the
robot simulator with its wire protocol, evaluation, and the serving layer
used by the browser teleop console.
"""

__version__ = "0.1.0"

from .classifier import GestureNet, MlpModel, classify, load_model_file, save_model_file
from .frames import AccelSample, Arm
from .geometry import Pose, PoseIncrement, Workspace
from .gestures import GestureClass, class_to_direction
from .session import Session, SessionMode, StopReason
from .synth import SynthParams, synth_dataset

__all__ = [
    "__version__",
    "GestureNet",
    "MlpModel",
    "classify",
    "load_model_file",
    "save_model_file",
    "AccelSample",
    "Arm",
    "Pose",
    "PoseIncrement",
    "Workspace",
    "GestureClass",
    "class_to_direction",
    "Session",
    "SessionMode",
    "StopReason",
    "SynthParams",
    "synth_dataset",
]
