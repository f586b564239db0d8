"""Shared fixtures: one default-configuration model trained per test run."""

from __future__ import annotations

import pytest

from gestibot.classifier import GestureNet, normalize_window, save_model
from gestibot.synth import SynthParams, synth_dataset

TRAIN_SEED = 7
TRAIN_NOISE = 0.05
TRAIN_N_PER_CLASS = 30
EVAL_SEED = 1_000_003  # disjoint from the training seed


def train_default_net() -> GestureNet:
    """Default training run: 30 patterns per class at sigma 0.05, default
    learning rate and presentation budget.
    """
    windows, labels = synth_dataset(
        TRAIN_N_PER_CLASS,
        SynthParams(noise_sigma=TRAIN_NOISE, seed=TRAIN_SEED),
    )
    net = GestureNet(seed=TRAIN_SEED)
    net.fit(normalize_window(windows), labels)
    return net


@pytest.fixture(scope="session")
def default_net() -> GestureNet:
    return train_default_net()


@pytest.fixture(scope="session")
def default_model(default_net):
    return default_net.model_


@pytest.fixture(scope="session")
def model_file(default_model, tmp_path_factory) -> str:
    path = tmp_path_factory.mktemp("model") / "default.gmlp"
    path.write_bytes(save_model(default_model))
    return str(path)
