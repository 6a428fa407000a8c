"""Shared fixtures: seeded generators and an isolated configuration."""

import numpy as np
import pytest

from src.config import Config, get_config, set_config


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def config(tmp_path):
    """Fresh default config writing reports under tmp_path."""
    previous = get_config()
    fresh = Config()
    fresh.outputs_dir = tmp_path / "outputs"
    set_config(fresh)
    yield fresh
    set_config(previous)
