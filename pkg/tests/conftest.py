"""Shared fixtures for the SWIPT test suite."""

import numpy as np
import pytest

from swipt.ascent import SolverConfig
from swipt.channel import EigenChannels, eigen_channels, generate_rayleigh
from swipt.system_model import QosConstraints, SystemParams


def scaled_params(n: int = 2) -> SystemParams:
    """Default hardware figures on an n x n link."""
    return SystemParams.reference_defaults().with_updates(n_tx=n, n_rx=n)


def seeded_gains(seed: int, n: int = 2) -> EigenChannels:
    return eigen_channels(generate_rayleigh(n, n, seed))


@pytest.fixture
def params() -> SystemParams:
    return scaled_params(2)


@pytest.fixture
def qos() -> QosConstraints:
    return QosConstraints(r_min=1.0, e_min=0.05, p_max=5.0)


@pytest.fixture
def lam() -> EigenChannels:
    return EigenChannels.from_gains([3.0, 1.2])


@pytest.fixture
def cfg() -> SolverConfig:
    return SolverConfig()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
