import numpy as np
import pytest

from holobeam import ArrayGeometry, ClusterSpec, build_exciting_wave_circuit, generate_channel


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_system(rng):
    """Eight users on an 8x8 surface with eight feeds."""
    channels = generate_channel(8, ArrayGeometry(8, 8), ClusterSpec(), -80.0, rng)
    return channels, build_exciting_wave_circuit(64, 8)
