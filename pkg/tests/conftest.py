import numpy as np
import pytest

from helpers import schedule_lattice


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def full_lattice(rng):
    """4x3-node lattice of 16x15 frames on the measured schedule."""
    return schedule_lattice(rng=rng)


@pytest.fixture
def small_lattice(rng):
    """4x3-node lattice of 2x2 frames; cheap for exhaustive checks."""
    return schedule_lattice(rows=2, cols=2, rng=rng)
