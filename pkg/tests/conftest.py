import numpy as np
import pytest

from unicollapse.linalg import StateVector


@pytest.fixture
def bell() -> StateVector:
    return StateVector(np.array([1, 0, 0, 1]) / np.sqrt(2), (2, 2))


@pytest.fixture
def ghz3() -> StateVector:
    amps = np.zeros(8)
    amps[0] = amps[7] = 1 / np.sqrt(2)
    return StateVector(amps, (2, 2, 2))
