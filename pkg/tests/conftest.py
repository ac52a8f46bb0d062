import numpy as np
import pytest

from lgsg.game import BIN, LIN
from lgsg.scenarios import example1

# Hexagon example paths, frozen from a hand trace of the two graphs.
U, D = (0, 2, 4, 6), (1, 3, 5, 7)
UU, UD, DU, DD = (0, 2, 4, 6), (0, 2, 5, 7), (1, 3, 4, 6), (1, 3, 5, 7)

EX1_BIN_MATRIX = np.array([[0.0, 0.0, 0.0, 1.0],
                           [1.0, 0.0, 0.0, 0.0]])
EX1_LIN_MATRIX = np.array([[-2.0, -1.0, -1.0, 0.0],
                           [0.0, -1.0, -1.0, -2.0]])


@pytest.fixture
def ex1_bin():
    return example1(BIN)


@pytest.fixture
def ex1_lin():
    return example1(LIN)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
