import math

import numpy as np
import pytest

from isocond import Manipulator, PointSet2, Posture

SQ2, SQ3, SQ6 = math.sqrt(2), math.sqrt(3), math.sqrt(6)

# reference model set and model matrix for the three-joint example
K3_POINTS = np.array([[SQ6 / 2, SQ2 / 2], [-SQ6 / 2, SQ2 / 2], [0.0, -SQ2]])
K3_MATRIX = np.array([[1, 1, 1], [-SQ2 / 2, -SQ2 / 2, SQ2], [SQ6 / 2, -SQ6 / 2, 0]])

# the 3-point and 4-point sets whose union has M = 7 * 1
UNION_S1 = np.array([[-SQ6 / 2, -SQ2 / 2], [SQ6 / 2, -SQ2 / 2], [0.0, SQ2]])
UNION_S2 = np.array([[0.0, -SQ2], [-SQ2, 0.0], [0.0, SQ2], [SQ2, 0.0]])


@pytest.fixture
def k3():
    return PointSet2(K3_POINTS)


@pytest.fixture
def isotropic_arm():
    return Manipulator((1.0, 1.0, SQ3 / 3))


@pytest.fixture
def equilateral_arm():
    return Manipulator((1.0, 1.0, 1.0))


@pytest.fixture
def isotropic_posture():
    return Posture.from_degrees([0, 120, 150])


def random_arm(rng, n=None, low=0.3, high=2.0):
    n = n or int(rng.integers(2, 7))
    return Manipulator(tuple(rng.uniform(low, high, n)))


def random_posture(rng, n):
    return Posture(tuple(rng.uniform(-np.pi, np.pi, n)))
