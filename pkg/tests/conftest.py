import os
from fractions import Fraction

import pytest
from loguru import logger

from src.newton_polygon import DifferenceEquation
from src.recurrence import build_system

EQUATIONS_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data", "equations")


@pytest.fixture(autouse=True)
def quiet_logs():
    logger.remove()
    yield


@pytest.fixture
def equations_dir():
    return EQUATIONS_DIR


@pytest.fixture
def half_order_eq():
    """(4z+6)Δ²y + 3Δy + y = 0, solved by a_n = (-1)^n/(2n)!"""
    return DifferenceEquation.from_coefficients([[1], [3], [6, 4]])


@pytest.fixture
def third_order_eq():
    return DifferenceEquation.from_coefficients([[-1], [-1], [3, 1], [15, 19, 6]])


@pytest.fixture
def three_quarter_eq():
    return DifferenceEquation.from_coefficients([
        [-486, -405, -81],
        [-446, -405, -81],
        [-120, -80],
        [1944, 1760, 384],
        [3640, 4656, 1920, 256],
    ])


@pytest.fixture
def resonant_eq():
    """(z-2)Δf - f = 0; P_1 vanishes at z = 2"""
    return DifferenceEquation.from_coefficients([[-1], [-2, 1]])


@pytest.fixture
def half_order_system(half_order_eq):
    return build_system(half_order_eq)


@pytest.fixture
def cosine_seeds():
    return [1, Fraction(-1, 2)]
