"""Shared shapes and models for the wdckit tests."""

import math

import numpy as np
import pytest

from wdckit.core.affine import MaxAffine
from wdckit.core.dc import DCFunction
from wdckit.planar.model import PlanarLocalModel
from wdckit.planar.sectors import OpenSectorSpec
from wdckit.topology.shapes import (
    SQUARE_TRIPLE,
    annulus_aura,
    holed_square_aura,
    point_aura,
    square_aura,
    squares_aura,
)


def abs_1d() -> DCFunction:
    """t -> |t|."""
    return DCFunction.convex(MaxAffine(np.array([[1.0], [-1.0]]), np.zeros(2)))


def zero_1d() -> DCFunction:
    return DCFunction.constant(0.0, 1)


def sup_norm() -> DCFunction:
    eye = np.eye(2)
    return DCFunction.convex(MaxAffine(np.vstack([eye, -eye]), np.zeros(4)))


@pytest.fixture
def square() -> DCFunction:
    return square_aura()


@pytest.fixture
def annulus() -> DCFunction:
    return annulus_aura()


@pytest.fixture
def two_squares() -> DCFunction:
    return squares_aura()


@pytest.fixture
def three_squares() -> DCFunction:
    return squares_aura(SQUARE_TRIPLE)


@pytest.fixture
def holed_square() -> DCFunction:
    return holed_square_aura()


@pytest.fixture
def point_germ() -> DCFunction:
    return point_aura()


@pytest.fixture
def two_quadrants() -> PlanarLocalModel:
    """{xy >= 0} near the origin: the complement of the open quadrants II and IV."""
    rho = 1.0
    return PlanarLocalModel.complement(
        (0.0, 0.0),
        [
            OpenSectorSpec(math.pi / 4, rho, abs_1d()),
            OpenSectorSpec(5 * math.pi / 4, rho, abs_1d()),
        ],
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)


@pytest.fixture
def shapes() -> dict:
    """(aura, chi of {f <= 0}) for the Euler suite."""
    return {
        "square": (square_aura(), 1),
        "annulus": (annulus_aura(), 0),
        "two_squares": (squares_aura(), 2),
        "three_squares": (squares_aura(SQUARE_TRIPLE), 3),
        "holed_square": (holed_square_aura(), -1),
    }

