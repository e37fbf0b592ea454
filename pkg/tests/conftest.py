import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from metric_spaces import (  # noqa: E402
    BinarySeqSpace,
    CantorTernarySpace,
    EuclideanPoint,
    FormalBall,
    RealMaxSpace,
)


@pytest.fixture
def line():
    return RealMaxSpace(1)


@pytest.fixture
def plane():
    return RealMaxSpace(2)


@pytest.fixture
def cantor():
    return CantorTernarySpace()


@pytest.fixture
def binseq():
    return BinarySeqSpace()


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def unit_ball():
    return FormalBall(EuclideanPoint((0,)), Fraction(1))


def pt(*coords):
    return EuclideanPoint(tuple(Fraction(x) for x in coords))


def ball(center, radius):
    if not isinstance(center, EuclideanPoint):
        center = pt(center)
    return FormalBall(center, Fraction(radius))
