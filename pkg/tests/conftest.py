import random

import mpmath as mp
import pytest

from qspfactor.precision import PrecisionContext


@pytest.fixture
def rng():
    return random.Random(20250811)


@pytest.fixture
def ctx64():
    return PrecisionContext(64, 4, mp.mpf("0.009"))


@pytest.fixture
def ctx128():
    return PrecisionContext(128, 4, mp.mpf("0.009"))
