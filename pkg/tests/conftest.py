import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from helpers import random_curve, random_pair

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def curves(draw, style=None):
    return random_curve(random.Random(draw(seeds)), style)


@st.composite
def curve_pairs(draw):
    return random_pair(random.Random(draw(seeds)))


@pytest.fixture
def bern_pair():
    from makarov import from_atoms

    return from_atoms({0: 0.5, 1: 0.5}), from_atoms({0: 0.6, 1: 0.4})


@pytest.fixture
def unit_uniform():
    from makarov import uniform

    return uniform(0, 1)


@pytest.fixture
def table2_arms():
    from makarov import ArmPair, from_atoms

    return ArmPair(
        from_atoms({0: Fraction(7, 10), 1: Fraction(1, 10), 2: Fraction(2, 10)}),
        from_atoms({0: Fraction(3, 10), 1: Fraction(2, 10), 2: Fraction(5, 10)}),
    )
