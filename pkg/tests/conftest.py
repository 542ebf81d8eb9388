import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from veech_lagrange import builtin_torus
from veech_lagrange.coding import Word

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("default")

TORUS = builtin_torus()


@pytest.fixture(scope="session")
def torus():
    return TORUS


def random_word(rng, n, desc=TORUS, first=None):
    letters = [first or rng.choice(desc.letters)]
    while len(letters) < n:
        letters.append(rng.choice([c for c in desc.letters if c != desc.bar(letters[-1])]))
    return Word(tuple(letters))


@st.composite
def admissible_words(draw, min_size=1, max_size=30, desc=TORUS):
    n = draw(st.integers(min_size, max_size))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_word(random.Random(seed), n, desc)
