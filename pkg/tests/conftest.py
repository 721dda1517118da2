import random
import sys
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from negdep.constructions import lemma1_measure
from negdep.measure_core import build_measure, cube_grid
from negdep.oracle import random_measure

F = Fraction


@pytest.fixture
def slice3():
    return lemma1_measure(3)


@pytest.fixture
def slice2():
    return lemma1_measure(2)


@pytest.fixture
def rng():
    return random.Random(20261015)


@st.composite
def cube_measures(draw, min_n=1, max_n=3, full_support=False):
    """Random rational measures on {0,1}^n."""
    n = draw(st.integers(min_n, max_n))
    lo = 1 if full_support else 0
    raw = draw(st.lists(st.integers(lo, 9), min_size=2**n, max_size=2**n).filter(any))
    total = sum(raw)
    atoms = [(tuple((k >> b) & 1 for b in range(n)), F(w, total)) for k, w in enumerate(raw)]
    return build_measure(n, atoms, cube_grid(n))


@st.composite
def chain_measures(draw, max_n=3, max_levels=3):
    n = draw(st.integers(1, max_n))
    shape = tuple(draw(st.integers(2, max_levels)) for _ in range(n))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_measure(shape=shape, rng=random.Random(seed), sparsity=draw(st.sampled_from([0, 0.3])))


rationals = st.fractions(min_value=-5, max_value=5, max_denominator=12)
positive_rationals = st.fractions(min_value=F(1, 12), max_value=4, max_denominator=12)
unit_interval = st.fractions(min_value=0, max_value=1, max_denominator=16)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
