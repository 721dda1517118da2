import random
from fractions import Fraction as F

import pytest

from negdep.constructions import skewed_corner_pair
from negdep.dependence_checks import na_report, pa_report
from negdep.errors import GridRequired, NotMonotone, NotOneDimensional, TooLarge
from negdep.measure_core import Table, build_measure, cube_grid, mix, point_mass, product_measure
from negdep.monotone_lattice import Poset, count_upsets, is_upset
from negdep.oracle import (
    brute_force_dependence,
    chebyshev_1d_check,
    dedekind_count,
    monotone_indicators,
    random_measure,
)


@pytest.mark.parametrize("m,expected", [(0, 2), (1, 3), (2, 6), (3, 20), (4, 168)])
def test_dedekind(m, expected):
    assert dedekind_count(m) == expected
    assert count_upsets((2,) * m) == expected


def test_dedekind_limit():
    with pytest.raises(TooLarge):
        dedekind_count(5)


def test_indicators_agree_with_lattice_on_chains():
    for shape in [(3,), (2, 3), (3, 3), (2, 2, 3)]:
        found = monotone_indicators(shape)
        p = Poset(shape)
        masks = {sum(1 << p.index(e) for e in s) for s in found}
        assert len(found) == count_upsets(shape)
        assert all(is_upset(p, m) for m in masks)


def test_slice_holds(slice3):
    v = brute_force_dependence(slice3, "na", sampled_pairs=300, seed=1)
    assert v.holds and v.exhaustive
    assert v.worst_covariance == 0  # a.s.-constant indicators reach zero
    assert not brute_force_dependence(slice3, "pa").holds


def test_corner_mixture_fails():
    pair = skewed_corner_pair(F(1, 8))
    v = brute_force_dependence(mix(pair.mu_high, pair.nu_low, F(1, 2)), "na")
    assert not v.holds and v.worst_covariance == F(1, 8)
    I, J, U, V = v.worst_pair
    assert U == [(1,)] and V == [(1,)]


def test_product_measure_zero_covariances():
    bern = build_measure(1, [((0,), F(1, 4)), ((1,), F(3, 4))], cube_grid(1))
    v = brute_force_dependence(product_measure([bern] * 3), "na", sampled_pairs=50)
    assert v.holds and v.worst_covariance == 0


def test_agrees_with_checkers():
    rng = random.Random(11)
    for k in range(60):
        mu = random_measure(rng.choice([2, 3]), rng, sparsity=rng.choice([0, 0.5]))
        assert brute_force_dependence(mu, "na", 5, k).holds == na_report(mu).holds
        assert brute_force_dependence(mu, "pa", 5, k).holds == pa_report(mu).holds


def test_grid_required():
    with pytest.raises(GridRequired):
        brute_force_dependence(point_mass((0, 1)), "na")
    with pytest.raises(ValueError):
        brute_force_dependence(point_mass((0, 1), cube_grid(2)), "fkg")


class TestChebyshev:
    def chain(self, weights):
        r = len(weights)
        return build_measure(1, [((k,), w) for k, w in enumerate(weights)], [list(range(r))])

    def test_variance(self):
        mu = self.chain([F(1, 2), F(1, 2)])
        assert chebyshev_1d_check(mu, Table((2,), (0, 1)), Table((2,), (0, 1))) == F(1, 4)

    def test_step(self):
        mu = self.chain([F(1, 3)] * 3)
        assert chebyshev_1d_check(mu, Table((3,), (0, 1, 2)), Table((3,), (0, 0, 1))) == F(1, 3)

    def test_constant_and_decreasing(self):
        mu = self.chain([F(1, 4), F(1, 2), F(1, 4)])
        assert chebyshev_1d_check(mu, Table((3,), (5, 5, 5)), Table((3,), (0, 1, 2))) == 0
        assert chebyshev_1d_check(mu, Table((3,), (3, 1, 0)), Table((3,), (2, 2, -1))) > 0

    def test_errors(self):
        mu = self.chain([F(1, 2), F(1, 2)])
        with pytest.raises(NotMonotone):
            chebyshev_1d_check(mu, Table((2,), (0, 1)), Table((2,), (1, 0)))
        with pytest.raises(NotOneDimensional):
            chebyshev_1d_check(point_mass((0, 0), cube_grid(2)), Table((2,), (0, 1)), Table((2,), (0, 1)))


def test_random_measure_is_seeded():
    a = random_measure(3, random.Random(5), sparsity=0.3)
    b = random_measure(3, random.Random(5), sparsity=0.3)
    assert a == b and sum(a.weights) == 1
    assert random_measure(shape=(2, 3), rng=random.Random(1)).shape == (2, 3)
