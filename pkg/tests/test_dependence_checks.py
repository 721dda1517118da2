from fractions import Fraction as F

import pytest

from negdep.constructions import pairwise_penalty_measure, skewed_corner_pair
from negdep.dependence_checks import (
    boundary_status,
    disjoint_block_pairs,
    fkg_report,
    na_covariance_rows,
    na_interior_margin,
    na_report,
    nc_report,
    pa_report,
)
from negdep.errors import BudgetExceeded, DimensionTooSmall, GridRequired
from negdep.measure_core import build_measure, cube_grid, cube_measure, mix, point_mass, product_measure
from negdep.oracle import random_measure


def test_boundary_status():
    assert boundary_status(F(1, 9)) == "strict"
    assert boundary_status(F(0)) == "boundary"
    assert boundary_status(F(-1)) == "violated"


def test_block_pairs():
    assert disjoint_block_pairs(2) == [((0,), (1,))]
    pairs = disjoint_block_pairs(3)
    assert len(pairs) == 6
    assert all(min(I) < min(J) and not set(I) & set(J) for I, J in pairs)


class TestSliceMeasure:
    def test_nc(self, slice3):
        r = nc_report(slice3)
        assert r.holds and r.margin == F(1, 9)
        assert r.certificate["covariance"] == F(-1, 9)
        assert r.pairs_checked == 3

    def test_na(self, slice3):
        r = na_report(slice3)
        assert r.holds and r.margin == F(1, 9)
        assert r.boundary_status == "strict"
        assert r.degenerate_pairs_present
        assert r.certificate["covariance"] == F(-1, 9)

    def test_interior_margin_zero(self, slice3):
        r = na_interior_margin(slice3)
        assert r.margin == 0 and r.boundary_status == "boundary"
        assert r.extra["tv_ball_radius"] == 0

    def test_pa_and_fkg_fail(self, slice3):
        pa = pa_report(slice3)
        assert not pa.holds and pa.certificate["covariance"] == F(-1, 9)
        fkg = fkg_report(slice3)
        assert not fkg.holds and fkg.margin == F(-1, 9)


def test_corner_mixture_fails_na():
    pair = skewed_corner_pair(F(1, 8))
    bad = mix(pair.mu_high, pair.nu_low, F(1, 2))
    r = na_report(bad)
    assert not r.holds
    assert r.certificate["covariance"] == F(1, 8)
    assert r.certificate["U"] == [(1,)] and r.certificate["V"] == [(1,)]
    assert r.to_dict()["margin"] == "-1/8"


def test_full_margin_finds_worst():
    mu = cube_measure({"000": F(1, 2), "111": F(1, 4), "110": F(1, 4)})
    first = na_report(mu)
    worst = na_report(mu, full_margin=True)
    assert not first.holds and not worst.holds
    assert worst.margin <= first.margin


def test_product_measure_is_boundary():
    bern = build_measure(1, [((0,), F(1, 3)), ((1,), F(2, 3))], cube_grid(1))
    r = na_report(product_measure([bern] * 3))
    assert r.holds and r.margin == 0
    assert pa_report(product_measure([bern] * 3)).holds


def test_point_mass_falls_back_to_degenerate_pairs():
    r = na_report(point_mass((1, 1), cube_grid(2)))
    assert r.holds and r.margin == 0
    assert r.certificate["covariance"] == 0


def test_penalty_measure_interior():
    mu = pairwise_penalty_measure(2, F(1, 3))
    r = na_interior_margin(mu)
    assert r.margin == F(3, 50)
    assert r.extra["tv_ball_radius"] == F(1, 100)
    assert not fkg_report(mu).holds
    assert fkg_report(pairwise_penalty_measure(3, 1)).holds


def test_penalty_measure_n3_strictly_na():
    mu = pairwise_penalty_measure(3, F(1, 4))
    r = na_report(mu, full_margin=True)
    assert r.holds and r.margin > 0
    assert r.margin == na_interior_margin(mu).margin  # full support: no degenerate pairs


def test_covariance_rows_match_report(slice3):
    rows = list(na_covariance_rows(slice3))
    values = {cov for *_, cov in rows}
    # x0 against x1 or x2
    assert min(values) == F(-2, 9)
    assert max(values) == 0 and F(-1, 9) in values
    assert len(rows) == 3 * 1 + 3 * 4  # nontrivial up-sets: 1 on a two-level chain, 4 on the square


def test_workers_do_not_change_verdicts(rng):
    for _ in range(20):
        mu = random_measure(4, rng, sparsity=0.4)
        a = na_report(mu, full_margin=True)
        b = na_report(mu, full_margin=True, workers=3)
        assert (a.holds, a.margin) == (b.holds, b.margin)


def test_errors(slice3):
    with pytest.raises(DimensionTooSmall):
        nc_report(point_mass((1,)))
    with pytest.raises(GridRequired):
        na_report(point_mass((1, 1)))
    with pytest.raises(BudgetExceeded):
        na_report(random_measure(5), budget=100)


def test_large_denominators_use_exact_path():
    big = 2**40 + 1
    mu = cube_measure({"10": F(1, big), "01": F(big - 1, big)})
    r = na_report(mu)
    assert r.holds and r.margin == F(big - 1, big * big)
