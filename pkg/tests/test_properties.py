"""Property-based checks of the algebraic laws the checkers rely on."""

import random
from fractions import Fraction as F
from itertools import combinations

from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from conftest import chain_measures, cube_measures, positive_rationals, rationals, unit_interval
from negdep.dependence_checks import (
    disjoint_block_pairs,
    fkg_report,
    na_interior_margin,
    na_report,
    nc_report,
    pa_report,
)
from negdep.measure_core import (
    DiscreteMeasure,
    Polynomial,
    Table,
    build_measure,
    coordinate_covariance,
    covariance,
    cube_grid,
    mix,
    moment,
    point_mass,
    translate_scale,
    tv_distance,
    weak_neighborhood_contains,
)
from negdep.monotone_lattice import (
    MonotoneTable,
    Poset,
    add_tables,
    enumerate_upsets,
    is_downset,
    is_upset,
    layer_cake,
    random_monotone,
    reconstruct,
    scale_table,
)
from negdep.search_lp import lp_feasible, measure_program, sample_nc_with_means

PROPS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def measure_pairs(draw):
    n = draw(st.integers(1, 3))
    return draw(cube_measures(n, n)), draw(cube_measures(n, n))


def table_on(measure, values):
    return Table(measure.shape, tuple(values), tuple(range(measure.dimension)))


@st.composite
def tables(draw, measure, lo=-1, hi=1):
    size = 1
    for r in measure.shape:
        size *= r
    vals = draw(st.lists(st.fractions(lo, hi, max_denominator=8), min_size=size, max_size=size))
    return table_on(measure, vals)


def permuted(measure, perm):
    atoms = [(tuple(p[k] for k in perm), w) for p, w in measure.atoms]
    return build_measure(measure.dimension, atoms, tuple(measure.grid[k] for k in perm))


# mixtures


@PROPS
@given(measure_pairs(), unit_interval, st.data())
def test_mixture_linearity_and_covariance_identity(pair, lam, data):
    mu, nu = pair
    n = mu.dimension
    exps = data.draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    m = mix(mu, nu, lam)
    assert moment(m, exps) == lam * moment(mu, exps) + (1 - lam) * moment(nu, exps)
    f = data.draw(tables(m))
    g = data.draw(tables(m))
    A, B = mu.expectation(f), nu.expectation(f)
    C, D = mu.expectation(g), nu.expectation(g)
    expected = lam * covariance(mu, f, g) + (1 - lam) * covariance(nu, f, g) + lam * (1 - lam) * (A - B) * (C - D)
    assert covariance(m, f, g) == expected


# affine maps


@PROPS
@given(cube_measures(2, 3), positive_rationals, st.lists(rationals, min_size=3, max_size=3))
def test_translation_and_scaling_laws(mu, s, shift):
    n = mu.dimension
    moved = translate_scale(mu, 1, shift[:n])
    scaled = translate_scale(mu, s)
    for i, j in combinations(range(n), 2):
        c = coordinate_covariance(mu, i, j)
        assert coordinate_covariance(moved, i, j) == c
        assert coordinate_covariance(scaled, i, j) == s * s * c


@PROPS
@given(cube_measures(2, 3), positive_rationals, st.lists(rationals, min_size=3, max_size=3))
def test_monotone_maps_preserve_na(mu, s, shift):
    image = translate_scale(mu, s, shift[: mu.dimension])
    a, b = na_report(mu, full_margin=True), na_report(image, full_margin=True)
    assert (a.holds, a.margin) == (b.holds, b.margin)


# total variation


@PROPS
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(*[cube_measures(n, n)] * 3)))
def test_tv_metric_axioms(triple):
    a, b, c = triple
    assert tv_distance(a, b) == tv_distance(b, a)
    assert tv_distance(a, c) <= tv_distance(a, b) + tv_distance(b, c)
    assert (tv_distance(a, b) == 0) == (a == b)
    assert 0 <= tv_distance(a, b) <= 2


@PROPS
@given(measure_pairs(), st.data())
def test_covariance_tv_stability(pair, data):
    mu, nu = pair
    f = data.draw(tables(mu))
    g = data.draw(tables(mu))
    assert abs(covariance(mu, f, g) - covariance(nu, f, g)) <= 3 * tv_distance(mu, nu)


@PROPS
@given(cube_measures(1, 3), st.fractions(F(1, 100), 1, max_denominator=100), st.data())
def test_scaling_path_converges_to_origin(mu, t, data):
    n = mu.dimension
    coeffs = data.draw(st.lists(st.fractions(-3, 3, max_denominator=4), min_size=n, max_size=n))
    f = Polynomial.linear(coeffs)
    lip = sum(abs(c) for c in coeffs)
    radius = max(max(abs(c) for c in p) for p in mu.points)  # sup-norm radius of the support
    mu_t = translate_scale(mu, t)
    origin = point_mass((0,) * n)
    assert abs(mu_t.expectation(f) - origin.expectation(f)) <= t * lip * radius
    eps = t * lip * radius + F(1, 1000)
    assert weak_neighborhood_contains(mu_t, origin, [(f, eps)]).contained


# lattice


@PROPS
@given(st.lists(st.integers(2, 3), min_size=1, max_size=3), st.data())
def test_upset_closure_and_complement(shape, data):
    p = Poset(tuple(shape))
    ups = enumerate_upsets(p)
    u = data.draw(st.sampled_from(ups))
    v = data.draw(st.sampled_from(ups))
    assert is_upset(p, u.mask & v.mask) and is_upset(p, u.mask | v.mask)
    assert is_downset(p, p.full_mask & ~u.mask)


@PROPS
@given(st.lists(st.integers(2, 4), min_size=1, max_size=3), st.integers(1, 5), st.integers(0, 10**6))
def test_layer_cake_reconstruction(shape, k, seed):
    p = Poset(tuple(shape))
    f = random_monotone(p, k, seed)
    base, terms = layer_cake(f)
    assert reconstruct(base, terms, p) == f.values
    assert all(c > 0 for c, _ in terms)
    masks = [u.mask for _, u in terms]
    assert all(b & ~a == 0 and a != b for a, b in zip(masks, masks[1:]))


@PROPS
@given(st.lists(st.integers(2, 3), min_size=1, max_size=3), st.integers(0, 10**6), positive_rationals)
def test_monotone_closure(shape, seed, c):
    p = Poset(tuple(shape))
    f, g = random_monotone(p, 3, seed), random_monotone(p, 4, seed + 1)
    MonotoneTable.from_table(add_tables(f, g))
    MonotoneTable.from_table(scale_table(f, c))


# dependence checks


@PROPS
@given(cube_measures(2, 3))
def test_na_implies_nc_and_variance_bound(mu):
    if na_report(mu).holds:
        assert nc_report(mu).holds
    n = mu.dimension
    total = Polynomial.linear([1] * n)
    assert covariance(mu, total, total) >= 0


@PROPS
@given(cube_measures(3, 3))
def test_fkg_implies_pa(mu):
    if fkg_report(mu).holds:
        assert pa_report(mu).holds


@PROPS
@given(chain_measures(max_n=3), st.data())
def test_permutation_equivariance(mu, data):
    perm = data.draw(st.permutations(range(mu.dimension)))
    other = permuted(mu, perm)
    checks = [lambda m: na_report(m, full_margin=True), lambda m: pa_report(m, full_margin=True), fkg_report]
    for check in checks:
        a, b = check(mu), check(other)
        assert (a.holds, a.margin) == (b.holds, b.margin)
    if mu.dimension >= 2:
        assert nc_report(mu).margin == nc_report(other).margin


@PROPS
@given(chain_measures(max_n=3), st.integers(0, 10**6))
def test_margin_dominance(mu, seed):
    assume(mu.dimension >= 2)
    margin = na_interior_margin(mu).margin
    rng = random.Random(seed)
    I, J = rng.choice(disjoint_block_pairs(mu.dimension))
    shape = mu.shape
    f = random_monotone(Poset(tuple(shape[k] for k in I)), rng.randint(1, 4), rng.random(), I)
    g = random_monotone(Poset(tuple(shape[k] for k in J)), rng.randint(1, 4), rng.random(), J)
    spread = (max(f.values) - min(f.values)) * (max(g.values) - min(g.values))
    assert covariance(mu, f, g) <= -margin * spread


# LP


@PROPS
@given(cube_measures(1, 3), st.integers(0, 10**6))
def test_lp_solution_is_exact(mu, seed):
    n = mu.dimension
    rng = random.Random(seed)
    tests = [Polynomial.monomial([rng.randint(0, 1) for _ in range(n)]) for _ in range(rng.randint(1, 4))]
    constraints = [(f, mu.expectation(f)) for f in tests]
    points = mu.grid_points()
    res = lp_feasible(measure_program(points, constraints, DiscreteMeasure(n, (), cube_grid(n))))
    assert res.feasible  # mu itself is a solution
    nu = build_measure(n, list(zip(points, res.x)), cube_grid(n))
    assert all(nu.expectation(f) == v for f, v in constraints)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.fractions(F(1, 5), F(4, 5), max_denominator=10), min_size=3, max_size=3), st.integers(0, 10**6),
       unit_interval)
def test_equal_means_mixtures_stay_nc(mean, seed, lam):
    rng = random.Random(seed)
    mu, nu = sample_nc_with_means(mean, rng), sample_nc_with_means(mean, rng)
    assert nc_report(mix(mu, nu, lam)).holds
