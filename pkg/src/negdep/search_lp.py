"""Exact LP feasibility and counterexample synthesis.

``lp_feasible`` is a dense phase-1 simplex over Fractions with Bland's rule.
It either returns a non-negative rational solution of ``A x = b`` or a Farkas
vector ``y`` with ``y.A <= 0`` and ``y.b > 0`` proving there is none.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .dependence_checks import DependenceReport, disjoint_block_pairs, na_report, nc_report
from .errors import (
    DimensionMismatch,
    GridRequired,
    InfeasibleOnSupport,
    MalformedProgram,
    OracleMismatch,
    ParameterOutOfRange,
    TargetNotPositive,
)
from .measure_core import (
    DiscreteMeasure,
    FunctionSpec,
    Polynomial,
    as_rational,
    build_measure,
    covariance,
    cube_grid,
    format_rational,
    induce_grid,
    measure_to_dict,
    mix,
    tv_distance,
)
from .monotone_lattice import Poset, UpSet, upset_masks


@dataclass(frozen=True)
class LinearProgram:
    """``num_vars`` non-negative unknowns subject to ``coeffs . x == rhs`` per row."""

    num_vars: int
    rows: tuple

    def __post_init__(self):
        if self.num_vars < 1:
            raise MalformedProgram("a program needs at least one variable")
        for coeffs, _ in self.rows:
            if len(coeffs) != self.num_vars:
                raise MalformedProgram(f"row of length {len(coeffs)} in a program with {self.num_vars} variables")

    @classmethod
    def from_rows(cls, num_vars, rows) -> "LinearProgram":
        return cls(num_vars, tuple((tuple(as_rational(a) for a in coeffs), as_rational(rhs)) for coeffs, rhs in rows))


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    x: tuple | None = None
    farkas: tuple | None = None


def lp_feasible(program: LinearProgram) -> Feasibility:
    k = program.num_vars
    if not program.rows:
        return Feasibility(True, (Fraction(0),) * k)

    m = len(program.rows)
    signs = []
    tab = []
    for r, (coeffs, rhs) in enumerate(program.rows):
        s = -1 if rhs < 0 else 1
        signs.append(s)
        art = [Fraction(0)] * m
        art[r] = Fraction(1)
        tab.append([s * a for a in coeffs] + art + [s * rhs])
    width = k + m
    basis = [k + r for r in range(m)]
    # phase-1 reduced costs: artificials cost 1, originals 0
    cost = [Fraction(0)] * k + [Fraction(1)] * m + [Fraction(0)]
    red = [cost[j] - sum(tab[r][j] for r in range(m)) for j in range(width)]
    red.append(-sum(tab[r][width] for r in range(m)))

    while True:
        entering = next((j for j in range(width) if red[j] < 0), None)
        if entering is None:
            break
        leave, best = None, None
        for r in range(m):
            a = tab[r][entering]
            if a > 0:
                ratio = tab[r][width] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    leave, best = r, ratio
        if leave is None:
            # unbounded direction cannot occur in phase 1 (objective bounded below by 0)
            raise MalformedProgram("phase-1 simplex reported an unbounded ray")
        piv = tab[leave][entering]
        row = [v / piv for v in tab[leave]]
        tab[leave] = row
        for r in range(m):
            if r != leave and tab[r][entering]:
                f = tab[r][entering]
                tab[r] = [a - f * b for a, b in zip(tab[r], row)]
        f = red[entering]
        red = [a - f * b for a, b in zip(red, row)]
        basis[leave] = entering

    objective = -red[width]
    if objective > 0:
        y = [signs[r] * (1 - red[k + r]) for r in range(m)]
        return Feasibility(False, farkas=tuple(y))
    x = [Fraction(0)] * k
    for r, var in enumerate(basis):
        if var < k:
            x[var] = tab[r][width]
    return Feasibility(True, tuple(x))


def check_farkas(program: LinearProgram, y) -> bool:
    k = program.num_vars
    for j in range(k):
        if sum(yi * coeffs[j] for yi, (coeffs, _) in zip(y, program.rows)) > 0:
            return False
    return sum(yi * rhs for yi, (_, rhs) in zip(y, program.rows)) > 0


def measure_program(points: Sequence, constraints, context: DiscreteMeasure) -> LinearProgram:
    """Probability-weight LP over ``points`` with ``E f == value`` rows."""
    rows = [((Fraction(1),) * len(points), Fraction(1))]
    for f, value in constraints:
        rows.append((tuple(f.evaluate(context, p) for p in points), as_rational(value)))
    return LinearProgram(len(points), tuple(rows))


# weak-neighbourhood counterexamples


def default_template(mu: DiscreteMeasure, i: int, j: int) -> DiscreteMeasure:
    """3/8, 1/8, 1/8, 3/8 on the extreme levels of coordinates ``i, j``; others at their lowest level."""
    grid = mu.grid if mu.grid is not None else induce_grid(mu).grid
    base = [levels[0] for levels in grid]
    atoms = []
    for (a, b), w in (((0, 0), Fraction(3, 8)), ((0, 1), Fraction(1, 8)), ((1, 0), Fraction(1, 8)), ((1, 1), Fraction(3, 8))):
        p = list(base)
        p[i] = grid[i][-1] if a else grid[i][0]
        p[j] = grid[j][-1] if b else grid[j][0]
        atoms.append((tuple(p), w))
    return build_measure(mu.dimension, atoms, grid)


def weak_counterexample(
    mu: DiscreteMeasure,
    tests: Sequence[FunctionSpec] = (),
    candidate_support: Sequence | None = None,
    target: tuple = (0, 1),
    template: DiscreteMeasure | None = None,
    budget: int = 10**7,
) -> DiscreteMeasure:
    """A non-NA measure with exactly the same test integrals as ``mu``.

    The coordinate pair ``target`` is forced to the first and second moments of
    a positively correlated ``template``, which makes ``Cov(x_i, x_j) > 0``.
    Raises :class:`InfeasibleOnSupport` (with a Farkas vector) when no such
    probability measure lives on the candidate support.
    """
    i, j = target
    n = mu.dimension
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise ParameterOutOfRange(f"bad target pair {target}")
    gridded = mu if mu.grid is not None else induce_grid(mu)
    if template is None:
        template = default_template(gridded, i, j)
    if template.dimension != n:
        raise DimensionMismatch("template dimension differs from mu")
    fi, fj, fij = Polynomial.coordinate(i, n), Polynomial.coordinate(j, n), Polynomial.product_of(i, j, n)
    if covariance(template, fi, fj) <= 0:
        raise TargetNotPositive("template must have positive covariance on the target pair")

    if candidate_support is None:
        points = set(gridded.grid_points()) | set(template.points)
    else:
        points = {tuple(as_rational(c) for c in p) for p in candidate_support}
    points = sorted(points)
    grid = gridded.grid
    if any(any(c not in levels for c, levels in zip(p, grid)) for p in points):
        grid = tuple(tuple(sorted({p[k] for p in points} | set(grid[k]))) for k in range(n))
    context = DiscreteMeasure(n, (), grid)

    constraints = [(f, mu.expectation(f)) for f in tests]
    constraints += [(fi, template.expectation(fi)), (fj, template.expectation(fj)), (fij, template.expectation(fij))]
    program = measure_program(points, constraints, context)
    result = lp_feasible(program)
    if not result.feasible:
        raise InfeasibleOnSupport("no probability measure on the candidate support matches the constraints", result.farkas)
    nu = build_measure(n, list(zip(points, result.x)), grid)
    report = na_report(nu, budget=budget)
    if report.holds:
        raise OracleMismatch("LP output with positive coordinate covariance passed the NA check")
    return nu


# non-convexity witnesses


@dataclass(frozen=True)
class WitnessReport:
    lam: Fraction
    pair: dict
    mixture_covariance: Fraction
    A: Fraction
    B: Fraction
    C: Fraction
    D: Fraction
    c_tilde: Fraction
    eps1: Fraction
    eps2: Fraction

    def identity_value(self) -> Fraction:
        """Mixture covariance from the closed form ``-lam eps1 - (1-lam) eps2 + lam (1-lam) C~``."""
        lam = self.lam
        return -lam * self.eps1 - (1 - lam) * self.eps2 + lam * (1 - lam) * self.c_tilde

    def to_dict(self) -> dict:
        out = {k: format_rational(getattr(self, k)) for k in ("lam", "mixture_covariance", "A", "B", "C", "D", "c_tilde", "eps1", "eps2")}
        out["pair"] = {k: (format_rational(v) if isinstance(v, Fraction) else v) for k, v in self.pair.items()}
        return out


def _monitored_pairs(mu, family, budget):
    n = mu.dimension
    if family == "nc":
        for i, j in combinations(range(n), 2):
            yield {"i": i, "j": j}, Polynomial.coordinate(i, n), Polynomial.coordinate(j, n)
        return
    if family != "na":
        raise ValueError(f"unknown family {family!r}")
    if mu.grid is None:
        raise GridRequired("indicator family needs a grid")
    shape = mu.shape
    for I, J in disjoint_block_pairs(n):
        pu, pv = Poset(tuple(shape[k] for k in I)), Poset(tuple(shape[k] for k in J))
        for mu_mask in upset_masks(pu, budget):
            if mu_mask in (0, pu.full_mask):
                continue
            f = UpSet(pu, mu_mask).indicator(I)
            for nv_mask in upset_masks(pv, budget):
                if nv_mask in (0, pv.full_mask):
                    continue
                g = UpSet(pv, nv_mask).indicator(J)
                desc = {"I": I, "J": J, "U": UpSet(pu, mu_mask).members(), "V": UpSet(pv, nv_mask).members()}
                yield desc, f, g


def nonconvex_witness(
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    lambdas: Sequence | None = None,
    family: str = "nc",
    budget: int = 10**6,
) -> WitnessReport | None:
    """First mixing weight and monitored pair whose mixture covariance is positive.

    Without ``lambdas`` every pair is tried at ``1/2`` and then at the maximiser
    of the concave mixture-covariance quadratic. Returns None if none is found.
    """
    if mu.dimension != nu.dimension:
        raise DimensionMismatch("mu and nu must have the same dimension")
    if family == "na" and mu.grid != nu.grid:
        raise GridRequired("indicator family needs both measures on the same grid")
    stats = []
    for desc, f, g in _monitored_pairs(mu, family, budget):
        A, B = mu.expectation(f), nu.expectation(f)
        C, D = mu.expectation(g), nu.expectation(g)
        eps1 = -covariance(mu, f, g)
        eps2 = -covariance(nu, f, g)
        stats.append((desc, f, g, A, B, C, D, (A - B) * (C - D), eps1, eps2))

    def value(s, lam):
        *_, ct, e1, e2 = s
        return -lam * e1 - (1 - lam) * e2 + lam * (1 - lam) * ct

    def candidates():
        if lambdas is not None:
            for lam in lambdas:
                for s in stats:
                    yield as_rational(lam), s
            return
        half = Fraction(1, 2)
        for s in stats:
            yield half, s
        for s in stats:
            ct, e1, e2 = s[7], s[8], s[9]
            if ct > 0:
                lam = (e2 - e1 + ct) / (2 * ct)
                if 0 < lam < 1 and lam != half:
                    yield lam, s

    for lam, s in candidates():
        if not 0 <= lam <= 1:
            raise ParameterOutOfRange(f"mixing weight {lam} outside [0, 1]")
        if value(s, lam) > 0:
            desc, f, g, A, B, C, D, ct, e1, e2 = s
            direct = covariance(mix(mu, nu, lam), f, g)
            report = WitnessReport(lam, desc, direct, A, B, C, D, ct, e1, e2)
            if report.identity_value() != direct:
                raise OracleMismatch("mixture covariance disagrees with the closed-form identity")
            return report
    return None


# TV-ball probes


@dataclass(frozen=True)
class ProbeReport:
    property: str
    radius: Fraction
    trials: int
    passes: int
    failures: int
    max_tv: Fraction
    first_counterexample: DiscreteMeasure | None = None
    first_failure: DependenceReport | None = field(default=None, compare=False)

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "radius": format_rational(self.radius),
            "trials": self.trials,
            "passes": self.passes,
            "failures": self.failures,
            "max_tv": format_rational(self.max_tv),
            "first_counterexample": None
            if self.first_counterexample is None
            else measure_to_dict(self.first_counterexample),
            "first_failure": None if self.first_failure is None else self.first_failure.to_dict(),
        }


def _random_direction(rng: random.Random, points, weights):
    pos = {}
    k = rng.choice((1, 1, 2, 3, len(points)))
    for p in rng.sample(points, min(k, len(points))):
        pos[p] = Fraction(rng.randint(1, 9))
    donors = [p for p in points if weights.get(p, 0) > 0]
    neg = {}
    for p in rng.sample(donors, rng.randint(1, len(donors))):
        neg[p] = Fraction(rng.randint(1, 9))
    sp, sn = sum(pos.values()), sum(neg.values())
    d = {}
    for p, v in pos.items():
        d[p] = d.get(p, 0) + v / sp
    for p, v in neg.items():
        d[p] = d.get(p, 0) - v / sn
    return {p: v for p, v in d.items() if v}


def perturb(mu: DiscreteMeasure, direction: Mapping, radius, grid=None) -> DiscreteMeasure | None:
    """Move from ``mu`` along a zero-sum ``direction`` as far as TV ``radius`` and the simplex allow."""
    radius = as_rational(radius)
    d = {tuple(as_rational(c) for c in p): as_rational(v) for p, v in direction.items()}
    d = {p: v for p, v in d.items() if v}
    if sum(d.values()) != 0:
        raise ParameterOutOfRange("perturbation directions must sum to zero")
    if not d:
        return None
    w = dict(mu.atoms)
    length = sum(abs(v) for v in d.values())
    t = radius / length
    for p, v in d.items():
        if v < 0:
            t = min(t, w.get(p, Fraction(0)) / -v)
    if t <= 0:
        return None
    new = dict(w)
    for p, v in d.items():
        new[p] = new.get(p, Fraction(0)) + t * v
    return build_measure(mu.dimension, new, grid if grid is not None else mu.grid)


def tv_interior_probe(
    mu: DiscreteMeasure,
    radius,
    trials: int,
    seed: int = 0,
    property: str = "na",
    extra_directions: Sequence[Mapping] = (),
    budget: int = 10**7,
) -> ProbeReport:
    """Probe random measures at TV distance up to ``radius`` for the property.

    The first ``len(extra_directions)`` trials use the given zero-sum
    directions at the full radius. The rest are seeded random directions over
    the grid points; half of them go the full radius and half a random
    fraction of it, so the interior of the ball is sampled too.
    """
    radius = as_rational(radius)
    if radius <= 0:
        raise ParameterOutOfRange("radius must be positive")
    if property not in ("na", "nc"):
        raise ValueError(f"unknown property {property!r}")
    if mu.grid is None:
        if property == "na":
            raise GridRequired("NA probes need a declared grid")
        mu = induce_grid(mu)
    check = (lambda m: na_report(m, budget=budget)) if property == "na" else nc_report
    points = mu.grid_points()
    weights = dict(mu.atoms)
    passes = failures = 0
    max_tv = Fraction(0)
    first = first_report = None
    for t in range(trials):
        step = radius
        if t < len(extra_directions):
            direction = extra_directions[t]
        else:
            rng = random.Random(f"{seed}/{t}")
            direction = _random_direction(rng, points, weights)
            if rng.random() < 0.5:
                step = radius * Fraction(rng.randint(1, 15), 16)
        nu = perturb(mu, direction, step)
        if nu is None:
            nu = mu
        dist = tv_distance(mu, nu)
        if dist > radius:
            raise OracleMismatch("probe left the requested TV ball")
        max_tv = max(max_tv, dist)
        report = check(nu)
        if report.holds:
            passes += 1
        else:
            failures += 1
            if first is None:
                first, first_report = nu, report
    return ProbeReport(property, radius, trials, passes, failures, max_tv, first, first_report)


# equal-means NC pairs


def _coordinate_rows(n):
    rows = [Polynomial.coordinate(i, n) for i in range(n)]
    pairs = {(i, j): Polynomial.product_of(i, j, n) for i, j in combinations(range(n), 2)}
    return rows, pairs


def sample_nc_with_means(mean: Sequence, rng: random.Random, attempts: int = 200) -> DiscreteMeasure:
    """Random NC measure on {0,1}^n with the given coordinate means, solved by LP.

    Second moments ``E x_i x_j`` are drawn at random below ``p_i p_j`` and the
    cube weights are found by :func:`lp_feasible`; infeasible draws are retried.
    """
    mean = [as_rational(p) for p in mean]
    n = len(mean)
    grid = cube_grid(n)
    context = DiscreteMeasure(n, (), grid)
    points = sorted(tuple(int(b) for b in format(k, f"0{n}b")) for k in range(2**n))
    points = [tuple(Fraction(c) for c in p) for p in points]
    singles, pairs = _coordinate_rows(n)
    for _ in range(attempts):
        constraints = [(f, p) for f, p in zip(singles, mean)]
        for (i, j), f in pairs.items():
            lo = max(Fraction(0), mean[i] + mean[j] - 1)
            hi = mean[i] * mean[j]
            u = Fraction(rng.randint(0, 12), 12)
            constraints.append((f, lo + u * (hi - lo)))
        order = list(points)
        rng.shuffle(order)
        result = lp_feasible(measure_program(order, constraints, context))
        if result.feasible:
            return build_measure(n, list(zip(order, result.x)), grid)
    raise InfeasibleOnSupport(f"no NC measure found for means {mean} after {attempts} draws")
