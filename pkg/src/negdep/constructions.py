"""Builders for the concrete measure families used as examples and counterexamples."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import comb
from typing import NamedTuple, Sequence

from .errors import HOutOfRange, ParameterOutOfRange, QOutOfRange, WeightValidation
from .measure_core import DiscreteMeasure, as_rational, build_measure, cube_grid, means, mix, moment


def _basis(n: int, i: int) -> tuple:
    return tuple(int(k == i) for k in range(n))


def lemma1_measure(n: int, weights: Sequence | None = None) -> DiscreteMeasure:
    """Measure on the standard basis vectors of {0,1}^n (uniform by default).

    Every such measure is NA, and its coordinate covariances are ``-w_i w_j``.
    """
    if n < 1:
        raise WeightValidation("n must be positive")
    if weights is None:
        weights = [Fraction(1, n)] * n
    weights = [as_rational(w) for w in weights]
    if len(weights) != n:
        raise WeightValidation(f"expected {n} weights, got {len(weights)}")
    if any(w <= 0 for w in weights):
        raise WeightValidation("weights must be positive")
    if sum(weights) != 1:
        raise WeightValidation(f"weights sum to {sum(weights)}, not 1")
    return build_measure(n, [(_basis(n, i), w) for i, w in enumerate(weights)], cube_grid(n))


def axis_measure(n: int, i: int, j: int, eps) -> DiscreteMeasure:
    """``eps * delta_{e_i} + (1 - eps) * delta_{e_j}``: NC with first marginal ``eps`` at ``i``."""
    eps = as_rational(eps)
    if not 0 < eps < 1:
        raise ParameterOutOfRange("eps must lie in (0, 1)")
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise ParameterOutOfRange("need two distinct coordinates")
    return build_measure(n, [(_basis(n, i), eps), (_basis(n, j), 1 - eps)], cube_grid(n))


@dataclass(frozen=True)
class CornerPair:
    h: Fraction
    mu_high: DiscreteMeasure
    nu_low: DiscreteMeasure


def skewed_corner_pair(h) -> CornerPair:
    """Two NC measures on {0,1}^2 whose even mixture is positively correlated.

    Each component has ``Cov(x1, x2) = -h**2``; the half/half mixture has
    covariance ``1/4 - h``.
    """
    h = as_rational(h)
    if not 0 < h < Fraction(1, 2):
        raise HOutOfRange(f"h must lie in (0, 1/2), got {h}")
    rest = 1 - 2 * h
    high = build_measure(2, [((1, 1), rest), ((1, 0), h), ((0, 1), h)], cube_grid(2))
    low = build_measure(2, [((0, 0), rest), ((1, 0), h), ((0, 1), h)], cube_grid(2))
    return CornerPair(h, high, low)


def pairwise_penalty_measure(n: int, q) -> DiscreteMeasure:
    """Full-support cube measure with weight proportional to ``q ** C(|x|, 2)``."""
    q = as_rational(q)
    if not 0 < q <= 1:
        raise QOutOfRange(f"q must lie in (0, 1], got {q}")
    raw = {x: q ** comb(sum(x), 2) for x in product((0, 1), repeat=n)}
    total = sum(raw.values())
    return build_measure(n, {x: w / total for x, w in raw.items()}, cube_grid(n))


def multinomial_measure(trials: int, probabilities: Sequence) -> DiscreteMeasure:
    """Counts of ``trials`` independent draws over ``len(probabilities)`` cells."""
    probs = [as_rational(p) for p in probabilities]
    if any(p < 0 for p in probs) or sum(probs) != 1:
        raise WeightValidation("cell probabilities must be non-negative and sum to 1")
    k = len(probs)
    atoms = {}
    for counts in product(range(trials + 1), repeat=k):
        if sum(counts) != trials:
            continue
        w = Fraction(1)
        rem = trials
        for c, p in zip(counts, probs):
            w *= comb(rem, c) * p**c
            rem -= c
        if w:
            atoms[counts] = w
    return build_measure(k, atoms)


class Injection(NamedTuple):
    measure: DiscreteMeasure
    radicand: Fraction | None

    def covariance_nonnegative_at(self, c) -> bool:
        """Whether every coordinate covariance is >= 0 at this ``c`` (exact, via ``c**2``)."""
        c = as_rational(c)
        return self.radicand is None or c * c >= self.radicand


def injection_threshold(mu: DiscreteMeasure, alpha) -> Fraction | None:
    """Smallest ``c**2`` making every pair's covariance non-negative after injection."""
    alpha = as_rational(alpha)
    n = mu.dimension
    if n < 2:
        return None
    mean = means(mu)
    best = Fraction(0)
    for i, j in combinations(range(n), 2):
        exps = [0] * n
        exps[i] = exps[j] = 1
        exy = moment(mu, exps)
        need = (alpha * alpha * mean[i] * mean[j] - alpha * exy) / (1 - alpha)
        best = max(best, need)
    return best


def inject_positive_correlation(mu: DiscreteMeasure, alpha, c) -> Injection:
    """``alpha * mu + (1 - alpha) * (delta_{-c1} + delta_{c1}) / 2`` and its threshold.

    The threshold is returned as the radicand ``c*^2`` so it stays rational.
    The result carries no grid.
    """
    alpha, c = as_rational(alpha), as_rational(c)
    if not 0 < alpha < 1:
        raise ParameterOutOfRange(f"alpha must lie in (0, 1), got {alpha}")
    if c <= 0:
        raise ParameterOutOfRange(f"c must be positive, got {c}")
    n = mu.dimension
    spikes = build_measure(n, [((-c,) * n, Fraction(1, 2)), ((c,) * n, Fraction(1, 2))])
    plain = DiscreteMeasure(mu.dimension, mu.atoms, None)
    return Injection(mix(plain, spikes, alpha), injection_threshold(mu, alpha))
