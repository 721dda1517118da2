"""Brute-force validators for the optimized checkers.

Nothing here reuses the up-set enumeration, the layer-cake reduction or the
integer block products of :mod:`negdep.dependence_checks`: monotone 0/1
functions are found by filtering every subset of the grid, and covariances are
summed atom by atom. The only shared piece is :func:`random_monotone`, used
to draw multi-valued test functions.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product

from .errors import GridRequired, NotMonotone, NotOneDimensional, OracleMismatch, TooLarge
from .measure_core import DiscreteMeasure, Table, build_measure
from .monotone_lattice import Poset, random_monotone


@dataclass(frozen=True)
class OracleVerdict:
    property: str
    holds: bool
    worst_covariance: Fraction | None
    worst_pair: tuple | None
    exhaustive: bool
    functions_checked: int


def _grid_elements(shape):
    return list(product(*(range(r) for r in shape)))


@lru_cache(maxsize=32)
def monotone_indicators(shape: tuple) -> tuple:
    """All up-closed subsets of the product of chains ``shape``, as frozensets of level tuples.

    Found by testing every one of the ``2**size`` subsets.
    """
    elems = _grid_elements(shape)
    comparable = [(a, b) for a in elems for b in elems if a != b and all(x <= y for x, y in zip(a, b))]
    found = []
    for bits in range(1 << len(elems)):
        member = {e for k, e in enumerate(elems) if bits >> k & 1}
        if all(b in member for a, b in comparable if a in member):
            found.append(frozenset(member))
    return tuple(found)


def dedekind_count(m: int) -> int:
    """Number of up-sets of {0,1}^m by filtering all ``2**(2**m)`` subsets (m <= 4)."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if m > 4:
        raise TooLarge("brute-force Dedekind counting is limited to m <= 4")
    if m == 0:
        return 2
    return len(monotone_indicators((2,) * m))


def _levels(measure: DiscreteMeasure):
    if measure.grid is None:
        raise GridRequired("the oracle needs a declared grid")
    lookup = [{v: k for k, v in enumerate(levels)} for levels in measure.grid]
    scale = math.lcm(*(w.denominator for w in measure.weights))
    return [(tuple(lookup[k][c] for k, c in enumerate(p)), int(w * scale)) for p, w in measure.atoms], scale


def _cov_values(atoms, scale, f, g):
    ef = eg = efg = Fraction(0)
    for lv, w in atoms:
        a, b = f(lv), g(lv)
        ef += w * a
        eg += w * b
        efg += w * a * b
    return (scale * efg - ef * eg) / (scale * scale)


def _blocks(n):
    for I_size in range(1, n):
        for I in combinations(range(n), I_size):
            rest = [k for k in range(n) if k not in I]
            for J_size in range(1, len(rest) + 1):
                for J in combinations(rest, J_size):
                    yield I, J


def brute_force_dependence(
    measure: DiscreteMeasure,
    property: str = "na",
    sampled_pairs: int = 0,
    seed: int = 0,
    exhaustive_cutoff: int = 16,
) -> OracleVerdict:
    """Direct quantifier check of NA or PA.

    Exhaustive over monotone 0/1 functions on every side with at most
    ``exhaustive_cutoff`` grid elements, plus ``sampled_pairs`` random
    multi-valued monotone pairs.
    """
    if property not in ("na", "pa"):
        raise ValueError(f"unknown property {property!r}")
    atoms, scale = _levels(measure)
    shape = measure.shape
    n = measure.dimension
    sign = 1 if property == "na" else -1  # violation iff sign * cov > 0
    worst = None
    worst_pair = None
    exhaustive = True
    checked = 0

    def note(cov, pair):
        nonlocal worst, worst_pair
        if worst is None or sign * cov > sign * worst:
            worst, worst_pair = cov, pair

    block_list = list(_blocks(n)) if property == "na" else [(tuple(range(n)), tuple(range(n)))]
    weights = [w for _, w in atoms]
    for I, J in block_list:
        sI = tuple(shape[k] for k in I)
        sJ = tuple(shape[k] for k in J)
        if math.prod(sI) > exhaustive_cutoff or math.prod(sJ) > exhaustive_cutoff:
            exhaustive = False
            continue
        proj_i = [tuple(lv[k] for k in I) for lv, _ in atoms]
        proj_j = [tuple(lv[k] for k in J) for lv, _ in atoms]
        sides_i = [(U, frozenset(a for a, x in enumerate(proj_i) if x in U)) for U in monotone_indicators(sI)]
        sides_j = [(V, frozenset(a for a, x in enumerate(proj_j) if x in V)) for V in monotone_indicators(sJ)]
        mass_j = [sum(weights[a] for a in hit) for _, hit in sides_j]
        for U, hit_u in sides_i:
            ef = sum(weights[a] for a in hit_u)
            for (V, hit_v), eg in zip(sides_j, mass_j):
                checked += 1
                efg = sum(weights[a] for a in hit_u & hit_v)
                cov = Fraction(scale * efg - ef * eg, scale * scale)
                pair = (I, J, sorted(U), sorted(V))
                note(cov, pair)
                if sign * cov > 0:
                    return OracleVerdict(property, False, cov, pair, exhaustive, checked)

    rng = random.Random(seed)
    for _ in range(sampled_pairs):
        if property == "na":
            if n < 2:
                break
            I, J = rng.choice(block_list)
        else:
            I = J = tuple(range(n))
        pI = Poset(tuple(shape[k] for k in I))
        pJ = Poset(tuple(shape[k] for k in J))
        f = random_monotone(pI, rng.randint(1, 4), rng.getrandbits(32))
        g = random_monotone(pJ, rng.randint(1, 4), rng.getrandbits(32))
        checked += 1
        cov = _cov_values(atoms, scale, lambda lv: f.value_at([lv[k] for k in I]), lambda lv: g.value_at([lv[k] for k in J]))
        note(cov, (I, J, f.values, g.values))
        if sign * cov > 0:
            return OracleVerdict(property, False, cov, (I, J, f.values, g.values), exhaustive, checked)

    return OracleVerdict(property, True, worst, worst_pair, exhaustive, checked)


def _is_monotone_1d(values):
    up = all(a <= b for a, b in zip(values, values[1:]))
    down = all(a >= b for a, b in zip(values, values[1:]))
    return up, down


def chebyshev_1d_check(measure: DiscreteMeasure, f: Table, g: Table) -> Fraction:
    """``Cov(f, g)`` on a single chain, cross-checked against the pairwise double sum.

    ``f`` and ``g`` must be monotone in the same direction; the result is then
    non-negative.
    """
    if measure.dimension != 1:
        raise NotOneDimensional("Chebyshev's check is for one-dimensional measures")
    if measure.grid is None:
        raise GridRequired("the chain must be declared as a grid")
    fu, fd = _is_monotone_1d(f.values)
    gu, gd = _is_monotone_1d(g.values)
    if not ((fu and gu) or (fd and gd)):
        raise NotMonotone("f and g must be monotone in the same direction")
    atoms = [(measure.level_index(p)[0], w) for p, w in measure.atoms]
    fv = {k: f.values[k] for k, _ in atoms}
    gv = {k: g.values[k] for k, _ in atoms}
    ef = sum(w * fv[k] for k, w in atoms)
    eg = sum(w * gv[k] for k, w in atoms)
    efg = sum(w * fv[k] * gv[k] for k, w in atoms)
    direct = efg - ef * eg
    double = Fraction(1, 2) * sum(
        wx * wy * (fv[x] - fv[y]) * (gv[x] - gv[y]) for x, wx in atoms for y, wy in atoms
    )
    if direct != double:
        raise OracleMismatch(f"covariance {direct} differs from the double-sum form {double}")
    return direct


def random_measure(
    n: int | None = None,
    rng: random.Random | None = None,
    shape: tuple | None = None,
    max_weight: int = 12,
    sparsity: float = 0.0,
) -> DiscreteMeasure:
    """Integer weights drawn uniformly from ``0..max_weight`` on a grid, normalized exactly.

    ``sparsity`` is the chance that each grid point is forced to weight zero.
    ``shape`` defaults to the cube ``(2,) * n``; levels are ``0..r-1``.
    """
    rng = rng or random.Random()
    if shape is None:
        shape = (2,) * n
    grid = tuple(tuple(Fraction(v) for v in range(r)) for r in shape)
    elems = _grid_elements(shape)
    raw = [0 if rng.random() < sparsity else rng.randint(0, max_weight) for _ in elems]
    if not any(raw):
        raw[rng.randrange(len(raw))] = 1
    total = sum(raw)
    atoms = [(tuple(Fraction(c) for c in e), Fraction(w, total)) for e, w in zip(elems, raw)]
    return build_measure(len(shape), atoms, grid)
