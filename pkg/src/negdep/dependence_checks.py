"""Exact NC / NA / PA / FKG verdicts with certificates.

NA and PA are decided on up-set indicator pairs (see
:mod:`negdep.monotone_lattice`). For a block pair ``(I, J)`` the joint
marginal table on ``I u J`` is built once and every indicator covariance in the
block comes out of two matrix products. Weights are scaled to integers by the
least common denominator ``L`` so the products are exact; with ``L < 2**31``
they fit in int64, otherwise numpy object arrays of Python ints are used.

Margins, in the report's sign convention (``margin >= 0`` iff the property
holds):

* NC: ``min_{i<j} E x_i E x_j - E x_i x_j``.
* NA: ``min -Cov(1_U(x_I), 1_V(x_J))`` over pairs whose indicators are both
  non-constant almost surely (the strict-NA margin).
* NA interior: the same minimum over every pair of non-empty proper up-sets,
  with no almost-sure exclusion. A positive value ``m`` certifies that the TV
  ball of radius ``m / 6`` around the measure stays NA.
* PA: ``min Cov(1_U, 1_V)`` over a.s. non-constant indicator pairs on the full grid.
* FKG: ``min mu(x v y) mu(x ^ y) - mu(x) mu(y)`` over incomparable grid pairs.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Any

import numpy as np

from .errors import BudgetExceeded, DimensionTooSmall, GridRequired
from .measure_core import DiscreteMeasure, format_rational, mixed_radix_index, moment
from .monotone_lattice import Poset, upset_masks

INT64_SAFE = 2**31

STRICT, BOUNDARY, VIOLATED = "strict", "boundary", "violated"


def boundary_status(margin: Fraction) -> str:
    if margin > 0:
        return STRICT
    if margin == 0:
        return BOUNDARY
    return VIOLATED


@dataclass(frozen=True)
class DependenceReport:
    property: str
    holds: bool
    margin: Fraction
    certificate: dict | None
    boundary_status: str
    degenerate_pairs_present: bool = False
    pairs_checked: int = 0
    extra: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "verdict": self.holds,
            "margin": format_rational(self.margin),
            "certificate": _jsonable(self.certificate),
            "boundary_status": self.boundary_status,
            "degenerate_pairs_present": self.degenerate_pairs_present,
            "pairs_checked": self.pairs_checked,
            **{k: _jsonable(v) for k, v in self.extra.items()},
        }


def _jsonable(obj: Any):
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _report(prop, margin, certificate, **kwargs) -> DependenceReport:
    return DependenceReport(prop, margin >= 0, margin, certificate, boundary_status(margin), **kwargs)


# NC


def coordinate_gaps(measure: DiscreteMeasure) -> dict:
    """``{(i, j): E x_i E x_j - E x_i x_j}`` for all ``i < j``."""
    n = measure.dimension
    mean = [moment(measure, [int(k == i) for k in range(n)]) for i in range(n)]
    gaps = {}
    for i, j in combinations(range(n), 2):
        exps = [0] * n
        exps[i] = exps[j] = 1
        gaps[(i, j)] = mean[i] * mean[j] - moment(measure, exps)
    return gaps


def nc_report(measure: DiscreteMeasure) -> DependenceReport:
    if measure.dimension < 2:
        raise DimensionTooSmall("negative correlation needs at least two coordinates")
    gaps = coordinate_gaps(measure)
    pair = min(gaps, key=lambda k: (gaps[k], k))
    cert = {"pair": pair, "gap": gaps[pair], "covariance": -gaps[pair]}
    return _report("nc", gaps[pair], cert, pairs_checked=len(gaps))


# shared integer machinery


def integer_weights(measure: DiscreteMeasure):
    """``(L, [L * w for each atom])`` with ``L`` the least common denominator."""
    scale = math.lcm(*(w.denominator for w in measure.weights))
    return scale, [w.numerator * (scale // w.denominator) for w in measure.weights]


def _require_grid(measure):
    if measure.grid is None:
        raise GridRequired("this check needs a measure with a declared grid (see induce_grid)")


@lru_cache(maxsize=128)
def _indicator_matrix(shape: tuple, budget: int):
    masks = upset_masks(Poset(shape), budget)
    size = math.prod(shape)
    mat = np.zeros((len(masks), size), dtype=np.int64)
    for r, m in enumerate(masks):
        for i in range(size):
            if m >> i & 1:
                mat[r, i] = 1
    mat.setflags(write=False)
    full = (1 << size) - 1
    nontrivial = np.array([0 < m < full for m in masks], dtype=bool)
    return masks, mat, nontrivial


def _render_upset(mask: int, shape: tuple) -> list:
    poset = Poset(shape)
    return sorted(poset.levels(i) for i in range(poset.size) if mask >> i & 1)


def disjoint_block_pairs(n: int) -> list:
    """Unordered disjoint non-empty ``(I, J)`` with ``min I < min J``.

    Ordered by ``|I| + |J|``, then lexicographically.
    """
    out = []
    for total in range(2, n + 1):
        found = []
        for union in combinations(range(n), total):
            rest = union[1:]
            for k in range(0, len(rest)):
                for extra in combinations(rest, k):
                    I = (union[0],) + extra
                    J = tuple(x for x in union if x not in I)
                    found.append((I, J))
        out.extend(sorted(found))
    return out


@dataclass
class _Best:
    value: Any = None
    where: Any = None

    def offer(self, value, where):
        if value is not None and (self.value is None or value < self.value):
            self.value, self.where = value, where


def _masked_argmin(G, rows, cols):
    if not rows.any() or not cols.any():
        return None, None
    ri, ci = np.nonzero(rows)[0], np.nonzero(cols)[0]
    sub = G[np.ix_(ri, ci)]
    k = int(np.argmin(sub))
    a, b = divmod(k, len(ci))
    return sub[a, b], (int(ri[a]), int(ci[b]))


def _first_negative(G):
    neg = np.argwhere(G < 0)
    if len(neg) == 0:
        return None
    a, b = (int(x) for x in neg[0])
    return G[a, b], (a, b)


class _Scan:
    """Result of scanning every block pair, merged in deterministic order."""

    def __init__(self):
        self.strict = _Best()
        self.interior = _Best()
        self.violation = None
        self.degenerate = False
        self.pairs_checked = 0


def _block_matrix(measure, levels, ints, scale, dtype, budget, I, J):
    shape = measure.shape
    sI = tuple(shape[i] for i in I)
    sJ = tuple(shape[j] for j in J)
    masks_u, mu_mat, nontriv_u = _indicator_matrix(sI, budget)
    masks_v, mv_mat, nontriv_v = _indicator_matrix(sJ, budget)
    table = np.zeros((math.prod(sI), math.prod(sJ)), dtype=dtype)
    for lv, w in zip(levels, ints):
        table[mixed_radix_index([lv[i] for i in I], sI), mixed_radix_index([lv[j] for j in J], sJ)] += w
    if dtype is object:
        mu_mat, mv_mat = mu_mat.astype(object), mv_mat.astype(object)
    nu = mu_mat @ table.sum(axis=1)
    nv = mv_mat @ table.sum(axis=0)
    # G = L^2 * (-Cov); NA needs G >= 0 everywhere
    G = np.outer(nu, nv) - scale * (mu_mat @ table @ mv_mat.T)
    return (sI, sJ), (masks_u, masks_v), (nontriv_u, nontriv_v), (nu, nv), G


def _na_block(measure, levels, ints, scale, dtype, budget, I, J):
    shapes, masks, (nontriv_u, nontriv_v), (nu, nv), G = _block_matrix(
        measure, levels, ints, scale, dtype, budget, I, J
    )
    nondeg_u = nontriv_u & (nu != 0) & (nu != scale)
    nondeg_v = nontriv_v & (nv != 0) & (nv != scale)
    degenerate = bool(
        ((nontriv_u & ~nondeg_u).any() and nontriv_v.any()) or ((nontriv_v & ~nondeg_v).any() and nontriv_u.any())
    )
    return {
        "I": I,
        "J": J,
        "shapes": shapes,
        "masks": masks,
        "strict": _masked_argmin(G, nondeg_u, nondeg_v),
        "interior": _masked_argmin(G, nontriv_u, nontriv_v),
        "violation": _first_negative(G),
        "degenerate": degenerate,
        "count": G.size,
    }


def _scan_na(measure: DiscreteMeasure, budget: int, workers: int, stop_at_violation: bool) -> _Scan:
    _require_grid(measure)
    budget = int(budget)
    tasks = disjoint_block_pairs(measure.dimension)
    shape = measure.shape
    needed = 0
    for I, J in tasks:
        cu = len(upset_masks(Poset(tuple(shape[i] for i in I)), budget))
        cv = len(upset_masks(Poset(tuple(shape[j] for j in J)), budget))
        needed += cu * cv
    if needed > budget:
        raise BudgetExceeded(
            f"NA check needs {needed} up-set pairs, budget is {budget}", reached=needed, budget=budget
        )
    scale, ints = integer_weights(measure)
    levels = [measure.level_index(p) for p in measure.points]
    dtype = np.int64 if scale < INT64_SAFE else object

    def run(task):
        return _na_block(measure, levels, ints, scale, dtype, budget, *task)

    scan = _Scan()
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(run, tasks))
    else:
        blocks = (run(t) for t in tasks)

    for block in blocks:
        scan.pairs_checked += block["count"]
        scan.degenerate = scan.degenerate or block["degenerate"]
        for key in ("strict", "interior"):
            value, where = block[key]
            getattr(scan, key).offer(value, (block, where) if where is not None else None)
        if scan.violation is None and block["violation"] is not None:
            scan.violation = (block["violation"][0], (block, block["violation"][1]))
            if stop_at_violation:
                break
    scan.scale = scale
    return scan


def _na_certificate(entry, value, scale) -> dict:
    block, (a, b) = entry
    (sI, sJ), (mu, mv) = block["shapes"], block["masks"]
    return {
        "I": block["I"],
        "J": block["J"],
        "U": _render_upset(mu[a], sI),
        "V": _render_upset(mv[b], sJ),
        "covariance": -Fraction(int(value), scale * scale),
    }


def na_report(
    measure: DiscreteMeasure, budget: int = 10**7, full_margin: bool = False, workers: int = 1
) -> DependenceReport:
    """Negative association over all disjoint blocks and up-set indicator pairs.

    On failure the certificate is the first violating pair in iteration order
    unless ``full_margin`` asks for the most violating one.
    """
    scan = _scan_na(measure, budget, workers, stop_at_violation=not full_margin)
    L = scan.scale
    if scan.violation is not None and not full_margin:
        value, entry = scan.violation
    elif scan.strict.value is not None:
        # with a violation present this is the most negative covariance overall:
        # a.s.-constant indicators only contribute zeros
        value, entry = scan.strict.value, scan.strict.where
    elif scan.interior.value is not None:
        value, entry = scan.interior.value, scan.interior.where
    else:
        return _report("na", Fraction(0), None, pairs_checked=scan.pairs_checked)
    margin = Fraction(int(value), L * L)
    return _report(
        "na",
        margin,
        _na_certificate(entry, value, L),
        degenerate_pairs_present=scan.degenerate,
        pairs_checked=scan.pairs_checked,
    )


def na_interior_margin(measure: DiscreteMeasure, budget: int = 10**7, workers: int = 1) -> DependenceReport:
    """Uniform NA margin over every pair of non-empty proper up-sets."""
    scan = _scan_na(measure, budget, workers, stop_at_violation=False)
    L = scan.scale
    if scan.interior.value is None:
        return _report("na_interior", Fraction(0), None, pairs_checked=scan.pairs_checked)
    value, entry = scan.interior.value, scan.interior.where
    margin = Fraction(int(value), L * L)
    return _report(
        "na_interior",
        margin,
        _na_certificate(entry, value, L),
        degenerate_pairs_present=scan.degenerate,
        pairs_checked=scan.pairs_checked,
        extra={"tv_ball_radius": margin / 6 if margin > 0 else Fraction(0)},
    )


def na_covariance_rows(measure: DiscreteMeasure, budget: int = 10**7):
    """Yield ``(I, J, U, V, covariance)`` for every pair of non-empty proper up-sets."""
    _require_grid(measure)
    scale, ints = integer_weights(measure)
    levels = [measure.level_index(p) for p in measure.points]
    dtype = np.int64 if scale < INT64_SAFE else object
    for I, J in disjoint_block_pairs(measure.dimension):
        (sI, sJ), (mu, mv), (nontriv_u, nontriv_v), _, G = _block_matrix(
            measure, levels, ints, scale, dtype, int(budget), I, J
        )
        for a in np.nonzero(nontriv_u)[0]:
            for b in np.nonzero(nontriv_v)[0]:
                cov = -Fraction(int(G[a, b]), scale * scale)
                yield I, J, _render_upset(mu[a], sI), _render_upset(mv[b], sJ), cov


# PA


def pa_report(measure: DiscreteMeasure, budget: int = 10**7, full_margin: bool = False) -> DependenceReport:
    """Positive association over all pairs of up-set indicators on the full grid."""
    _require_grid(measure)
    shape = measure.shape
    masks = upset_masks(Poset(shape), budget)
    if len(masks) ** 2 > budget:
        raise BudgetExceeded(
            f"PA check needs {len(masks) ** 2} up-set pairs, budget is {budget}",
            reached=len(masks) ** 2,
            budget=budget,
        )
    _, mat, nontrivial = _indicator_matrix(shape, int(budget))
    scale, ints = integer_weights(measure)
    dtype = np.int64 if scale < INT64_SAFE else object
    w = np.zeros(math.prod(shape), dtype=dtype)
    for p, wi in zip(measure.points, ints):
        w[mixed_radix_index(measure.level_index(p), shape)] += wi
    if dtype is object:
        mat = mat.astype(object)
    n_u = mat @ w
    n_uv = (mat * w) @ mat.T
    # G = L^2 * Cov; PA needs G >= 0
    G = scale * n_uv - np.outer(n_u, n_u)
    nondeg = nontrivial & (n_u != 0) & (n_u != scale)
    degenerate = bool((nontrivial & ~nondeg).any())
    first = _first_negative(G)
    if first is not None and not full_margin:
        value, (a, b) = first
    else:
        value, where = _masked_argmin(G, nondeg, nondeg)
        if value is None:
            value, where = _masked_argmin(G, nontrivial, nontrivial)
        if value is None:
            return _report("pa", Fraction(0), None, pairs_checked=G.size)
        a, b = where
    margin = Fraction(int(value), scale * scale)
    cert = {"U": _render_upset(masks[a], shape), "V": _render_upset(masks[b], shape), "covariance": margin}
    return _report("pa", margin, cert, degenerate_pairs_present=degenerate, pairs_checked=G.size)


# FKG


def fkg_report(measure: DiscreteMeasure) -> DependenceReport:
    """FKG lattice condition over every incomparable pair of grid points."""
    _require_grid(measure)
    shape = measure.shape
    size = math.prod(shape)
    poset = Poset(shape)
    weight = [Fraction(0)] * size
    for p, w in measure.atoms:
        weight[mixed_radix_index(measure.level_index(p), shape)] = w
    levels = [poset.levels(i) for i in range(size)]
    best = None
    checked = 0
    for a in range(size):
        la = levels[a]
        for b in range(a + 1, size):
            lb = levels[b]
            lo = tuple(map(min, la, lb))
            hi = tuple(map(max, la, lb))
            if lo == la or lo == lb:
                continue
            checked += 1
            gap = weight[poset.index(hi)] * weight[poset.index(lo)] - weight[a] * weight[b]
            if best is None or gap < best[0]:
                best = (gap, la, lb)
    if best is None:
        return _report("fkg", Fraction(0), None, pairs_checked=0)
    gap, la, lb = best
    cert = {
        "x": measure.grid_point(la),
        "y": measure.grid_point(lb),
        "x_levels": la,
        "y_levels": lb,
        "gap": gap,
    }
    return _report("fkg", gap, cert, pairs_checked=checked)
