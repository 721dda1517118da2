"""Up-sets of products of finite chains and the layer-cake decomposition.

A non-decreasing function on a finite product of chains equals its minimum
plus a positive combination of indicators of nested up-sets (its upper level
sets). Covariance is bilinear and constants contribute nothing, so the sign of
``Cov(f, g)`` over all monotone pairs is decided by the indicator pairs alone.
That turns the quantifier over monotone functions in the NA/PA definitions
into a finite enumeration.

Up-sets are stored as Python ``int`` bitmasks over the poset's elements in
little-endian mixed-radix order (see :mod:`negdep.measure_core`).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

from .errors import BudgetExceeded, NotMonotone, PosetMismatch
from .measure_core import Table, as_rational, mixed_radix_index, mixed_radix_levels

# Up-set counts of the Boolean cube {0,1}^m, m = 0..6.
DEDEKIND = (2, 3, 6, 20, 168, 7581, 7828354)


@dataclass(frozen=True)
class Poset:
    """Product of chains ``{0..r_0-1} x ... x {0..r_{m-1}-1}`` under the product order."""

    shape: tuple

    def __post_init__(self):
        shape = tuple(int(r) for r in self.shape)
        if any(r < 2 for r in shape):
            raise ValueError(f"chain lengths must be at least 2, got {shape}")
        object.__setattr__(self, "shape", shape)

    @classmethod
    def cube(cls, m: int) -> "Poset":
        return cls((2,) * m)

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    @cached_property
    def strides(self) -> tuple:
        out, s = [], 1
        for r in self.shape:
            out.append(s)
            s *= r
        return tuple(out)

    def index(self, levels) -> int:
        return mixed_radix_index(levels, self.shape)

    def levels(self, index: int) -> tuple:
        return mixed_radix_levels(index, self.shape)

    @cached_property
    def _not_top(self) -> tuple:
        # per coordinate: mask of elements whose level can still be raised
        masks = []
        for k, r in enumerate(self.shape):
            m = 0
            for i in range(self.size):
                if self.levels(i)[k] < r - 1:
                    m |= 1 << i
            masks.append(m)
        return tuple(masks)

    @cached_property
    def covers(self) -> tuple:
        """``covers[i]``: indices of the elements covering element ``i``."""
        out = []
        for i in range(self.size):
            lv = self.levels(i)
            out.append(tuple(i + s for k, s in enumerate(self.strides) if lv[k] < self.shape[k] - 1))
        return tuple(out)

    def leq(self, a: int, b: int) -> bool:
        return all(x <= y for x, y in zip(self.levels(a), self.levels(b)))


def meet_join(a: Sequence[int], b: Sequence[int], poset: Poset | None = None):
    """Componentwise minimum and maximum of two level vectors."""
    a, b = tuple(a), tuple(b)
    if len(a) != len(b):
        raise PosetMismatch(f"level vectors {a} and {b} have different lengths")
    if poset is not None:
        if len(a) != len(poset.shape) or any(not 0 <= x < r for v in (a, b) for x, r in zip(v, poset.shape)):
            raise PosetMismatch(f"{a} or {b} is not an element of {poset.shape}")
    return tuple(map(min, a, b)), tuple(map(max, a, b))


def is_upset(poset: Poset, mask: int) -> bool:
    if mask < 0 or mask > poset.full_mask:
        return False
    for stride, not_top in zip(poset.strides, poset._not_top):
        if ((mask & not_top) << stride) & ~mask:
            return False
    return True


def is_downset(poset: Poset, mask: int) -> bool:
    return is_upset(poset, poset.full_mask & ~mask)


@dataclass(frozen=True)
class UpSet:
    poset: Poset
    mask: int

    def __contains__(self, levels) -> bool:
        return bool(self.mask >> self.poset.index(levels) & 1)

    def __len__(self):
        return bin(self.mask).count("1")

    @property
    def is_trivial(self) -> bool:
        return self.mask == 0 or self.mask == self.poset.full_mask

    def members(self) -> list:
        """Sorted level vectors of the up-set's elements."""
        return sorted(self.poset.levels(i) for i in range(self.poset.size) if self.mask >> i & 1)

    def indicator(self, coords=None) -> Table:
        values = tuple((self.mask >> i) & 1 for i in range(self.poset.size))
        return Table(self.poset.shape, values, coords)


def _chains(masks: Sequence[int], length: int):
    """All non-decreasing (under inclusion) sequences of ``length`` masks."""
    if length == 1:
        for m in masks:
            yield (m,)
        return
    supersets = {a: [b for b in masks if a & ~b == 0] for a in masks}

    def extend(prefix):
        if len(prefix) == length:
            yield prefix
            return
        for b in supersets[prefix[-1]]:
            yield from extend(prefix + (b,))

    for a in masks:
        yield from extend((a,))


@lru_cache(maxsize=64)
def _upset_masks(shape: tuple, budget: int) -> tuple:
    if not shape:
        return (0, 1)
    *rest, radix = shape
    inner = _upset_masks(tuple(rest), budget)
    block = math.prod(rest)
    out = []
    # the last coordinate is the most significant digit; its slices must grow
    # with the level for the set to be upward closed
    for chain in _chains(inner, radix):
        mask = 0
        for level, m in enumerate(chain):
            mask |= m << (block * level)
        out.append(mask)
        if len(out) > budget:
            raise BudgetExceeded(
                f"more than {budget} up-sets for shape {shape}", reached=len(out), budget=budget
            )
    out.sort(key=lambda m: (bin(m).count("1"), m))
    return tuple(out)


def upset_masks(poset: Poset, budget: int = 10**6) -> tuple:
    """Bitmasks of every up-set, ordered by cardinality then mask value."""
    if math.prod(poset.shape) > 0 and _count_bound(poset.shape) > budget:
        raise BudgetExceeded(
            f"up-set count of {poset.shape} exceeds budget {budget}",
            reached=min(_count_bound(poset.shape), budget + 1),
            budget=budget,
        )
    return _upset_masks(poset.shape, int(budget))


def _count_bound(shape: tuple) -> int:
    # exact for cubes up to m=6; otherwise let enumeration enforce the budget
    if all(r == 2 for r in shape) and len(shape) < len(DEDEKIND):
        return DEDEKIND[len(shape)]
    if all(r == 2 for r in shape):
        return 2**63
    return 0


def enumerate_upsets(poset: Poset, budget: int = 10**6) -> list:
    """Every up-set of ``poset`` (including the empty and full sets) in a fixed order."""
    return [UpSet(poset, m) for m in upset_masks(poset, budget)]


def count_upsets(shape: Sequence[int], budget: int = 10**6) -> int:
    shape = tuple(shape)
    if not shape:
        return 2
    return len(upset_masks(Poset(shape), budget))


class MonotoneTable(Table):
    """A :class:`Table` whose values are non-decreasing along the product order."""

    def __post_init__(self):
        super().__post_init__()
        poset = Poset(self.shape)
        for i, succ in enumerate(poset.covers):
            for j in succ:
                if self.values[i] > self.values[j]:
                    raise NotMonotone(f"value drops from {poset.levels(i)} to {poset.levels(j)}")

    @property
    def poset(self) -> Poset:
        return Poset(self.shape)

    @classmethod
    def from_table(cls, table: Table) -> "MonotoneTable":
        return cls(table.shape, table.values, table.coords)


def layer_cake(f: Table):
    """Split a monotone table into ``(base, [(coefficient, UpSet), ...])``.

    ``f(x) == base + sum(c for c, U in terms if x in U)`` for every element;
    coefficients are positive and the up-sets strictly decrease.
    """
    if not isinstance(f, MonotoneTable):
        f = MonotoneTable.from_table(f)
    poset = f.poset
    levels = sorted(set(f.values))
    base = levels[0]
    terms = []
    for lo, hi in zip(levels, levels[1:]):
        mask = 0
        for i, v in enumerate(f.values):
            if v >= hi:
                mask |= 1 << i
        terms.append((hi - lo, UpSet(poset, mask)))
    return base, terms


def reconstruct(base, terms, poset: Poset) -> tuple:
    values = []
    for i in range(poset.size):
        v = base
        for c, u in terms:
            if u.mask >> i & 1:
                v += c
        values.append(v)
    return tuple(values)


def random_monotone(poset: Poset, value_count: int, seed, coords=None) -> MonotoneTable:
    """Seeded random monotone table with at most ``value_count`` distinct values."""
    if value_count < 1:
        raise ValueError("value_count must be at least 1")
    rng = random.Random(seed)
    steps = [Fraction(rng.randint(1, 9), rng.randint(1, 4)) for _ in range(value_count - 1)]
    value_of = [Fraction(rng.randint(-3, 3))]
    for s in steps:
        value_of.append(value_of[-1] + s)
    raw = [rng.randrange(value_count) for _ in range(poset.size)]
    size = poset.size
    if rng.random() < 0.5:
        # running max over the down-set: index order visits predecessors first
        lv = list(raw)
        for i in range(size):
            levels = poset.levels(i)
            for k, s in enumerate(poset.strides):
                if levels[k] > 0:
                    lv[i] = max(lv[i], lv[i - s])
    else:
        lv = list(raw)
        for i in reversed(range(size)):
            for j in poset.covers[i]:
                lv[i] = min(lv[i], lv[j])
    return MonotoneTable(poset.shape, tuple(value_of[v] for v in lv), coords)


def add_tables(f: Table, g: Table) -> Table:
    if f.shape != g.shape:
        raise PosetMismatch("tables over different posets")
    return Table(f.shape, tuple(a + b for a, b in zip(f.values, g.values)), f.coords)


def scale_table(f: Table, c) -> Table:
    c = as_rational(c)
    return Table(f.shape, tuple(c * v for v in f.values), f.coords)
