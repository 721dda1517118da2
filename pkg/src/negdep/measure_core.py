"""Exact finitely supported probability measures on R^n.

Every scalar is a :class:`fractions.Fraction`. A measure may optionally carry
a *grid*: for each coordinate a strictly increasing tuple of levels, so that
its support sits on a product of finite chains. Grid-aware code (up-sets,
NA/PA checks, table functions) addresses points by their level vectors.

Grid elements are indexed in little-endian mixed radix: coordinate 0 varies
fastest, so on the cube the point ``(x0, x1, ..., x_{m-1})`` has index
``sum(x_k << k)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import (
    DimensionMismatch,
    DuplicateSupportPoint,
    EmptyIndexSet,
    EvaluationDomainError,
    IndexOutOfRange,
    LambdaOutOfRange,
    MeasureError,
    NegativeWeight,
    NonpositiveScale,
    PointOffGrid,
    WeightsDontSumToOne,
)

Rational = Fraction
Point = tuple  # tuple[Fraction, ...]
Grid = tuple  # tuple[tuple[Fraction, ...], ...]


def as_rational(value) -> Fraction:
    """Coerce int, Fraction or a ``"p/q"`` / decimal string to a Fraction.

    Floats are refused: a float literal such as ``0.1`` is not the rational the
    caller almost certainly meant.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise MeasureError(f"not a rational literal: {value!r}") from exc
    if isinstance(value, float):
        raise TypeError(f"float {value!r} refused; pass a Fraction or a 'p/q' string")
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


def format_rational(q: Fraction) -> str:
    q = as_rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def mixed_radix_index(levels: Sequence[int], shape: Sequence[int]) -> int:
    index, stride = 0, 1
    for level, radix in zip(levels, shape):
        index += level * stride
        stride *= radix
    return index


def mixed_radix_levels(index: int, shape: Sequence[int]) -> tuple:
    levels = []
    for radix in shape:
        index, level = divmod(index, radix)
        levels.append(level)
    return tuple(levels)


def _as_point(point, dimension=None) -> Point:
    coords = tuple(as_rational(c) for c in point)
    if dimension is not None and len(coords) != dimension:
        raise DimensionMismatch(f"point {point!r} has {len(coords)} coordinates, expected {dimension}")
    return coords


@dataclass(frozen=True)
class DiscreteMeasure:
    """Validated, immutable, finitely supported probability measure.

    Build instances with :func:`build_measure`; the constructor itself does no
    checking. ``atoms`` holds only positive weights, sorted by point.
    """

    dimension: int
    atoms: tuple
    grid: Grid | None = None

    @property
    def points(self) -> tuple:
        return tuple(p for p, _ in self.atoms)

    @property
    def weights(self) -> tuple:
        return tuple(w for _, w in self.atoms)

    @cached_property
    def _weight_map(self) -> dict:
        return dict(self.atoms)

    def weight_of(self, point) -> Fraction:
        return self._weight_map.get(_as_point(point), Fraction(0))

    def __len__(self):
        return len(self.atoms)

    # grid helpers

    @property
    def shape(self) -> tuple | None:
        """Chain lengths of the declared grid, or None."""
        if self.grid is None:
            return None
        return tuple(len(levels) for levels in self.grid)

    @cached_property
    def _level_lookup(self) -> tuple:
        return tuple({v: k for k, v in enumerate(levels)} for levels in self.grid)

    def level_index(self, point) -> tuple:
        if self.grid is None:
            raise EvaluationDomainError("measure has no declared grid")
        try:
            return tuple(lookup[c] for lookup, c in zip(self._level_lookup, point))
        except KeyError:
            raise PointOffGrid(f"point {point!r} is not on the declared grid") from None

    def grid_point(self, levels: Sequence[int]) -> Point:
        return tuple(self.grid[k][l] for k, l in enumerate(levels))

    def grid_points(self) -> list:
        """All grid points in little-endian mixed-radix order."""
        shape = self.shape
        size = math.prod(shape)
        return [self.grid_point(mixed_radix_levels(i, shape)) for i in range(size)]

    def expectation(self, f: "FunctionSpec") -> Fraction:
        return sum((w * f.evaluate(self, p) for p, w in self.atoms), Fraction(0))


def build_measure(dimension: int, atoms, grid=None) -> DiscreteMeasure:
    """Validate atoms and return a :class:`DiscreteMeasure`.

    ``atoms`` is an iterable of ``(point, weight)`` pairs or a mapping from
    points to weights. Weights must already sum to exactly one; nothing is
    renormalized. Zero-weight atoms are accepted and dropped.
    """
    if not isinstance(dimension, int) or dimension < 1:
        raise DimensionMismatch(f"dimension must be a positive integer, got {dimension!r}")
    if isinstance(atoms, Mapping):
        atoms = atoms.items()
    atoms = list(atoms)
    if not atoms:
        raise MeasureError("a measure needs at least one atom")

    grid_t = None
    if grid is not None:
        grid_t = tuple(tuple(as_rational(v) for v in levels) for levels in grid)
        if len(grid_t) != dimension:
            raise DimensionMismatch(f"grid has {len(grid_t)} coordinates, expected {dimension}")
        for levels in grid_t:
            if len(levels) < 2:
                raise MeasureError("every grid chain needs at least two levels")
            if any(a >= b for a, b in zip(levels, levels[1:])):
                raise MeasureError(f"grid levels must be strictly increasing: {levels}")

    seen = {}
    total = Fraction(0)
    for point, weight in atoms:
        p = _as_point(point, dimension)
        w = as_rational(weight)
        if w < 0:
            raise NegativeWeight(f"negative weight {w} at {p}")
        if p in seen:
            raise DuplicateSupportPoint(f"support point {p} listed twice")
        if grid_t is not None:
            for levels, c in zip(grid_t, p):
                if c not in levels:
                    raise PointOffGrid(f"point {p} is not on the declared grid")
        seen[p] = w
        total += w
    if total != 1:
        raise WeightsDontSumToOne(f"weights sum to {total}, not 1")

    kept = tuple(sorted((p, w) for p, w in seen.items() if w > 0))
    return DiscreteMeasure(dimension, kept, grid_t)


def _merge(dimension, pairs, grid=None) -> DiscreteMeasure:
    acc: dict = {}
    for p, w in pairs:
        acc[p] = acc.get(p, Fraction(0)) + w
    return build_measure(dimension, acc, grid)


# Convenience builders


def cube_grid(n: int) -> Grid:
    return ((Fraction(0), Fraction(1)),) * n


def point_mass(point, grid=None) -> DiscreteMeasure:
    p = _as_point(point)
    return build_measure(len(p), [(p, 1)], grid)


def cube_measure(weights: Mapping) -> DiscreteMeasure:
    """Measure on {0,1}^n from a mapping of 0/1 tuples (or bit strings) to weights."""
    atoms = []
    for key, w in weights.items():
        if isinstance(key, str):
            key = tuple(int(ch) for ch in key)
        atoms.append((key, w))
    n = len(atoms[0][0])
    return build_measure(n, atoms, cube_grid(n))


def product_measure(factors: Sequence[DiscreteMeasure]) -> DiscreteMeasure:
    """Independent coupling of the given measures (coordinates concatenated)."""
    dimension = sum(f.dimension for f in factors)
    grid = None
    if all(f.grid is not None for f in factors):
        grid = tuple(levels for f in factors for levels in f.grid)
    pairs = []
    for combo in product(*(f.atoms for f in factors)):
        point = tuple(c for p, _ in combo for c in p)
        weight = math.prod((w for _, w in combo), start=Fraction(1))
        pairs.append((point, weight))
    return build_measure(dimension, pairs, grid)


def induce_grid(measure: DiscreteMeasure) -> DiscreteMeasure:
    """Attach the grid of per-coordinate sorted support values.

    A coordinate with a single support value gets a second, unused level one
    unit above it so every chain has length at least two.
    """
    grid = []
    for k in range(measure.dimension):
        levels = sorted({p[k] for p in measure.points})
        if len(levels) == 1:
            levels.append(levels[0] + 1)
        grid.append(tuple(levels))
    return DiscreteMeasure(measure.dimension, measure.atoms, tuple(grid))


# Functions integrated against measures


class FunctionSpec:
    """A real function on R^n that can be evaluated exactly on a measure's support."""

    def evaluate(self, measure: DiscreteMeasure, point) -> Fraction:
        raise NotImplementedError


@dataclass(frozen=True)
class Polynomial(FunctionSpec):
    """Sum of ``coefficient * prod(x_i ** e_i)`` over ``terms``."""

    terms: tuple

    def __post_init__(self):
        cleaned = []
        for exps, coeff in self.terms:
            exps = tuple(int(e) for e in exps)
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            cleaned.append((exps, as_rational(coeff)))
        object.__setattr__(self, "terms", tuple(cleaned))

    @classmethod
    def monomial(cls, exponents, coefficient=1) -> "Polynomial":
        return cls(((tuple(exponents), coefficient),))

    @classmethod
    def coordinate(cls, i: int, n: int) -> "Polynomial":
        exps = [0] * n
        exps[i] = 1
        return cls.monomial(exps)

    @classmethod
    def product_of(cls, i: int, j: int, n: int) -> "Polynomial":
        exps = [0] * n
        exps[i] += 1
        exps[j] += 1
        return cls.monomial(exps)

    @classmethod
    def linear(cls, coefficients) -> "Polynomial":
        n = len(coefficients)
        terms = []
        for i, c in enumerate(coefficients):
            exps = [0] * n
            exps[i] = 1
            terms.append((tuple(exps), c))
        return cls(tuple(terms))

    @classmethod
    def constant(cls, value, n: int) -> "Polynomial":
        return cls.monomial([0] * n, value)

    def evaluate(self, measure, point) -> Fraction:
        total = Fraction(0)
        for exps, coeff in self.terms:
            if len(exps) != len(point):
                raise EvaluationDomainError(
                    f"monomial of arity {len(exps)} evaluated at a {len(point)}-dimensional point"
                )
            term = coeff
            for x, e in zip(point, exps):
                if e:
                    term *= x**e
            total += term
        return total


@dataclass(frozen=True)
class Table(FunctionSpec):
    """Function of the grid levels of the coordinates ``coords``.

    ``values[k]`` is the value at the level vector whose little-endian mixed
    radix index over ``shape`` is ``k``. ``coords=None`` means all coordinates.
    """

    shape: tuple
    values: tuple
    coords: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(int(r) for r in self.shape))
        object.__setattr__(self, "values", tuple(as_rational(v) for v in self.values))
        if self.coords is not None:
            object.__setattr__(self, "coords", tuple(self.coords))
            if len(self.coords) != len(self.shape):
                raise ValueError("coords and shape must have the same length")
        if len(self.values) != math.prod(self.shape):
            raise ValueError(f"table has {len(self.values)} values for a grid of {math.prod(self.shape)} points")

    @classmethod
    def from_mapping(cls, mapping: Mapping, shape, coords=None) -> "Table":
        shape = tuple(shape)
        values = [None] * math.prod(shape)
        for levels, v in mapping.items():
            values[mixed_radix_index(levels, shape)] = v
        if any(v is None for v in values):
            raise ValueError("table mapping does not cover the full grid")
        return cls(shape, tuple(values), coords)

    @classmethod
    def from_function(cls, func, shape, coords=None) -> "Table":
        shape = tuple(shape)
        values = tuple(func(mixed_radix_levels(i, shape)) for i in range(math.prod(shape)))
        return cls(shape, values, coords)

    def value_at(self, levels) -> Fraction:
        return self.values[mixed_radix_index(levels, self.shape)]

    def evaluate(self, measure, point) -> Fraction:
        if measure.grid is None:
            raise EvaluationDomainError("table functions need a measure with a declared grid")
        try:
            levels = measure.level_index(point)
        except PointOffGrid as exc:
            raise EvaluationDomainError(str(exc)) from None
        coords = self.coords if self.coords is not None else tuple(range(len(levels)))
        if any(c >= len(levels) for c in coords):
            raise EvaluationDomainError("table refers to a coordinate the measure does not have")
        restricted = tuple(levels[c] for c in coords)
        if tuple(measure.shape[c] for c in coords) != self.shape:
            raise EvaluationDomainError("table shape does not match the measure's grid")
        return self.value_at(restricted)


# Measure-level operations


def moment(measure: DiscreteMeasure, exponents) -> Fraction:
    exponents = tuple(exponents)
    if len(exponents) != measure.dimension:
        raise DimensionMismatch(f"exponent vector of length {len(exponents)} for dimension {measure.dimension}")
    total = Fraction(0)
    for p, w in measure.atoms:
        term = w
        for x, e in zip(p, exponents):
            if e:
                term *= x**e
        total += term
    return total


def covariance(measure: DiscreteMeasure, f: FunctionSpec, g: FunctionSpec) -> Fraction:
    ef = eg = efg = Fraction(0)
    for p, w in measure.atoms:
        fv = f.evaluate(measure, p)
        gv = g.evaluate(measure, p)
        ef += w * fv
        eg += w * gv
        efg += w * fv * gv
    return efg - ef * eg


def coordinate_covariance(measure: DiscreteMeasure, i: int, j: int) -> Fraction:
    n = measure.dimension
    return covariance(measure, Polynomial.coordinate(i, n), Polynomial.coordinate(j, n))


def means(measure: DiscreteMeasure) -> tuple:
    n = measure.dimension
    return tuple(moment(measure, [int(k == i) for k in range(n)]) for i in range(n))


def marginal(measure: DiscreteMeasure, indices) -> DiscreteMeasure:
    """Pushforward onto the coordinates ``indices`` (0-based, in the given order)."""
    indices = tuple(indices)
    if not indices:
        raise EmptyIndexSet("marginal over an empty index set")
    if len(set(indices)) != len(indices):
        raise MeasureError(f"repeated index in {indices}")
    for i in indices:
        if not 0 <= i < measure.dimension:
            raise IndexOutOfRange(f"index {i} outside 0..{measure.dimension - 1}")
    grid = None if measure.grid is None else tuple(measure.grid[i] for i in indices)
    pairs = ((tuple(p[i] for i in indices), w) for p, w in measure.atoms)
    return _merge(len(indices), pairs, grid)


def _combined_grid(mu: DiscreteMeasure, nu: DiscreteMeasure):
    if mu.grid is None or nu.grid is None:
        return None
    if mu.grid == nu.grid:
        return mu.grid
    return tuple(tuple(sorted(set(a) | set(b))) for a, b in zip(mu.grid, nu.grid))


def mix(mu: DiscreteMeasure, nu: DiscreteMeasure, lam) -> DiscreteMeasure:
    """The mixture ``lam * mu + (1 - lam) * nu``."""
    lam = as_rational(lam)
    if not 0 <= lam <= 1:
        raise LambdaOutOfRange(f"mixing weight {lam} outside [0, 1]")
    if mu.dimension != nu.dimension:
        raise DimensionMismatch("cannot mix measures of different dimension")
    pairs = [(p, lam * w) for p, w in mu.atoms] + [(p, (1 - lam) * w) for p, w in nu.atoms]
    return _merge(mu.dimension, pairs, _combined_grid(mu, nu))


def translate_scale(measure: DiscreteMeasure, scale=1, shift=None) -> DiscreteMeasure:
    """Image of the measure under ``x -> scale * x + shift``."""
    s = as_rational(scale)
    if s <= 0:
        raise NonpositiveScale(f"scale must be positive, got {s}")
    n = measure.dimension
    p_shift = (Fraction(0),) * n if shift is None else _as_point(shift, n)
    grid = None
    if measure.grid is not None:
        grid = tuple(tuple(s * v + p_shift[k] for v in levels) for k, levels in enumerate(measure.grid))
    pairs = [(tuple(s * x + c for x, c in zip(p, p_shift)), w) for p, w in measure.atoms]
    return build_measure(n, pairs, grid)


def tv_distance(mu: DiscreteMeasure, nu: DiscreteMeasure) -> Fraction:
    """Sum of absolute weight differences over the union of supports (range [0, 2])."""
    if mu.dimension != nu.dimension:
        raise DimensionMismatch("tv_distance needs measures of equal dimension")
    a, b = dict(mu.atoms), dict(nu.atoms)
    zero = Fraction(0)
    return sum((abs(a.get(p, zero) - b.get(p, zero)) for p in a.keys() | b.keys()), zero)


class NeighborhoodCheck(NamedTuple):
    contained: bool
    gaps: tuple


def weak_neighborhood_contains(candidate: DiscreteMeasure, center: DiscreteMeasure, tests) -> NeighborhoodCheck:
    """Membership of ``candidate`` in the basic weak neighborhood of ``center``.

    ``tests`` is a sequence of ``(function, epsilon)``; membership requires
    ``|E_candidate f - E_center f| < epsilon`` for each.
    """
    gaps = []
    contained = True
    for f, eps in tests:
        eps = as_rational(eps)
        if eps <= 0:
            raise MeasureError("neighborhood radii must be positive")
        gap = abs(candidate.expectation(f) - center.expectation(f))
        gaps.append(gap)
        contained = contained and gap < eps
    return NeighborhoodCheck(contained, tuple(gaps))


# JSON wire format


def measure_to_dict(measure: DiscreteMeasure) -> dict:
    out = {"dimension": measure.dimension}
    if measure.grid is not None:
        out["grid"] = [[format_rational(v) for v in levels] for levels in measure.grid]
    out["atoms"] = [
        {"point": [format_rational(c) for c in p], "weight": format_rational(w)} for p, w in measure.atoms
    ]
    return out


def measure_from_dict(data: Mapping) -> DiscreteMeasure:
    try:
        dimension = int(data["dimension"])
        atoms = [(a["point"], a["weight"]) for a in data["atoms"]]
    except (KeyError, TypeError) as exc:
        raise MeasureError(f"malformed measure document: {exc}") from None
    return build_measure(dimension, atoms, data.get("grid"))


def dumps_measure(measure: DiscreteMeasure, **kwargs) -> str:
    return json.dumps(measure_to_dict(measure), **kwargs)


def loads_measure(text: str) -> DiscreteMeasure:
    return measure_from_dict(json.loads(text))


def load_measure(path) -> DiscreteMeasure:
    with open(path) as fh:
        return measure_from_dict(json.load(fh))


def save_measure(measure: DiscreteMeasure, path) -> None:
    with open(path, "w") as fh:
        json.dump(measure_to_dict(measure), fh, indent=2)
        fh.write("\n")


def parse_rationals(items: Iterable) -> tuple:
    return tuple(as_rational(x) for x in items)
