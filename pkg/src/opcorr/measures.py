"""Finite spaces and exact measures on them.

Everything here is finite and exact: weights are :class:`fractions.Fraction`
values, every subset of a :class:`FiniteSpace` is measurable, and absolute
continuity reduces to support inclusion.  Zero weights are never stored, so
``measure.support`` is just the set of keys.

>>> coin = FiniteSpace("coin", ("h", "t"))
>>> fair = make_probability_measure(coin, {"h": "1/2", "t": "1/2"})
>>> marginal(product(fair, dirac(coin, "h")), 2) == dirac(coin, "h")
True
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product as cartesian
from types import MappingProxyType
from typing import Any, Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import (
    NegativeWeight,
    NotAbsolutelyContinuous,
    NotNormalized,
    NotProductSpace,
    SpaceMismatch,
    UndefinedDensity,
    UnknownPoint,
    ValidationError,
    WeightsNotConvex,
)

Point = Hashable
RationalLike = Fraction | int | str

__all__ = [
    "Density",
    "FiniteSpace",
    "Measure",
    "ProbabilityMeasure",
    "as_fraction",
    "dirac",
    "is_absolutely_continuous",
    "make_probability_measure",
    "marginal",
    "mix",
    "product",
    "product_space",
    "radon_nikodym",
    "uniform",
]


def as_fraction(value: Any) -> Fraction:
    """Convert an exact number (int, Fraction, ``"p/q"`` string) to Fraction.

    Floats are refused: ``Fraction(0.1)`` is exact but almost never what the
    caller meant.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not weights")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, numbers.Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError:
            raise ValueError(f"not a rational number: {value!r}") from None
    raise TypeError(f"expected an exact rational, got {type(value).__name__} {value!r}")


@dataclass(frozen=True)
class FiniteSpace:
    """A finite set of labelled points; the power set is its sigma-algebra.

    A product space carries its two ``factors`` and its points are the
    ordered pairs of factor points, in row-major (lexicographic) order.
    """

    id: str
    points: tuple
    factors: tuple[FiniteSpace, FiniteSpace] | None = None
    _index: Mapping[Point, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        points = tuple(self.points)
        object.__setattr__(self, "points", points)
        if not points:
            raise ValidationError(f"space {self.id!r} has no points")
        index = {p: i for i, p in enumerate(points)}
        if len(index) != len(points):
            seen: set = set()
            dup = next(p for p in points if p in seen or seen.add(p))
            raise ValidationError(f"space {self.id!r} repeats point {dup!r}")
        if self.factors is not None:
            left, right = self.factors
            if points != tuple(cartesian(left.points, right.points)):
                raise ValidationError(
                    f"space {self.id!r} does not enumerate {left.id} x {right.id}"
                )
        object.__setattr__(self, "_index", MappingProxyType(index))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __contains__(self, point: object) -> bool:
        try:
            return point in self._index
        except TypeError:  # unhashable
            return False

    def index(self, point: Point) -> int:
        try:
            return self._index[point]
        except (KeyError, TypeError):
            raise UnknownPoint(point, self.id) from None

    @property
    def is_product(self) -> bool:
        return self.factors is not None

    @property
    def product_of(self) -> tuple[str, str] | None:
        if self.factors is None:
            return None
        return (self.factors[0].id, self.factors[1].id)

    def factor(self, index: int) -> FiniteSpace:
        if self.factors is None:
            raise NotProductSpace(self.id)
        if index not in (1, 2):
            raise ValueError(f"factor index must be 1 or 2, got {index!r}")
        return self.factors[index - 1]


@lru_cache(maxsize=None)
def product_space(left: FiniteSpace, right: FiniteSpace) -> FiniteSpace:
    """The declared product ``left x right``; cached so equal inputs share one object."""
    return FiniteSpace(
        f"{left.id}*{right.id}",
        tuple(cartesian(left.points, right.points)),
        factors=(left, right),
    )


class Measure:
    """A finite nonnegative measure with exact rational weights."""

    __slots__ = ("_space", "_weights", "_hash")

    def __init__(self, space: FiniteSpace, weights: Mapping[Point, RationalLike]):
        clean: dict[Point, Fraction] = {}
        for point, raw in weights.items():
            if point not in space:
                raise UnknownPoint(point, space.id)
            w = as_fraction(raw)
            if w < 0:
                raise NegativeWeight(point, w)
            if w:
                clean[point] = clean.get(point, Fraction(0)) + w
        self._init(space, clean)

    def _init(self, space: FiniteSpace, clean: dict[Point, Fraction]) -> None:
        ordered = {p: clean[p] for p in space.points if p in clean}
        self._space = space
        self._weights = MappingProxyType(ordered)
        self._hash = None

    @classmethod
    def _trusted(cls, space: FiniteSpace, clean: dict[Point, Fraction]):
        # caller guarantees: known points, Fraction values > 0 (zeros are dropped here)
        obj = cls.__new__(cls)
        Measure._init(obj, space, {p: w for p, w in clean.items() if w})
        return obj

    @property
    def space(self) -> FiniteSpace:
        return self._space

    @property
    def weights(self) -> Mapping[Point, Fraction]:
        return self._weights

    @property
    def support(self) -> tuple:
        """Points of positive weight, in declared order."""
        return tuple(self._weights)

    @property
    def total(self) -> Fraction:
        return sum(self._weights.values(), Fraction(0))

    def __getitem__(self, point: Point) -> Fraction:
        if point not in self._space:
            raise UnknownPoint(point, self._space.id)
        return self._weights.get(point, Fraction(0))

    def mass(self, points: Iterable[Point]) -> Fraction:
        """Measure of a subset (duplicates in ``points`` are counted once)."""
        return sum((self[p] for p in set(points)), Fraction(0))

    def items(self):
        return self._weights.items()

    def is_dirac(self) -> bool:
        return len(self._weights) == 1 and self.total == 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Measure):
            return NotImplemented
        return self._space == other._space and self._weights == other._weights

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._space, tuple(self._weights.items())))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{p!r}: {w}" for p, w in self._weights.items())
        return f"{type(self).__name__}({self._space.id}, {{{body}}})"


class ProbabilityMeasure(Measure):
    """A measure whose weights sum to exactly 1."""

    __slots__ = ()

    def __init__(self, space: FiniteSpace, weights: Mapping[Point, RationalLike]):
        super().__init__(space, weights)
        total = self.total
        if total != 1:
            raise NotNormalized(total)


def make_probability_measure(
    space: FiniteSpace, weights: Mapping[Point, RationalLike]
) -> ProbabilityMeasure:
    return ProbabilityMeasure(space, weights)


def dirac(space: FiniteSpace, point: Point) -> ProbabilityMeasure:
    if point not in space:
        raise UnknownPoint(point, space.id)
    return ProbabilityMeasure._trusted(space, {point: Fraction(1)})


def uniform(space: FiniteSpace) -> ProbabilityMeasure:
    w = Fraction(1, len(space))
    return ProbabilityMeasure._trusted(space, {p: w for p in space.points})


def mix(
    components: Sequence[tuple[RationalLike, ProbabilityMeasure]],
) -> ProbabilityMeasure:
    """Convex combination ``sum_i lam_i * mu_i`` of measures on one space."""
    if not components:
        raise WeightsNotConvex([])
    lams = [as_fraction(lam) for lam, _ in components]
    if any(lam < 0 for lam in lams) or sum(lams) != 1:
        raise WeightsNotConvex(lams)
    space = components[0][1].space
    acc: dict[Point, Fraction] = {}
    for lam, (_, mu) in zip(lams, components):
        if mu.space != space:
            raise SpaceMismatch(space.id, mu.space.id, "mix")
        if mu.total != 1:
            raise NotNormalized(mu.total, "mix component")
        if not lam:
            continue
        for p, w in mu.weights.items():
            acc[p] = acc.get(p, Fraction(0)) + lam * w
    return ProbabilityMeasure._trusted(space, acc)


def product(nu1: Measure, nu2: Measure) -> ProbabilityMeasure | Measure:
    """Product measure on the declared product of the two spaces."""
    space = product_space(nu1.space, nu2.space)
    weights = {
        (x, y): wx * wy for x, wx in nu1.weights.items() for y, wy in nu2.weights.items()
    }
    cls = (
        ProbabilityMeasure
        if isinstance(nu1, ProbabilityMeasure) and isinstance(nu2, ProbabilityMeasure)
        else Measure
    )
    return cls._trusted(space, weights)


def marginal(nu: Measure, index: int) -> ProbabilityMeasure | Measure:
    """Push ``nu`` forward along the projection onto factor ``index`` (1 or 2)."""
    target = nu.space.factor(index)
    i = index - 1
    acc: dict[Point, Fraction] = {}
    for pair, w in nu.weights.items():
        acc[pair[i]] = acc.get(pair[i], Fraction(0)) + w
    cls = ProbabilityMeasure if isinstance(nu, ProbabilityMeasure) else Measure
    return cls._trusted(target, acc)


def _null_witness(num: Measure, den: Measure) -> Point | None:
    if num.space != den.space:
        raise SpaceMismatch(den.space.id, num.space.id, "absolute continuity")
    for p in num.weights:
        if p not in den.weights:
            return p
    return None


def is_absolutely_continuous(num: Measure, den: Measure) -> bool:
    """``num << den``: every point charged by ``num`` is charged by ``den``."""
    return _null_witness(num, den) is None


class Density:
    """A nonnegative function defined exactly on the support of a reference measure.

    Outside ``domain`` the density is *undefined*, which is distinct from 0:
    ``density[p]`` raises :class:`UndefinedDensity` and ``density.get(p)``
    returns ``None``.
    """

    __slots__ = ("_space", "_values")

    def __init__(self, space: FiniteSpace, values: Mapping[Point, RationalLike]):
        clean = {}
        for p in space.points:
            if p in values:
                v = as_fraction(values[p])
                if v < 0:
                    raise NegativeWeight(p, v)
                clean[p] = v
        extra = set(values) - set(clean)
        if extra:
            raise UnknownPoint(next(iter(extra)), space.id)
        self._space = space
        self._values = MappingProxyType(clean)

    @property
    def space(self) -> FiniteSpace:
        return self._space

    @property
    def domain(self) -> tuple:
        return tuple(self._values)

    @property
    def values(self) -> Mapping[Point, Fraction]:
        return self._values

    def defined_at(self, point: Point) -> bool:
        return point in self._values

    def __getitem__(self, point: Point) -> Fraction:
        if point not in self._space:
            raise UnknownPoint(point, self._space.id)
        try:
            return self._values[point]
        except KeyError:
            raise UndefinedDensity(point) from None

    def get(self, point: Point, default: Any = None) -> Fraction | Any:
        return self._values.get(point, default)

    def items(self):
        return self._values.items()

    def is_constant(self, value: RationalLike = 1) -> bool:
        c = as_fraction(value)
        return all(v == c for v in self._values.values())

    def integrate(self, reference: Measure, points: Iterable[Point]) -> Fraction:
        """``sum_{p in points} density(p) * reference(p)`` over the defined points."""
        return sum(
            (self._values[p] * reference[p] for p in set(points) if p in self._values),
            Fraction(0),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Density):
            return NotImplemented
        return self._space == other._space and self._values == other._values

    def __hash__(self) -> int:
        return hash((self._space, tuple(self._values.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"{p!r}: {v}" for p, v in self._values.items())
        return f"Density({self._space.id}, {{{body}}})"


def radon_nikodym(num: Measure, den: Measure) -> Density:
    """Discrete Radon-Nikodym derivative ``d num / d den`` on ``support(den)``."""
    witness = _null_witness(num, den)
    if witness is not None:
        raise NotAbsolutelyContinuous(witness, num[witness])
    nw = num.weights
    values = {p: nw.get(p, Fraction(0)) / w for p, w in den.weights.items()}
    d = Density.__new__(Density)
    d._space = den.space
    d._values = MappingProxyType(values)
    return d
