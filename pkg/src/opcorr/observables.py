"""Observables as stochastic kernels on a finite phase space.

An observable is stored only through its values on pure states (one outcome
distribution per phase point); its action on a mixed state is always the
kernel average ``(A mu)(x) = sum_w mu(w) * (A delta_w)(x)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Callable, Mapping

from .errors import (
    MarginalMismatch,
    NotNormalized,
    SpaceMismatch,
    UnknownPoint,
    ValidationError,
)
from .measures import (
    FiniteSpace,
    Measure,
    Point,
    ProbabilityMeasure,
    dirac,
    marginal,
    product,
    product_space,
)

__all__ = [
    "JointObservable",
    "Observable",
    "apply",
    "deterministic_observable",
    "is_deterministic",
    "make_joint",
    "marginal_observable",
    "product_joint",
]


def _as_row(raw, space: FiniteSpace, label: str) -> ProbabilityMeasure:
    if isinstance(raw, ProbabilityMeasure):
        if raw.space != space:
            raise SpaceMismatch(space.id, raw.space.id, label)
        return raw
    if isinstance(raw, Measure):
        raw = raw.weights
    try:
        return ProbabilityMeasure(space, raw)
    except NotNormalized as exc:
        raise NotNormalized(exc.total, label) from None


@dataclass(frozen=True, eq=False)
class Observable:
    """A Markov kernel from ``phase_space`` to ``outcome_space``.

    Equality is extensional: two observables with the same spaces and the
    same kernel rows are equal regardless of ``id``.
    """

    id: str
    phase_space: FiniteSpace
    outcome_space: FiniteSpace
    kernel: Mapping[Point, ProbabilityMeasure]

    def __post_init__(self) -> None:
        rows = {}
        for omega in self.kernel:
            if omega not in self.phase_space:
                raise UnknownPoint(omega, self.phase_space.id)
        for omega in self.phase_space.points:
            if omega not in self.kernel:
                raise ValidationError(f"observable {self.id!r} has no row for {omega!r}")
            rows[omega] = _as_row(
                self.kernel[omega], self.outcome_space, f"observable {self.id!r} row {omega!r}"
            )
        object.__setattr__(self, "kernel", MappingProxyType(rows))

    def row(self, omega: Point) -> ProbabilityMeasure:
        try:
            return self.kernel[omega]
        except KeyError:
            raise UnknownPoint(omega, self.phase_space.id) from None

    def __call__(self, mu: ProbabilityMeasure) -> ProbabilityMeasure:
        return apply(self, mu)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Observable):
            return NotImplemented
        return (
            self.phase_space == other.phase_space
            and self.outcome_space == other.outcome_space
            and dict(self.kernel) == dict(other.kernel)
        )

    def __hash__(self) -> int:
        return hash((self.phase_space, self.outcome_space, tuple(self.kernel.values())))


def deterministic_observable(
    id: str,
    phase_space: FiniteSpace,
    outcome_space: FiniteSpace,
    f: Callable[[Point], Point] | Mapping[Point, Point],
) -> Observable:
    """The observable of a classical random variable ``f``: row ``w`` is ``delta_f(w)``."""
    get = f.__getitem__ if isinstance(f, Mapping) else f
    kernel = {w: dirac(outcome_space, get(w)) for w in phase_space.points}
    return Observable(id, phase_space, outcome_space, kernel)


def apply(A: Observable | JointObservable, mu: ProbabilityMeasure) -> ProbabilityMeasure:
    """Outcome measure of ``A`` at state ``mu``."""
    if mu.space != A.phase_space:
        raise SpaceMismatch(A.phase_space.id, mu.space.id, f"apply {A.id!r}")
    acc: dict[Point, Fraction] = {}
    for omega, m in mu.weights.items():
        for x, w in A.kernel[omega].weights.items():
            acc[x] = acc.get(x, Fraction(0)) + m * w
    return ProbabilityMeasure._trusted(A.outcome_space, acc)


def is_deterministic(A: Observable | JointObservable) -> bool:
    """True iff every pure state is sent to a Dirac measure."""
    return all(len(row.weights) == 1 for row in A.kernel.values())


@dataclass(frozen=True, eq=False)
class JointObservable:
    """An observable into ``left.outcome_space x right.outcome_space`` with the given marginals.

    Construction checks every row's marginals exactly, so any instance is a
    genuine joint of ``left`` and ``right``.
    """

    base: Observable
    left: Observable
    right: Observable

    def __post_init__(self) -> None:
        A1, A2, base = self.left, self.right, self.base
        for side in (A1, A2):
            if side.phase_space != base.phase_space:
                raise SpaceMismatch(
                    base.phase_space.id, side.phase_space.id, f"joint {base.id!r}"
                )
        expected = product_space(A1.outcome_space, A2.outcome_space)
        if base.outcome_space != expected:
            raise SpaceMismatch(expected.id, base.outcome_space.id, f"joint {base.id!r}")
        for omega, row in base.kernel.items():
            for index, side in ((1, A1), (2, A2)):
                got = marginal(row, index)
                if got != side.kernel[omega]:
                    raise MarginalMismatch(omega, index, side.kernel[omega], got)

    @property
    def id(self) -> str:
        return self.base.id

    @property
    def phase_space(self) -> FiniteSpace:
        return self.base.phase_space

    @property
    def outcome_space(self) -> FiniteSpace:
        return self.base.outcome_space

    @property
    def kernel(self) -> Mapping[Point, ProbabilityMeasure]:
        return self.base.kernel

    def row(self, omega: Point) -> ProbabilityMeasure:
        return self.base.row(omega)

    def __call__(self, mu: ProbabilityMeasure) -> ProbabilityMeasure:
        return apply(self.base, mu)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, JointObservable):
            return NotImplemented
        return (self.base, self.left, self.right) == (other.base, other.left, other.right)

    def __hash__(self) -> int:
        return hash((self.base, self.left, self.right))


def make_joint(
    A1: Observable,
    A2: Observable,
    rows: Mapping[Point, ProbabilityMeasure | Mapping],
    id: str | None = None,
) -> JointObservable:
    """Wrap per-pure-state couplings as a joint observable of ``A1`` and ``A2``.

    Raises :class:`MarginalMismatch` naming the first offending phase point.
    """
    if A1.phase_space != A2.phase_space:
        raise SpaceMismatch(A1.phase_space.id, A2.phase_space.id, "make_joint")
    space = product_space(A1.outcome_space, A2.outcome_space)
    base = Observable(id or f"J({A1.id},{A2.id})", A1.phase_space, space, rows)
    return JointObservable(base, A1, A2)


def product_joint(A1: Observable, A2: Observable, id: str | None = None) -> JointObservable:
    """The product joint observable: row ``w`` is ``A1 delta_w x A2 delta_w``."""
    if A1.phase_space != A2.phase_space:
        raise SpaceMismatch(A1.phase_space.id, A2.phase_space.id, "product_joint")
    rows = {w: product(A1.kernel[w], A2.kernel[w]) for w in A1.phase_space.points}
    return make_joint(A1, A2, rows, id or f"{A1.id}*{A2.id}")


def marginal_observable(J: JointObservable, index: int) -> Observable:
    """``Pi_index o J``, recomputed from the joint's rows."""
    if index not in (1, 2):
        raise ValueError(f"index must be 1 or 2, got {index!r}")
    stored = J.left if index == 1 else J.right
    rows = {w: marginal(row, index) for w, row in J.kernel.items()}
    return Observable(stored.id, J.phase_space, stored.outcome_space, rows)
