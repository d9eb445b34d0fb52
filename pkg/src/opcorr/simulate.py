"""Seeded Monte Carlo measurement.

Trial ``i`` of a run with seed ``s`` draws from its own counter-based
substream (Philox keyed by ``s``, counter block ``i``), so results do not
depend on how trials are split or scheduled: running trials ``[0, k)`` and
``[k, n)`` separately and adding the counts gives the ``[0, n)`` result.

Draws from rational weights are exact: weights are scaled to integers over a
common denominator ``D`` and a uniform integer in ``[0, D)`` is taken by
rejection, so there is no floating-point bias.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, NamedTuple

import numpy as np

from .errors import OddEnsembleSize, SpaceMismatch
from .measures import FiniteSpace, Point, ProbabilityMeasure
from .observables import JointObservable, Observable

__all__ = [
    "CellCheck",
    "EmpiricalMeasure",
    "cell_tolerance",
    "compare",
    "measure_alternating",
    "measure_joint",
    "measure_observable",
    "sample_state",
    "substream",
]

_WORD = 64
_SEED_LIMIT = 2**64


def substream(seed: int, trial: int) -> np.random.Philox:
    """Bit generator for one trial; independent of every other trial index."""
    if not 0 <= seed < _SEED_LIMIT:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if trial < 0:
        raise ValueError(f"trial index must be nonnegative, got {trial}")
    return np.random.Philox(key=seed, counter=[0, trial, 0, 0])


def _below(bitgen: np.random.Philox, bound: int) -> int:
    """Uniform integer in ``[0, bound)`` by masked rejection over raw 64-bit words."""
    if bound == 1:
        return 0
    bits = (bound - 1).bit_length()
    words = -(-bits // _WORD)
    mask = (1 << bits) - 1
    while True:
        v = 0
        for _ in range(words):
            v = (v << _WORD) | int(bitgen.random_raw())
        v &= mask
        if v < bound:
            return v


class _Table:
    """Cumulative integer weights of a measure over its support."""

    __slots__ = ("points", "cumulative", "denom")

    def __init__(self, mu: ProbabilityMeasure):
        self.denom = math.lcm(*(w.denominator for w in mu.weights.values()))
        self.points = list(mu.weights)
        acc, cum = 0, []
        for w in mu.weights.values():
            acc += int(w * self.denom)
            cum.append(acc)
        self.cumulative = cum

    def draw(self, bitgen: np.random.Philox) -> Point:
        u = _below(bitgen, self.denom)
        return self.points[bisect_right(self.cumulative, u)]


@dataclass(frozen=True)
class EmpiricalMeasure:
    space: FiniteSpace
    counts: Mapping[Point, int]
    total: int

    def __post_init__(self) -> None:
        counts = {p: int(self.counts[p]) for p in self.space.points if self.counts.get(p)}
        if sum(counts.values()) != self.total:
            raise ValueError(f"counts sum to {sum(counts.values())}, total is {self.total}")
        object.__setattr__(self, "counts", MappingProxyType(counts))

    @classmethod
    def from_samples(cls, space: FiniteSpace, samples) -> EmpiricalMeasure:
        counts: dict[Point, int] = {}
        n = 0
        for s in samples:
            counts[s] = counts.get(s, 0) + 1
            n += 1
        return cls(space, counts, n)

    def count(self, point: Point) -> int:
        return self.counts.get(point, 0)

    def frequency(self, point: Point) -> Fraction:
        return Fraction(self.count(point), self.total) if self.total else Fraction(0)

    def frequencies(self) -> dict[Point, Fraction]:
        return {p: self.frequency(p) for p in self.space.points}

    def __add__(self, other: EmpiricalMeasure) -> EmpiricalMeasure:
        if not isinstance(other, EmpiricalMeasure):
            return NotImplemented
        if other.space != self.space:
            raise SpaceMismatch(self.space.id, other.space.id, "merge empirical measures")
        counts = dict(self.counts)
        for p, k in other.counts.items():
            counts[p] = counts.get(p, 0) + k
        return EmpiricalMeasure(self.space, counts, self.total + other.total)


def _check_space(mu: ProbabilityMeasure, space: FiniteSpace, who: str) -> None:
    if mu.space != space:
        raise SpaceMismatch(space.id, mu.space.id, who)


def sample_state(mu: ProbabilityMeasure, n: int, seed: int, start: int = 0) -> list[Point]:
    """``n`` i.i.d. phase points drawn from ``mu`` (trials ``start .. start+n-1``)."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    table = _Table(mu)
    return [table.draw(substream(seed, t)) for t in range(start, start + n)]


def _tables(A: Observable | JointObservable) -> dict[Point, _Table]:
    return {w: _Table(row) for w, row in A.kernel.items()}


def measure_observable(
    A: Observable | JointObservable, mu: ProbabilityMeasure, n: int, seed: int, start: int = 0
) -> EmpiricalMeasure:
    """Measure ``A`` on each of ``n`` members of the ensemble ``mu``.

    Each trial draws the phase point first and the outcome second from the
    same substream, so the phase points coincide with :func:`sample_state`
    for the same seed.
    """
    _check_space(mu, A.phase_space, f"measure {A.id!r}")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    state, rows = _Table(mu), _tables(A)
    counts: dict[Point, int] = {}
    for t in range(start, start + n):
        bg = substream(seed, t)
        x = rows[state.draw(bg)].draw(bg)
        counts[x] = counts.get(x, 0) + 1
    return EmpiricalMeasure(A.outcome_space, counts, n)


def measure_joint(
    J: JointObservable, mu: ProbabilityMeasure, n: int, seed: int, start: int = 0
) -> EmpiricalMeasure:
    """Joint measurement: every trial yields an outcome pair drawn from ``J``."""
    return measure_observable(J, mu, n, seed, start)


def measure_alternating(
    A1: Observable, A2: Observable, mu: ProbabilityMeasure, n: int, seed: int
) -> tuple[EmpiricalMeasure, EmpiricalMeasure]:
    """Simultaneous but not joint: ``A1`` on even trials, ``A2`` on odd ones.

    Returns one empirical measure per observable (``n/2`` samples each) and
    no pair counts at all.
    """
    if n % 2:
        raise OddEnsembleSize(n)
    _check_space(mu, A1.phase_space, f"measure {A1.id!r}")
    _check_space(mu, A2.phase_space, f"measure {A2.id!r}")
    state = _Table(mu)
    rows = (_tables(A1), _tables(A2))
    counts: tuple[dict, dict] = ({}, {})
    for t in range(n):
        bg = substream(seed, t)
        side = t % 2
        x = rows[side][state.draw(bg)].draw(bg)
        counts[side][x] = counts[side].get(x, 0) + 1
    return (
        EmpiricalMeasure(A1.outcome_space, counts[0], n // 2),
        EmpiricalMeasure(A2.outcome_space, counts[1], n // 2),
    )


def cell_tolerance(p: Fraction | float, n: int, sigmas: float = 4.0) -> float:
    """``sigmas * sqrt(p(1-p)/n) + 1/n``: binomial band for one cell frequency."""
    p = float(p)
    return sigmas * math.sqrt(p * (1 - p) / n) + 1 / n


class CellCheck(NamedTuple):
    point: Point
    exact: Fraction
    observed: Fraction
    tolerance: float

    @property
    def deviation(self) -> float:
        return abs(float(self.observed - self.exact))

    @property
    def ok(self) -> bool:
        return self.deviation <= self.tolerance


def compare(
    empirical: EmpiricalMeasure, exact: ProbabilityMeasure, sigmas: float = 4.0
) -> list[CellCheck]:
    """Per-cell comparison of observed frequencies against an exact measure."""
    if empirical.space != exact.space:
        raise SpaceMismatch(exact.space.id, empirical.space.id, "compare")
    n = empirical.total
    return [
        CellCheck(p, exact[p], empirical.frequency(p), cell_tolerance(exact[p], n, sigmas))
        for p in exact.space.points
    ]
