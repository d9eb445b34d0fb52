"""Independence, correlation densities and their product rule.

For a joint observable ``J`` of ``A1``, ``A2`` and a state ``mu`` three
measures on the outcome product are compared:

* ``A1mu x A2mu``   independent pairing of the two outcome measures,
* ``(A1xA2) mu``    the product joint observable measured at ``mu``,
* ``J mu``          the joint observable measured at ``mu``.

``rho_c`` compares the second to the first (classical correlation, carried by
the mixedness of ``mu``), ``rho_e`` the third to the second (entanglement,
carried by the choice of joint) and ``rho_t`` the third to the first.  On a
finite space ``rho_t == rho_c * rho_e`` wherever ``rho_e`` is defined.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, NamedTuple

from .errors import NotAbsolutelyContinuous, SpaceMismatch, UndefinedCoefficient, UnknownPoint
from .measures import (
    Density,
    Measure,
    Point,
    ProbabilityMeasure,
    as_fraction,
    marginal,
    product,
    product_space,
    radon_nikodym,
)
from .observables import JointObservable, Observable, apply

__all__ = [
    "Classification",
    "CorrelationCoefficient",
    "CorrelationReport",
    "classify",
    "correlation_coefficient",
    "covariance",
    "independent_at",
    "independent_pairing",
    "is_independent",
    "product_outcome",
    "product_rule_witness",
    "rho_c",
    "rho_e",
    "rho_t",
]


class Classification(str, enum.Enum):
    INDEPENDENT = "independent"
    CLASSICAL_ONLY = "classical_only"
    ENTANGLED_ONLY = "entangled_only"
    BOTH = "both"

    @classmethod
    def from_flags(cls, classical: bool, entangled: bool) -> Classification:
        if classical and entangled:
            return cls.BOTH
        if classical:
            return cls.CLASSICAL_ONLY
        if entangled:
            return cls.ENTANGLED_ONLY
        return cls.INDEPENDENT


def _check_state(A: Observable | JointObservable, mu: ProbabilityMeasure) -> None:
    if mu.space != A.phase_space:
        raise SpaceMismatch(A.phase_space.id, mu.space.id, f"state for {A.id!r}")


def independent_pairing(A1: Observable, A2: Observable, mu: ProbabilityMeasure):
    """``A1 mu x A2 mu``."""
    return product(apply(A1, mu), apply(A2, mu))


def product_outcome(A1: Observable, A2: Observable, mu: ProbabilityMeasure):
    """``(A1 x A2) mu`` computed as the ``mu``-average of the row products.

    Same measure as ``apply(product_joint(A1, A2), mu)`` without building and
    re-validating the joint.
    """
    _check_state(A1, mu)
    _check_state(A2, mu)
    space = product_space(A1.outcome_space, A2.outcome_space)
    acc: dict[Point, Fraction] = {}
    for omega, m in mu.weights.items():
        r1, r2 = A1.kernel[omega].weights, A2.kernel[omega].weights
        for x, wx in r1.items():
            mx = m * wx
            for y, wy in r2.items():
                acc[(x, y)] = acc.get((x, y), Fraction(0)) + mx * wy
    return ProbabilityMeasure._trusted(space, acc)


def is_independent(nu: Measure) -> bool:
    """``nu == Pi1 nu x Pi2 nu`` exactly."""
    return nu == product(marginal(nu, 1), marginal(nu, 2))


def independent_at(J: JointObservable, mu: ProbabilityMeasure) -> bool:
    """Are ``J``'s marginals independent at ``mu`` relative to ``J``?"""
    _check_state(J, mu)
    return apply(J, mu) == independent_pairing(J.left, J.right, mu)


def _density(num: Measure, den: Measure, name: str) -> Density:
    try:
        return radon_nikodym(num, den)
    except NotAbsolutelyContinuous as exc:
        # unreachable for finite spaces; a failure here is a bug, not bad input
        raise AssertionError(f"{name}: absolute continuity failed ({exc})") from exc


def rho_c(A1: Observable, A2: Observable, mu: ProbabilityMeasure) -> Density:
    """Classical-correlation density ``d((A1xA2)mu) / d(A1mu x A2mu)``."""
    return _density(product_outcome(A1, A2, mu), independent_pairing(A1, A2, mu), "rho_c")


def rho_e(J: JointObservable, mu: ProbabilityMeasure) -> Density:
    """Entanglement density ``d(J mu) / d((A1xA2)mu)``."""
    _check_state(J, mu)
    return _density(apply(J, mu), product_outcome(J.left, J.right, mu), "rho_e")


def rho_t(J: JointObservable, mu: ProbabilityMeasure) -> Density:
    """Total-correlation density ``d(J mu) / d(A1mu x A2mu)``."""
    _check_state(J, mu)
    return _density(apply(J, mu), independent_pairing(J.left, J.right, mu), "rho_t")


@dataclass(frozen=True)
class CorrelationReport:
    state: ProbabilityMeasure
    joint: JointObservable
    independent_pairing: ProbabilityMeasure
    product_outcome: ProbabilityMeasure
    joint_outcome: ProbabilityMeasure
    rho_c: Density
    rho_e: Density
    rho_t: Density
    classical: bool
    entangled: bool

    @property
    def classification(self) -> Classification:
        return Classification.from_flags(self.classical, self.entangled)

    @property
    def correlated(self) -> bool:
        """Total correlation: ``J mu != A1mu x A2mu``."""
        return self.joint_outcome != self.independent_pairing


def classify(J: JointObservable, mu: ProbabilityMeasure) -> CorrelationReport:
    _check_state(J, mu)
    pairing = independent_pairing(J.left, J.right, mu)
    prod = product_outcome(J.left, J.right, mu)
    joint = apply(J, mu)
    return CorrelationReport(
        state=mu,
        joint=J,
        independent_pairing=pairing,
        product_outcome=prod,
        joint_outcome=joint,
        rho_c=_density(prod, pairing, "rho_c"),
        rho_e=_density(joint, prod, "rho_e"),
        rho_t=_density(joint, pairing, "rho_t"),
        classical=prod != pairing,
        entangled=joint != prod,
    )


def product_rule_witness(c: Density, e: Density, t: Density) -> Point | None:
    """First point violating ``rho_t = rho_c * rho_e``, or None.

    Where ``rho_e`` is defined the identity must hold exactly.  Where it is
    not, ``rho_c`` and ``rho_t`` must both be 0 or both be undefined.
    """
    for p in c.space.points:
        if e.defined_at(p):
            if not (c.defined_at(p) and t.defined_at(p)) or t[p] != c[p] * e[p]:
                return p
        else:
            cv, tv = c.get(p), t.get(p)
            if not ((cv == 0 and tv == 0) or (cv is None and tv is None)):
                return p
    return None


class CorrelationCoefficient(NamedTuple):
    """Pearson coefficient kept rational as ``cov`` and ``var1 * var2``.

    The coefficient itself is ``cov / sqrt(variance_product)``; its square
    ``cov**2 / variance_product`` is exact.
    """

    cov: Fraction
    variance_product: Fraction

    @property
    def squared(self) -> Fraction:
        return self.cov**2 / self.variance_product

    def __float__(self) -> float:
        return float(self.cov) / math.sqrt(self.variance_product)


def _values(
    vals: Mapping[Point, object] | Callable[[Point], object], points
) -> dict[Point, Fraction]:
    if callable(vals) and not isinstance(vals, Mapping):
        return {p: as_fraction(vals(p)) for p in points}
    out = {}
    for p in points:
        if p not in vals:
            raise UnknownPoint(p, "value map")
        out[p] = as_fraction(vals[p])
    return out


def _moments(nu: Measure, val1, val2) -> tuple[Fraction, Fraction, Fraction]:
    s = nu.space
    v1 = _values(val1, s.factor(1).points)
    v2 = _values(val2, s.factor(2).points)
    e1 = sum((w * v1[x] for (x, _), w in nu.items()), Fraction(0))
    e2 = sum((w * v2[y] for (_, y), w in nu.items()), Fraction(0))
    cov = sum((w * (v1[x] - e1) * (v2[y] - e2) for (x, y), w in nu.items()), Fraction(0))
    var1 = sum((w * (v1[x] - e1) ** 2 for (x, _), w in nu.items()), Fraction(0))
    var2 = sum((w * (v2[y] - e2) ** 2 for (_, y), w in nu.items()), Fraction(0))
    return cov, var1, var2


def covariance(nu: Measure, val1, val2) -> Fraction:
    """Exact covariance of two real-valued labellings of the factor spaces under ``nu``."""
    return _moments(nu, val1, val2)[0]


def correlation_coefficient(nu: Measure, val1, val2) -> CorrelationCoefficient:
    """Exact Pearson correlation of ``val1(xi1)`` and ``val2(xi2)`` under ``nu``.

    ``val1``/``val2`` map the points of each factor to rationals (mapping or
    callable).  Raises :class:`UndefinedCoefficient` if a variance vanishes.
    """
    cov, var1, var2 = _moments(nu, val1, val2)
    if var1 == 0:
        raise UndefinedCoefficient(1)
    if var2 == 0:
        raise UndefinedCoefficient(2)
    return CorrelationCoefficient(cov, var1 * var2)
