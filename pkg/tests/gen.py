"""Random finite systems for property and acceptance tests.

Plain ``random.Random`` so corpora are reproducible from one integer seed.
"""

from __future__ import annotations

import random
from fractions import Fraction

from opcorr.couplings import mix_couplings, product_coupling, vertex_couplings
from opcorr.measures import FiniteSpace, ProbabilityMeasure
from opcorr.observables import Observable, make_joint


def rand_space(rng: random.Random, id: str, max_size: int, min_size: int = 1) -> FiniteSpace:
    n = rng.randint(min_size, max_size)
    return FiniteSpace(id, tuple(f"{id.lower()}{i}" for i in range(n)))


def rand_weights(rng: random.Random, n: int, zero_prob: float = 0.25, top: int = 6) -> list[Fraction]:
    raw = [0 if rng.random() < zero_prob else rng.randint(1, top) for _ in range(n)]
    if not any(raw):
        raw[rng.randrange(n)] = rng.randint(1, top)
    total = sum(raw)
    return [Fraction(k, total) for k in raw]


def rand_measure(rng: random.Random, space: FiniteSpace, **kw) -> ProbabilityMeasure:
    return ProbabilityMeasure(space, dict(zip(space.points, rand_weights(rng, len(space), **kw))))


def rand_observable(rng: random.Random, id: str, omega: FiniteSpace, xi: FiniteSpace) -> Observable:
    return Observable(id, omega, xi, {w: rand_measure(rng, xi) for w in omega.points})


def rand_coupling(rng: random.Random, nu1, nu2):
    """Product, a single vertex, or a random mixture of vertices."""
    roll = rng.random()
    if roll < 0.2:
        return product_coupling(nu1, nu2)
    verts = vertex_couplings(nu1, nu2)
    if roll < 0.55 or len(verts) == 1:
        return rng.choice(verts)
    chosen = rng.sample(verts, min(len(verts), rng.randint(2, 3)))
    lams = rand_weights(rng, len(chosen), zero_prob=0)
    return mix_couplings(list(zip(lams, chosen)))


def rand_system(rng: random.Random, max_phase: int = 4, max_outcome: int = 4):
    """A joint observable with random indeterministic marginals and a random state."""
    omega = rand_space(rng, "W", max_phase)
    xi1 = rand_space(rng, "X", max_outcome)
    xi2 = rand_space(rng, "Y", max_outcome)
    A1 = rand_observable(rng, "A1", omega, xi1)
    A2 = rand_observable(rng, "A2", omega, xi2)
    rows = {w: rand_coupling(rng, A1.kernel[w], A2.kernel[w]).measure for w in omega.points}
    J = make_joint(A1, A2, rows, "J")
    return J, rand_measure(rng, omega)
