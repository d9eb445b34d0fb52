"""Couplings of two finite distributions.

A coupling of ``nu1`` and ``nu2`` is one admissible row of a joint
observable at a pure state.  The set of all couplings is the transportation
polytope; its vertices are the couplings whose support graph (rows and
columns as nodes, charged cells as edges) is a forest.

Vertices are enumerated as basic feasible solutions: every spanning tree of
the complete bipartite graph on the charged rows and columns is a basis, its
solution is unique, and the vertices are exactly the distinct nonnegative
basis solutions.  Masses are scaled to integers over a common denominator so
the per-tree solve is one exact integer matrix product.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import EnumerationBoundExceeded, MarginalMismatch, SpaceMismatch, ValidationError
from .measures import Point, ProbabilityMeasure, as_fraction, marginal, mix, product, product_space

__all__ = [
    "DEFAULT_ENUM_BOUND",
    "Coupling",
    "comonotone_coupling",
    "enum_bound",
    "mix_couplings",
    "most_entangling_row",
    "product_coupling",
    "total_variation",
    "vertex_couplings",
]

DEFAULT_ENUM_BOUND = 16


def enum_bound() -> int:
    """Cell bound for vertex enumeration (``OPCORR_ENUM_BOUND``, default 16)."""
    raw = os.environ.get("OPCORR_ENUM_BOUND")
    if raw is None or not raw.strip():
        return DEFAULT_ENUM_BOUND
    try:
        bound = int(raw)
    except ValueError:
        raise ValueError(f"OPCORR_ENUM_BOUND must be an integer, got {raw!r}") from None
    if bound < 1:
        raise ValueError(f"OPCORR_ENUM_BOUND must be positive, got {bound}")
    return bound


@dataclass(frozen=True)
class Coupling:
    """A probability measure on ``left.space x right.space`` with marginals ``left``, ``right``."""

    measure: ProbabilityMeasure
    left: ProbabilityMeasure
    right: ProbabilityMeasure

    def __post_init__(self) -> None:
        expected = product_space(self.left.space, self.right.space)
        if self.measure.space != expected:
            raise SpaceMismatch(expected.id, self.measure.space.id, "coupling")
        for index, target in ((1, self.left), (2, self.right)):
            got = marginal(self.measure, index)
            if got != target:
                raise MarginalMismatch(None, index, target, got)

    @classmethod
    def _unchecked(cls, measure, left, right) -> Coupling:
        # basis solutions satisfy the marginal equations by construction
        obj = object.__new__(cls)
        object.__setattr__(obj, "measure", measure)
        object.__setattr__(obj, "left", left)
        object.__setattr__(obj, "right", right)
        return obj

    @property
    def support(self) -> tuple:
        return self.measure.support

    def support_key(self) -> tuple[int, ...]:
        """Cell indices of the support in declared order; used for tie-breaking."""
        index = self.measure.space.index
        return tuple(index(p) for p in self.measure.support)


def total_variation(a: ProbabilityMeasure, b: ProbabilityMeasure) -> Fraction:
    if a.space != b.space:
        raise SpaceMismatch(a.space.id, b.space.id, "total variation")
    pts = set(a.weights) | set(b.weights)
    return sum((abs(a[p] - b[p]) for p in pts), Fraction(0)) / 2


def product_coupling(nu1: ProbabilityMeasure, nu2: ProbabilityMeasure) -> Coupling:
    return Coupling(product(nu1, nu2), nu1, nu2)


def _check_order(order: Sequence[Point] | None, nu: ProbabilityMeasure) -> tuple:
    if order is None:
        return nu.space.points
    order = tuple(order)
    if sorted(map(nu.space.index, order)) != list(range(len(nu.space))):
        raise ValidationError(f"order {order!r} is not a permutation of space {nu.space.id!r}")
    return order


def comonotone_coupling(
    nu1: ProbabilityMeasure,
    nu2: ProbabilityMeasure,
    order1: Sequence[Point] | None = None,
    order2: Sequence[Point] | None = None,
) -> Coupling:
    """Northwest-corner coupling: mass matched greedily along the two orders.

    Orders default to the declared point order of each space.
    """
    xs = [x for x in _check_order(order1, nu1) if nu1[x]]
    ys = [y for y in _check_order(order2, nu2) if nu2[y]]
    r = [nu1[x] for x in xs]
    c = [nu2[y] for y in ys]
    cells: dict[Point, Fraction] = {}
    i = j = 0
    while i < len(xs) and j < len(ys):
        m = min(r[i], c[j])
        cells[(xs[i], ys[j])] = m
        r[i] -= m
        c[j] -= m
        if not r[i]:
            i += 1
        if not c[j]:
            j += 1
    space = product_space(nu1.space, nu2.space)
    return Coupling(ProbabilityMeasure._trusted(space, cells), nu1, nu2)


@lru_cache(maxsize=None)
def _basis_trees(m: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Spanning trees of K_{m,n} and their flow operators.

    Returns ``cells`` of shape (T, m+n-1) holding row-major cell indices and
    ``flow`` of shape (T, m+n-1, m+n): for a tree, cutting edge ``(i, j)``
    leaves a component ``S`` around row ``i`` and the edge carries
    ``sum(rows in S) - sum(cols in S)``.
    """
    need = m + n - 1
    edges = [(i, j) for i in range(m) for j in range(n)]
    trees: list[tuple[int, ...]] = []

    def grow(k: int, chosen: tuple[int, ...], comp: tuple[int, ...]) -> None:
        if len(chosen) == need:
            trees.append(chosen)
            return
        if len(edges) - k < need - len(chosen):
            return
        i, j = edges[k]
        a, b = comp[i], comp[m + j]
        if a != b:
            grow(k + 1, chosen + (k,), tuple(a if c == b else c for c in comp))
        grow(k + 1, chosen, comp)

    grow(0, (), tuple(range(m + n)))

    flow = np.zeros((len(trees), need, m + n), dtype=np.int64)
    for t, tree in enumerate(trees):
        adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(m + n)}
        for e, k in enumerate(tree):
            i, j = edges[k]
            adj[i].append((m + j, e))
            adj[m + j].append((i, e))
        for e, k in enumerate(tree):
            i, _ = edges[k]
            seen, stack = {i}, [i]
            while stack:
                v = stack.pop()
                for w, f in adj[v]:
                    if f != e and w not in seen:
                        seen.add(w)
                        stack.append(w)
            for v in seen:
                flow[t, e, v] = 1 if v < m else -1
    return np.array(trees, dtype=np.int64).reshape(len(trees), need), flow


def _vertex_cells(rows: tuple[Fraction, ...], cols: tuple[Fraction, ...]) -> list[dict]:
    """Distinct nonnegative basic solutions as ``{(i, j): mass}`` over positive lines."""
    ri = [i for i, r in enumerate(rows) if r]
    ci = [j for j, c in enumerate(cols) if c]
    masses = [rows[i] for i in ri] + [cols[j] for j in ci]
    # exact: scale to integers over a common denominator
    denom = math.lcm(*(q.denominator for q in masses))
    ints = [int(q * denom) for q in masses]
    m, n = len(ri), len(ci)
    cells, flow = _basis_trees(m, n)
    if denom * (m + n) < 2**62:
        x = flow @ np.array(ints, dtype=np.int64)
    else:
        x = flow.astype(object) @ np.array(ints, dtype=object)
    feasible = np.flatnonzero((x >= 0).all(axis=1))
    found: dict[tuple, dict] = {}
    for t in feasible:
        support = {}
        for k, v in zip(cells[t].tolist(), x[t].tolist()):
            if v:
                support[(ri[k // n], ci[k % n])] = Fraction(int(v), denom)
        found.setdefault(tuple(sorted(support)), support)
    return list(found.values())


def vertex_couplings(
    nu1: ProbabilityMeasure, nu2: ProbabilityMeasure, bound: int | None = None
) -> list[Coupling]:
    """Every extreme point of the coupling polytope of ``nu1`` and ``nu2``.

    Sorted by support (declared cell order), which makes the list
    deterministic and duplicate-free.  Raises :class:`EnumerationBoundExceeded`
    when ``|Xi1| * |Xi2|`` is above ``bound``.  Cost grows with the number of
    spanning trees, ``m**(n-1) * n**(m-1)`` over the charged lines.
    """
    bound = enum_bound() if bound is None else bound
    cells = len(nu1.space) * len(nu2.space)
    if cells > bound:
        raise EnumerationBoundExceeded(cells, bound)
    return list(_vertex_couplings(nu1, nu2))


@lru_cache(maxsize=4096)
def _vertex_couplings(nu1: ProbabilityMeasure, nu2: ProbabilityMeasure) -> tuple[Coupling, ...]:
    xs, ys = nu1.space.points, nu2.space.points
    rows = tuple(nu1[x] for x in xs)
    cols = tuple(nu2[y] for y in ys)
    space = product_space(nu1.space, nu2.space)
    result = []
    for support in _vertex_cells(rows, cols):
        weights = {(xs[i], ys[j]): m for (i, j), m in support.items()}
        result.append(Coupling._unchecked(ProbabilityMeasure._trusted(space, weights), nu1, nu2))
    result.sort(key=Coupling.support_key)
    return tuple(result)


def mix_couplings(components: Sequence[tuple[Fraction | int | str, Coupling]]) -> Coupling:
    """Convex combination of couplings sharing both marginals."""
    if not components:
        raise ValidationError("mix_couplings needs at least one component")
    first = components[0][1]
    measure = mix([(as_fraction(lam), c.measure) for lam, c in components])
    return Coupling(measure, first.left, first.right)


def most_entangling_row(
    nu1: ProbabilityMeasure,
    nu2: ProbabilityMeasure,
    reference: Coupling | None = None,
    bound: int | None = None,
) -> Coupling:
    """Vertex coupling farthest in total variation from ``reference`` (default: product).

    Total variation is convex, so its maximum over the polytope is attained
    at a vertex.  Ties go to the smallest support in declared cell order.
    """
    ref = product_coupling(nu1, nu2) if reference is None else reference
    if (ref.left, ref.right) != (nu1, nu2):
        raise ValidationError("reference coupling has different marginals")
    best, best_d = None, Fraction(-1)
    for c in vertex_couplings(nu1, nu2, bound):
        d = total_variation(c.measure, ref.measure)
        if d > best_d:
            best, best_d = c, d
    return best
