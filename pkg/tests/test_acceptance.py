"""Acceptance criteria, one test per criterion.

Each test records a label through the ``criterion`` fixture; the terminal
summary prints one PASS/FAIL line per criterion.
"""

import itertools
from collections import Counter
import random
import time
from fractions import Fraction as F

import pytest

from opcorr.correlation import Classification, classify, covariance, independent_at, rho_c, rho_e, rho_t
from opcorr.couplings import vertex_couplings
from opcorr.errors import NotAbsolutelyContinuous
from opcorr.measures import (
    FiniteSpace,
    dirac,
    is_absolutely_continuous,
    marginal,
    mix,
    product,
    product_space,
    radon_nikodym,
)
from opcorr.observables import apply, deterministic_observable, make_joint, product_joint
from opcorr.simulate import compare, measure_joint
from opcorr.systemfile import load

from gen import rand_measure, rand_observable, rand_space, rand_system

CORPUS_SIZE = 1000
CORPUS_SEED = 20240611


@pytest.fixture(scope="module")
def corpus():
    rng = random.Random(CORPUS_SEED)
    start = time.perf_counter()
    systems = [rand_system(rng, max_phase=4, max_outcome=4) for _ in range(CORPUS_SIZE)]
    return systems, time.perf_counter() - start


def test_c01_product_rule(criterion, corpus):
    criterion("1 product rule rho_t = rho_c * rho_e")
    systems, gen_time = corpus
    start = time.perf_counter()
    checked = 0
    for J, mu in systems:
        c, e, t = rho_c(J.left, J.right, mu), rho_e(J, mu), rho_t(J, mu)
        for p in J.outcome_space.points:
            if e.defined_at(p):
                assert t[p] == c[p] * e[p], (J, mu, p)
            else:
                # off the support of (A1xA2)mu; a density may be taken as 0 there
                assert c.get(p, 0) == 0 and t.get(p, 0) == 0, (J, mu, p)
            checked += 1
    elapsed = gen_time + time.perf_counter() - start
    kinds = Counter(classify(J, mu).classification.value for J, mu in systems)
    mix_note = ", ".join(f"{k} {kinds[k.value]}" for k in Classification)
    criterion(detail=f"{len(systems)} systems ({mix_note}), {checked} points, {elapsed:.1f}s")
    assert len(systems) >= 1000
    assert elapsed < 60


def test_c02_pure_state_collapse(criterion, corpus):
    criterion("2 pure-state collapse rho_c = 1, rho_t = rho_e")
    systems, _ = corpus
    n = 0
    for J, _ in systems:
        for w in J.phase_space.points:
            delta = dirac(J.phase_space, w)
            assert rho_c(J.left, J.right, delta).is_constant(1)
            assert rho_t(J, delta) == rho_e(J, delta)
            n += 1
    criterion(detail=f"{n} pure states")


def test_c03_support_inclusion(criterion):
    criterion("3 support inclusion nu << product of its marginals")
    rng = random.Random(3)
    n = 0
    for _ in range(1200):
        s1, s2 = rand_space(rng, "P", 5), rand_space(rng, "Q", 5)
        nu = rand_measure(rng, product_space(s1, s2), zero_prob=0.5)
        ref = product(marginal(nu, 1), marginal(nu, 2))
        assert set(nu.support) <= set(ref.support)
        assert is_absolutely_continuous(nu, ref)
        n += 1
    criterion(detail=f"{n} measures up to 5x5")


def test_c04_joint_absolute_continuity(criterion, corpus):
    criterion("4 absolute continuity J mu << (A1xA2)mu")
    systems, _ = corpus
    for J, mu in systems:
        joint, prod = apply(J, mu), apply(product_joint(J.left, J.right), mu)
        try:
            radon_nikodym(joint, prod)
        except NotAbsolutelyContinuous as exc:  # pragma: no cover - failure path
            pytest.fail(f"J mu not << (A1xA2)mu at {exc.witness!r}")
    criterion(detail=f"{len(systems)} systems")


def test_c05_deterministic_uniqueness(criterion):
    criterion("5 deterministic pairs admit only the product joint")
    omega = FiniteSpace("O", ("o0", "o1", "o2"))
    x1 = FiniteSpace("X", ("a", "b", "c"))
    x2 = FiniteSpace("Y", ("x", "y", "z"))
    rng = random.Random(5)
    pairs = 0
    for f in itertools.product(x1.points, repeat=3):
        for g in itertools.product(x2.points, repeat=3):
            A1 = deterministic_observable("A1", omega, x1, dict(zip(omega.points, f)))
            A2 = deterministic_observable("A2", omega, x2, dict(zip(omega.points, g)))
            prod_joint = product_joint(A1, A2)
            for w in omega.points:
                verts = vertex_couplings(A1.kernel[w], A2.kernel[w])
                assert [v.measure for v in verts] == [prod_joint.kernel[w]]
            rows = {w: vertex_couplings(A1.kernel[w], A2.kernel[w])[0].measure for w in omega.points}
            J = make_joint(A1, A2, rows)
            assert J == prod_joint
            for mu in (rand_measure(rng, omega), *(dirac(omega, w) for w in omega.points)):
                assert not classify(J, mu).entangled
            pairs += 1
    criterion(detail=f"{pairs} pairs on 3-point spaces")


def test_c06_deterministic_pair_example(criterion):
    criterion("6 deterministic_pair rho_c exact, classical_only")
    s = load("deterministic_pair")
    J, mu = s.joints["product"], s.states["mixed"]
    c = rho_c(J.left, J.right, mu)
    assert dict(c.items()) == {("a", "x"): 2, ("a", "y"): 0, ("b", "x"): 0, ("b", "y"): 2}
    assert classify(J, mu).classification is Classification.CLASSICAL_ONLY


def test_c07_pure_state_entanglement(criterion):
    criterion("7 bell_diagonal pure state entangled_only, rho_e diagonal 2")
    s = load("bell_diagonal")
    J, mu = s.joints["diagonal"], s.states["pure"]
    assert mu.is_dirac()
    r = classify(J, mu)
    assert r.classification is Classification.ENTANGLED_ONLY
    assert [r.rho_e[(x, x)] for x in ("0", "1")] == [2, 2]


def test_c08_symmetrized_mixture(criterion):
    criterion("8 quarter-uniform 2x2 measure is the product of its marginals")
    bit = FiniteSpace("bit", ("0", "1"))
    s = product_space(bit, bit)
    quarter = mix([(F(1, 4), dirac(s, p)) for p in s.points])
    assert quarter == product(marginal(quarter, 1), marginal(quarter, 2))


def test_c09_coefficient_coarseness(criterion):
    criterion("9 Y = X^2: covariance 0 yet not independent")
    s = load("square_coarse")
    J, mu = s.joints["XY"], s.states["uniform"]
    nu = apply(J, mu)
    cov = covariance(nu, s.values[J.left.outcome_space.id], s.values[J.right.outcome_space.id])
    assert cov == 0
    assert not independent_at(J, mu)


def test_c10_monte_carlo(criterion):
    criterion("10 Monte Carlo within 4 sigma + 1/n, off-diagonal 0")
    s = load("bell_diagonal")
    J = s.joints["diagonal"]
    n, seed = 100_000, 20240611
    worst, slowest = 0.0, 0.0
    for name in ("pure", "mixed"):
        mu = s.states[name]
        start = time.perf_counter()
        emp = measure_joint(J, mu, n, seed)
        slowest = max(slowest, time.perf_counter() - start)
        checks = compare(emp, apply(J, mu))
        assert all(c.ok for c in checks), [c for c in checks if not c.ok]
        worst = max(worst, max(c.deviation / c.tolerance for c in checks))
        if name == "pure":
            assert all(emp.count((x, y)) == 0 for x, y in J.outcome_space.points if x != y)
    criterion(detail=f"n={n}, worst deviation/tolerance {worst:.2f}, slowest run {slowest:.1f}s")
    assert slowest < 10


def test_c11_affinity(criterion):
    criterion("11 affinity of observables")
    rng = random.Random(11)
    for _ in range(500):
        omega, xi = rand_space(rng, "W", 4), rand_space(rng, "X", 4)
        A = rand_observable(rng, "A", omega, xi)
        mu1, mu2 = rand_measure(rng, omega), rand_measure(rng, omega)
        lam = F(rng.randint(0, 12), 12)
        assert apply(A, mix([(lam, mu1), (1 - lam, mu2)])) == mix([(lam, apply(A, mu1)), (1 - lam, apply(A, mu2))])
    criterion(detail="500 triples")
