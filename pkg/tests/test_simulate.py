from fractions import Fraction as F

import pytest

from opcorr.errors import OddEnsembleSize, SpaceMismatch
from opcorr.measures import FiniteSpace, dirac, make_probability_measure, marginal, uniform
from opcorr.observables import Observable, apply, deterministic_observable, product_joint
from opcorr.simulate import (
    EmpiricalMeasure,
    _below,
    cell_tolerance,
    compare,
    measure_alternating,
    measure_joint,
    measure_observable,
    sample_state,
    substream,
)
from opcorr.systemfile import load

W = FiniteSpace("W", ("w1", "w2"))
AB = FiniteSpace("AB", ("a", "b"))
T = FiniteSpace("T", ("p", "q", "r"))


class Words:
    """Stand-in bit generator replaying fixed raw words."""

    def __init__(self, words):
        self.words = list(words)

    def random_raw(self):
        return self.words.pop(0)


@pytest.fixture(scope="module")
def bell():
    return load("bell_diagonal")


# -- sampling primitives ---------------------------------------------------------


def test_below_masks_and_rejects():
    # bound 5 needs 3 bits: 7 and 5 are rejected, 2 is accepted
    assert _below(Words([0b111, 0xFFF5, 0b010]), 5) == 2
    assert _below(Words([]), 1) == 0


def test_below_multiword():
    bound = 2**70 + 3
    # bound - 1 has 71 bits: first word supplies the high 7, second the low 64
    assert _below(Words([0b000001, 5]), bound) == 2**64 + 5
    assert _below(Words([0b1000000, 7, 0, 2]), bound) == 2
    draws = [_below(substream(9, t), bound) for t in range(200)]
    assert all(0 <= d < bound for d in draws)
    assert any(d >= 2**69 for d in draws)


def test_substream_validation():
    with pytest.raises(ValueError):
        substream(-1, 0)
    with pytest.raises(ValueError):
        substream(2**64, 0)
    with pytest.raises(ValueError):
        substream(0, -1)


def test_substreams_differ_by_trial():
    assert substream(1, 0).random_raw() != substream(1, 1).random_raw()
    assert substream(1, 5).random_raw() == substream(1, 5).random_raw()


# -- sample_state ------------------------------------------------------------------


def test_sample_dirac():
    assert sample_state(dirac(W, "w2"), 5, seed=123) == ["w2"] * 5


def test_sample_uniform_frequencies():
    draws = sample_state(uniform(W), 100_000, seed=42)
    freq = draws.count("w1") / len(draws)
    assert abs(freq - 0.5) < 0.02
    assert abs(freq - 0.5) <= cell_tolerance(F(1, 2), 100_000)


def test_sample_empty():
    assert sample_state(uniform(W), 0, seed=1) == []
    with pytest.raises(ValueError):
        sample_state(uniform(W), -1, seed=1)


def test_sample_is_deterministic_and_splittable():
    mu = make_probability_measure(T, {"p": "1/7", "q": "2/7", "r": "4/7"})
    whole = sample_state(mu, 300, seed=5)
    assert whole == sample_state(mu, 300, seed=5)
    assert whole == sample_state(mu, 120, seed=5) + sample_state(mu, 180, seed=5, start=120)
    assert whole != sample_state(mu, 300, seed=6)


def test_exact_weights_sampled_without_float_rounding():
    # 1/3 has no exact binary float; counts must still straddle it
    mu = make_probability_measure(T, {"p": "1/3", "q": "1/3", "r": "1/3"})
    emp = EmpiricalMeasure.from_samples(T, sample_state(mu, 30_000, seed=11))
    assert all(c.ok for c in compare(emp, mu))


# -- empirical measures --------------------------------------------------------


def test_empirical_measure_invariants():
    emp = EmpiricalMeasure(AB, {"a": 3, "b": 1}, 4)
    assert emp.frequency("a") == F(3, 4)
    assert emp.frequencies() == {"a": F(3, 4), "b": F(1, 4)}
    with pytest.raises(ValueError):
        EmpiricalMeasure(AB, {"a": 3}, 4)
    assert EmpiricalMeasure(AB, {}, 0).frequency("a") == 0


def test_empirical_merge_is_associative_and_commutative():
    x = EmpiricalMeasure(AB, {"a": 1}, 1)
    y = EmpiricalMeasure(AB, {"b": 2}, 2)
    z = EmpiricalMeasure(AB, {"a": 4, "b": 1}, 5)
    assert (x + y) + z == x + (y + z)
    assert x + y == y + x
    with pytest.raises(SpaceMismatch):
        x + EmpiricalMeasure(W, {}, 0)


def test_chunked_joint_run_equals_whole(bell):
    J, mu = bell.joints["diagonal"], bell.states["mixed"]
    whole = measure_joint(J, mu, 2000, seed=3)
    parts = [measure_joint(J, mu, 500, seed=3, start=k) for k in range(0, 2000, 500)]
    assert sum(parts[1:], parts[0]) == whole


# -- joint measurement ---------------------------------------------------------


def test_diagonal_joint_at_pure_state_has_no_off_diagonal_counts(bell):
    J, mu = bell.joints["diagonal"], dirac(bell.phase_space, bell.phase_space.points[0])
    emp = measure_joint(J, mu, 20_000, seed=17)
    assert all(x == y for x, y in emp.counts)
    assert emp.total == 20_000


@pytest.mark.parametrize("n", [1_000, 10_000, 100_000])
def test_product_joint_within_tolerance(n):
    A1 = Observable("A1", W, AB, {"w1": uniform(AB), "w2": {"a": "1/5", "b": "4/5"}})
    A2 = Observable("A2", W, T, {"w1": {"p": "1/2", "r": "1/2"}, "w2": uniform(T)})
    J = product_joint(A1, A2)
    mu = make_probability_measure(W, {"w1": "1/3", "w2": "2/3"})
    checks = compare(measure_joint(J, mu, n, seed=2024), apply(J, mu))
    assert all(c.ok for c in checks), [c for c in checks if not c.ok]


def test_deviation_shrinks_with_n(bell):
    J, mu = bell.joints["diagonal"], bell.states["mixed"]
    exact = apply(J, mu)
    worst = [max(c.deviation for c in compare(measure_joint(J, mu, n, seed=8), exact)) for n in (1_000, 100_000)]
    assert worst[1] < worst[0]


def test_joint_marginal_agrees_with_single_measurement(bell):
    J, mu = bell.joints["diagonal"], bell.states["mixed"]
    n = 40_000
    joint = measure_joint(J, mu, n, seed=31)
    counts1 = {}
    for (x, _), k in joint.counts.items():
        counts1[x] = counts1.get(x, 0) + k
    from_joint = EmpiricalMeasure(J.left.outcome_space, counts1, n)
    alone = measure_observable(J.left, mu, n, seed=31)
    exact = apply(J.left, mu)
    for emp in (from_joint, alone):
        assert all(c.ok for c in compare(emp, exact))
    assert marginal(apply(J, mu), 1) == exact


def test_measure_observable_checks_state_space(bell):
    with pytest.raises(SpaceMismatch):
        measure_observable(bell.observables["A1"], uniform(AB), 10, seed=1)


def test_phase_draws_match_sample_state():
    A = deterministic_observable("id", W, AB, {"w1": "a", "w2": "b"})
    mu = make_probability_measure(W, {"w1": "1/3", "w2": "2/3"})
    emp = measure_observable(A, mu, 500, seed=4)
    phases = sample_state(mu, 500, seed=4)
    assert emp.count("a") == phases.count("w1")


# -- alternating measurement -------------------------------------------------------


def test_alternating_odd_size():
    A = deterministic_observable("A", W, AB, {"w1": "a", "w2": "b"})
    with pytest.raises(OddEnsembleSize):
        measure_alternating(A, A, uniform(W), 7, seed=1)


def test_alternating_deterministic_pure_state():
    A1 = deterministic_observable("A1", W, AB, {"w1": "a", "w2": "b"})
    A2 = Observable("A2", W, T, {w: uniform(T) for w in W.points})
    e1, e2 = measure_alternating(A1, A2, dirac(W, "w2"), 100, seed=1)
    assert dict(e1.counts) == {"b": 50}
    assert e2.total == 50


def test_alternating_returns_two_marginals_only(bell):
    J, mu = bell.joints["diagonal"], bell.states["mixed"]
    out = measure_alternating(J.left, J.right, mu, 40_000, seed=77)
    assert isinstance(out, tuple) and len(out) == 2
    assert all(e.space is not J.outcome_space and not e.space.is_product for e in out)
    for emp, A in zip(out, (J.left, J.right)):
        assert all(c.ok for c in compare(emp, apply(A, mu)))


def test_cell_tolerance_formula():
    assert cell_tolerance(F(1, 2), 100) == pytest.approx(4 * 0.05 + 0.01)
    assert cell_tolerance(0, 1000) == pytest.approx(0.001)
