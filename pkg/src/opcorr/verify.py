"""Invariant checks over a loaded system, as run by ``opcorr verify``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as pairs

from .correlation import classify, product_rule_witness
from .measures import _null_witness, dirac, marginal, mix, product
from .observables import apply, is_deterministic, marginal_observable, product_joint
from .systemfile import SystemFile

__all__ = ["CheckResult", "verify_system"]

_AFFINE_WEIGHT = Fraction(1, 3)


@dataclass(frozen=True)
class CheckResult:
    check: str
    subject: str
    ok: bool
    detail: str = ""


def _ac(check: str, subject: str, num, den) -> CheckResult:
    witness = _null_witness(num, den)
    if witness is None:
        return CheckResult(check, subject, True)
    return CheckResult(check, subject, False, f"charged at {witness!r} where reference vanishes")


def _state_checks(jname: str, J, sname: str, mu, pure: bool) -> list[CheckResult]:
    subject = f"{jname} @ {sname}"
    out = []
    report = classify(J, mu)
    m1, m2 = apply(J.left, mu), apply(J.right, mu)
    bad = [
        (label, i)
        for label, nu in (
            ("A1mu x A2mu", report.independent_pairing),
            ("(A1xA2)mu", report.product_outcome),
            ("J mu", report.joint_outcome),
        )
        for i, target in ((1, m1), (2, m2))
        if marginal(nu, i) != target
    ]
    out.append(
        CheckResult(
            "marginal consistency",
            subject,
            not bad,
            f"{bad[0][0]} marginal {bad[0][1]} differs" if bad else "",
        )
    )
    jmu = report.joint_outcome
    out.append(
        _ac("absolute continuity: J mu << product of its marginals", subject, jmu,
            product(marginal(jmu, 1), marginal(jmu, 2)))
    )
    out.append(
        _ac("absolute continuity: (A1xA2)mu << A1mu x A2mu", subject, report.product_outcome,
            report.independent_pairing)
    )
    out.append(_ac("absolute continuity: J mu << (A1xA2)mu", subject, jmu, report.product_outcome))
    witness = product_rule_witness(report.rho_c, report.rho_e, report.rho_t)
    out.append(
        CheckResult(
            "product rule rho_t = rho_c * rho_e",
            subject,
            witness is None,
            "" if witness is None else f"fails at {witness!r}",
        )
    )
    if pure:
        ok = report.rho_c.is_constant(1) and report.rho_t == report.rho_e and not report.classical
        out.append(
            CheckResult(
                "pure state: rho_c == 1 and rho_t == rho_e",
                subject,
                ok,
                "" if ok else f"rho_c={report.rho_c!r}",
            )
        )
    return out


def verify_system(system: SystemFile) -> list[CheckResult]:
    """Run every structural and correlation invariant on the system's objects."""
    results: list[CheckResult] = []
    omega = system.phase_space
    states = dict(system.states)
    pure = {f"delta:{w}": dirac(omega, w) for w in omega.points}

    for name, A in system.observables.items():
        for (n1, mu1), (n2, mu2) in pairs(states.items(), repeat=2):
            lam = _AFFINE_WEIGHT
            lhs = apply(A, mix([(lam, mu1), (1 - lam, mu2)]))
            rhs = mix([(lam, apply(A, mu1)), (1 - lam, apply(A, mu2))])
            results.append(
                CheckResult(
                    "affinity", f"{name} on {n1}/{n2}", lhs == rhs,
                    "" if lhs == rhs else f"{lhs!r} != {rhs!r}",
                )
            )

    for jname, J in system.joints.items():
        for i, stored in ((1, J.left), (2, J.right)):
            ok = marginal_observable(J, i) == stored
            results.append(
                CheckResult(f"marginal observable {i}", jname, ok, "" if ok else "rows differ")
            )
        if is_deterministic(J.left) and is_deterministic(J.right):
            ok = J == product_joint(J.left, J.right, J.id)
            results.append(
                CheckResult(
                    "deterministic pair has only the product joint", jname, ok,
                    "" if ok else "joint differs from product",
                )
            )
        for sname, mu in states.items():
            results.extend(_state_checks(jname, J, sname, mu, mu.is_dirac()))
        for sname, mu in pure.items():
            results.extend(_state_checks(jname, J, sname, mu, True))
    return results
