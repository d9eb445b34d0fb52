"""Command-line front end.

    opcorr densities --system bell_diagonal --joint diagonal --state pure
    opcorr verify --system path/to/system.json --json

Exit codes: 0 success, 1 usage error, 2 invalid input or failed verification.
"""

from __future__ import annotations

import argparse
import json
import sys
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Any, Sequence

from . import correlation, couplings, simulate
from .errors import OpcorrError, UndefinedCoefficient
from .measures import Density, Measure, dirac
from .observables import apply
from .systemfile import SystemFile, bundled_systems, load
from .verify import verify_system

EXIT_OK, EXIT_USAGE, EXIT_INVALID = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- rendering ---------------------------------------------------------------


def decimal6(q: Fraction) -> str:
    """Six significant digits."""
    with localcontext() as ctx:
        ctx.prec = 40
        d = Decimal(q.numerator) / Decimal(q.denominator)
    return format(d, ".6g")


def _pt(p) -> str:
    return f"({', '.join(map(str, p))})" if isinstance(p, tuple) else str(p)


def _json_pt(p):
    return list(p) if isinstance(p, tuple) else p


def _measure_json(mu: Measure) -> list[dict]:
    return [
        {"point": _json_pt(p), "value": str(mu[p]), "decimal": decimal6(mu[p])}
        for p in mu.space.points
    ]


def _density_json(d: Density) -> list[dict]:
    out = []
    for p in d.space.points:
        v = d.get(p)
        out.append(
            {
                "point": _json_pt(p),
                "value": None if v is None else str(v),
                "decimal": None if v is None else decimal6(v),
            }
        )
    return out


def _table(rows: list[tuple[str, ...]], indent: str = "  ") -> str:
    if not rows:
        return ""
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join(
        indent + "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows
    )


def _measure_text(title: str, mu: Measure) -> str:
    rows = [(_pt(p), str(mu[p]), decimal6(mu[p])) for p in mu.space.points]
    return f"{title}\n{_table(rows)}"


def _density_text(title: str, d: Density) -> str:
    rows = []
    for p in d.space.points:
        v = d.get(p)
        rows.append((_pt(p), "undefined", "") if v is None else (_pt(p), str(v), decimal6(v)))
    return f"{title}\n{_table(rows)}"


# -- lookups -------------------------------------------------------------------


def _lookup(table, name: str, kind: str):
    try:
        return table[name]
    except KeyError:
        known = ", ".join(table) or "none"
        raise UsageError(f"unknown {kind} {name!r} (known: {known})") from None


def _state(system: SystemFile, name: str):
    """A named state, or ``delta:<point>`` for a pure state."""
    if name.startswith("delta:"):
        point = name[len("delta:") :]
        if point not in system.phase_space:
            raise UsageError(f"unknown phase point {point!r}")
        return dirac(system.phase_space, point)
    return _lookup(system.states, name, "state")


def _observable(system: SystemFile, name: str):
    if name in system.observables:
        return system.observables[name]
    return _lookup(system.joints, name, "observable or joint")


# -- subcommands -------------------------------------------------------------


def cmd_apply(system: SystemFile, args) -> tuple[int, Any, str]:
    A = _observable(system, args.observable)
    mu = _state(system, args.state)
    out = apply(A, mu)
    data = {"observable": args.observable, "state": args.state, "outcome": _measure_json(out)}
    return EXIT_OK, data, _measure_text(f"{args.observable} at {args.state}", out)


def cmd_densities(system: SystemFile, args) -> tuple[int, Any, str]:
    J = _lookup(system.joints, args.joint, "joint")
    mu = _state(system, args.state)
    r = correlation.classify(J, mu)
    data = {
        "joint": args.joint,
        "state": args.state,
        "rho_c": _density_json(r.rho_c),
        "rho_e": _density_json(r.rho_e),
        "rho_t": _density_json(r.rho_t),
    }
    text = "\n\n".join(
        [
            _density_text("rho_c  classical correlation  d((A1xA2)mu) / d(A1mu x A2mu)", r.rho_c),
            _density_text("rho_e  entanglement           d(J mu) / d((A1xA2)mu)", r.rho_e),
            _density_text("rho_t  total correlation      d(J mu) / d(A1mu x A2mu)", r.rho_t),
        ]
    )
    return EXIT_OK, data, text


def cmd_classify(system: SystemFile, args) -> tuple[int, Any, str]:
    J = _lookup(system.joints, args.joint, "joint")
    mu = _state(system, args.state)
    r = correlation.classify(J, mu)
    data = {
        "joint": args.joint,
        "state": args.state,
        "classification": r.classification.value,
        "classical": r.classical,
        "entangled": r.entangled,
        "correlated": r.correlated,
        "independent_pairing": _measure_json(r.independent_pairing),
        "product_outcome": _measure_json(r.product_outcome),
        "joint_outcome": _measure_json(r.joint_outcome),
    }
    text = "\n\n".join(
        [
            f"classification: {r.classification.value}\n"
            f"  classical correlation: {'yes' if r.classical else 'no'}\n"
            f"  entanglement:          {'yes' if r.entangled else 'no'}\n"
            f"  total correlation:     {'yes' if r.correlated else 'no'}",
            _measure_text("A1mu x A2mu", r.independent_pairing),
            _measure_text("(A1xA2)mu", r.product_outcome),
            _measure_text("J mu", r.joint_outcome),
        ]
    )
    return EXIT_OK, data, text


def cmd_verify(system: SystemFile, args) -> tuple[int, Any, str]:
    results = verify_system(system)
    failed = [r for r in results if not r.ok]
    data = {
        "passed": len(results) - len(failed),
        "failed": len(failed),
        "checks": [
            {"check": r.check, "subject": r.subject, "ok": r.ok, "detail": r.detail}
            for r in results
        ],
    }
    lines = [
        f"{'PASS' if r.ok else 'FAIL'}  {r.check}  [{r.subject}]" + (f"  {r.detail}" if r.detail else "")
        for r in results
    ]
    lines.append(f"\n{len(results) - len(failed)} passed, {len(failed)} failed")
    return (EXIT_INVALID if failed else EXIT_OK), data, "\n".join(lines)


def cmd_couplings(system: SystemFile, args) -> tuple[int, Any, str]:
    A1 = _lookup(system.observables, args.left, "observable")
    A2 = _lookup(system.observables, args.right, "observable")
    if args.at not in system.phase_space:
        raise UsageError(f"unknown phase point {args.at!r}")
    nu1, nu2 = A1.row(args.at), A2.row(args.at)
    ref = couplings.product_coupling(nu1, nu2)
    if args.vertices:
        mode, found = "vertices", couplings.vertex_couplings(nu1, nu2)
    elif args.comonotone:
        mode, found = "comonotone", [couplings.comonotone_coupling(nu1, nu2)]
    elif args.extremal:
        mode, found = "extremal", [couplings.most_entangling_row(nu1, nu2, ref)]
    else:
        mode, found = "product", [ref]
    data = {
        "mode": mode,
        "at": args.at,
        "couplings": [
            {
                "cells": _measure_json(c.measure),
                "tv_from_product": str(couplings.total_variation(c.measure, ref.measure)),
            }
            for c in found
        ],
    }
    blocks = [
        _measure_text(
            f"[{i}] tv from product = {couplings.total_variation(c.measure, ref.measure)}",
            c.measure,
        )
        for i, c in enumerate(found)
    ]
    head = f"{mode} couplings of {args.left}, {args.right} at {args.at}: {len(found)}"
    return EXIT_OK, data, "\n\n".join([head, *blocks])


def _checks_json(checks) -> list[dict]:
    return [
        {
            "point": _json_pt(c.point),
            "exact": str(c.exact),
            "observed": str(c.observed),
            "deviation": c.deviation,
            "tolerance": c.tolerance,
            "ok": c.ok,
        }
        for c in checks
    ]


def _checks_text(title: str, checks) -> str:
    rows = [("point", "exact", "observed", "tolerance", "ok")]
    rows += [
        (_pt(c.point), decimal6(c.exact), decimal6(c.observed), f"{c.tolerance:.6g}",
         "yes" if c.ok else "NO")
        for c in checks
    ]
    return f"{title}\n{_table(rows)}"


def cmd_simulate(system: SystemFile, args) -> tuple[int, Any, str]:
    J = _lookup(system.joints, args.joint, "joint")
    mu = _state(system, args.state)
    if args.n <= 0:
        raise UsageError("--n must be positive")
    if args.alternating:
        e1, e2 = simulate.measure_alternating(J.left, J.right, mu, args.n, args.seed)
        c1 = simulate.compare(e1, apply(J.left, mu))
        c2 = simulate.compare(e2, apply(J.right, mu))
        data = {"mode": "alternating", "n": args.n, "seed": args.seed,
                "left": _checks_json(c1), "right": _checks_json(c2)}
        text = "\n\n".join(
            [
                _checks_text(f"{J.left.id} on even trials ({e1.total} samples)", c1),
                _checks_text(f"{J.right.id} on odd trials ({e2.total} samples)", c2),
                "no joint counts: alternating measurement does not sample pairs",
            ]
        )
        return EXIT_OK, data, text
    emp = simulate.measure_joint(J, mu, args.n, args.seed)
    checks = simulate.compare(emp, apply(J, mu))
    data = {"mode": "joint", "n": args.n, "seed": args.seed, "cells": _checks_json(checks),
            "all_within_tolerance": all(c.ok for c in checks)}
    return EXIT_OK, data, _checks_text(f"{args.joint} at {args.state}, n={args.n}", checks)


def cmd_coefficient(system: SystemFile, args) -> tuple[int, Any, str]:
    J = _lookup(system.joints, args.joint, "joint")
    mu = _state(system, args.state)
    ids = (J.left.outcome_space.id, J.right.outcome_space.id)
    for sid in ids:
        if sid not in system.values:
            raise UsageError(f"outcome space {sid!r} declares no numeric values")
    nu = apply(J, mu)
    v1, v2 = system.values[ids[0]], system.values[ids[1]]
    cov = correlation.covariance(nu, v1, v2)
    data: dict[str, Any] = {
        "joint": args.joint,
        "state": args.state,
        "covariance": str(cov),
        "independent": correlation.is_independent(nu),
    }
    lines = [f"covariance: {cov}", f"independent: {'yes' if data['independent'] else 'no'}"]
    try:
        cc = correlation.correlation_coefficient(nu, v1, v2)
        data["coefficient_squared"] = str(cc.squared)
        data["coefficient"] = decimal6(Fraction(float(cc)))
        lines.append(f"coefficient: {data['coefficient']}  (squared {cc.squared})")
    except UndefinedCoefficient as exc:
        data["coefficient"] = None
        lines.append(f"coefficient: undefined ({exc})")
    return EXIT_OK, data, "\n".join(lines)


def cmd_examples(args) -> tuple[int, Any, str]:
    names = bundled_systems()
    return EXIT_OK, {"examples": names}, "\n".join(names)


_COMMANDS = {
    "apply": cmd_apply,
    "densities": cmd_densities,
    "classify": cmd_classify,
    "verify": cmd_verify,
    "couplings": cmd_couplings,
    "simulate": cmd_simulate,
    "coefficient": cmd_coefficient,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="opcorr", description="Exact correlation calculus on finite systems.")
    common = _Parser(add_help=False)
    common.add_argument("--system", required=True,
                        help="system JSON file, or the name of a bundled example")
    common.add_argument("--json", action="store_true", help="emit JSON")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("apply", parents=[common], help="outcome measure A mu")
    p.add_argument("--observable", required=True)
    p.add_argument("--state", required=True, help="state name, or delta:<point>")

    for name, hlp in (("densities", "rho_c, rho_e, rho_t"), ("classify", "correlation class"),
                      ("coefficient", "covariance and correlation coefficient")):
        p = sub.add_parser(name, parents=[common], help=hlp)
        p.add_argument("--joint", required=True)
        p.add_argument("--state", required=True, help="state name, or delta:<point>")

    sub.add_parser("verify", parents=[common], help="check every invariant on the file")

    p = sub.add_parser("couplings", parents=[common], help="couplings of two rows")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--at", required=True, help="phase point")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--vertices", action="store_true")
    mode.add_argument("--comonotone", action="store_true")
    mode.add_argument("--extremal", action="store_true")

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo measurement")
    p.add_argument("--joint", required=True)
    p.add_argument("--state", required=True, help="state name, or delta:<point>")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--alternating", action="store_true")

    p = sub.add_parser("examples", help="list bundled example systems")
    p.add_argument("--json", action="store_true")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "examples":
            code, data, text = cmd_examples(args)
        else:
            system = load(args.system)
            code, data, text = _COMMANDS[args.command](system, args)
    except UsageError as exc:
        print(f"opcorr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"opcorr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OpcorrError as exc:
        print(f"opcorr: invalid: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"opcorr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(json.dumps(data, indent=2) if args.json else text)
    return code


if __name__ == "__main__":
    sys.exit(main())
