"""JSON system files: spaces, states, observables and joints in one document.

Rationals are written as ``"p/q"`` strings or bare integers, never floats.
Points of a product space are two-element arrays, so joint rows are lists of
``[[x1, x2], weight]`` pairs.  ``"rows": "product"`` declares the product
joint.  Example::

    {
      "phase_space": {"id": "Omega", "points": ["w1", "w2"]},
      "outcome_spaces": [{"id": "Xi", "points": ["0", "1"],
                          "values": {"0": 0, "1": 1}}],
      "states": {"pure": {"w1": 1}},
      "observables": {"A": {"outcome_space": "Xi",
                            "kernel": {"w1": {"0": "1/2", "1": "1/2"},
                                       "w2": {"1": 1}}}},
      "joints": {"J": {"left": "A", "right": "A", "rows": "product"}}
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import jsonschema

from .errors import OpcorrError, ParseError, SystemValidationError, UnknownPoint
from .measures import FiniteSpace, ProbabilityMeasure, as_fraction, product_space
from .observables import JointObservable, Observable, make_joint, product_joint

__all__ = ["SCHEMA", "SystemFile", "bundled_path", "bundled_systems", "load", "loads"]

_RATIONAL = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^\s*[+-]?\d+(\s*/\s*[+-]?\d+)?\s*$"},
    ]
}
_POINTS = {"type": "array", "items": {"type": "string"}, "minItems": 1}
_WEIGHTS = {"type": "object", "additionalProperties": _RATIONAL}
_SPACE = {
    "type": "object",
    "required": ["id", "points"],
    "properties": {"id": {"type": "string"}, "points": _POINTS, "values": _WEIGHTS},
    "additionalProperties": False,
}
_PAIR_ROW = {
    "type": "array",
    "items": {
        "type": "array",
        "prefixItems": [
            {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
            _RATIONAL,
        ],
        "minItems": 2,
        "maxItems": 2,
    },
}

SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["phase_space", "outcome_spaces", "observables"],
    "properties": {
        "description": {"type": "string"},
        "phase_space": _SPACE,
        "outcome_spaces": {"type": "array", "items": _SPACE},
        "states": {"type": "object", "additionalProperties": _WEIGHTS},
        "observables": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["outcome_space", "kernel"],
                "properties": {
                    "outcome_space": {"type": "string"},
                    "kernel": {"type": "object", "additionalProperties": _WEIGHTS},
                },
                "additionalProperties": False,
            },
        },
        "joints": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["left", "right", "rows"],
                "properties": {
                    "left": {"type": "string"},
                    "right": {"type": "string"},
                    "rows": {
                        "oneOf": [
                            {"const": "product"},
                            {"type": "object", "additionalProperties": _PAIR_ROW},
                        ]
                    },
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

_validator = jsonschema.Draft202012Validator(SCHEMA)


@dataclass(frozen=True)
class SystemFile:
    phase_space: FiniteSpace
    outcome_spaces: Mapping[str, FiniteSpace]
    states: Mapping[str, ProbabilityMeasure]
    observables: Mapping[str, Observable]
    joints: Mapping[str, JointObservable]
    values: Mapping[str, Mapping[str, Fraction]] = field(default_factory=dict)
    description: str = ""
    source: str = ""

    def to_dict(self) -> dict:
        """Inverse of :func:`loads` (up to formatting); joints are written row by row."""

        def weights(mu) -> dict:
            return {str(p): str(w) for p, w in mu.items()}

        spaces = []
        for sid, space in self.outcome_spaces.items():
            entry: dict[str, Any] = {"id": sid, "points": list(space.points)}
            if sid in self.values:
                entry["values"] = {p: str(v) for p, v in self.values[sid].items()}
            spaces.append(entry)
        doc: dict[str, Any] = {}
        if self.description:
            doc["description"] = self.description
        doc["phase_space"] = {"id": self.phase_space.id, "points": list(self.phase_space.points)}
        doc["outcome_spaces"] = spaces
        doc["states"] = {name: weights(mu) for name, mu in self.states.items()}
        doc["observables"] = {
            name: {
                "outcome_space": A.outcome_space.id,
                "kernel": {w: weights(row) for w, row in A.kernel.items()},
            }
            for name, A in self.observables.items()
        }
        doc["joints"] = {
            name: {
                "left": J.left.id,
                "right": J.right.id,
                "rows": {
                    w: [[list(p), str(v)] for p, v in row.items()] for w, row in J.kernel.items()
                },
            }
            for name, J in self.joints.items()
        }
        return doc


def _space(doc: Mapping, label: str) -> FiniteSpace:
    try:
        return FiniteSpace(doc["id"], tuple(doc["points"]))
    except OpcorrError as exc:
        raise SystemValidationError(label, exc) from exc


def _weights(raw: Mapping, label: str) -> dict:
    out = {}
    for p, w in raw.items():
        try:
            out[p] = as_fraction(w)
        except (TypeError, ValueError) as exc:
            raise SystemValidationError(label, exc) from exc
    return out


def _build(doc: Mapping, source: str) -> SystemFile:
    errors = sorted(_validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise SystemValidationError(f"schema at {where}", err.message)

    omega = _space(doc["phase_space"], "phase_space")
    spaces: dict[str, FiniteSpace] = {}
    values: dict[str, dict[str, Fraction]] = {}
    for entry in doc["outcome_spaces"]:
        sid = entry["id"]
        label = f"outcome space {sid!r}"
        if sid in spaces:
            raise SystemValidationError(label, "declared twice")
        spaces[sid] = _space(entry, label)
        if "values" in entry:
            vals = _weights(entry["values"], f"{label} values")
            missing = [p for p in spaces[sid].points if p not in vals]
            extra = [p for p in vals if p not in spaces[sid]]
            if missing or extra:
                bad = (missing or extra)[0]
                raise SystemValidationError(
                    f"{label} values", f"{'missing' if missing else 'unknown'} point {bad!r}"
                )
            values[sid] = vals

    states = {}
    for name, raw in doc.get("states", {}).items():
        label = f"state {name!r}"
        try:
            states[name] = ProbabilityMeasure(omega, _weights(raw, label))
        except OpcorrError as exc:
            raise SystemValidationError(label, exc) from exc

    observables = {}
    for name, entry in doc["observables"].items():
        label = f"observable {name!r}"
        if entry["outcome_space"] not in spaces:
            raise SystemValidationError(
                label, f"unknown outcome space {entry['outcome_space']!r}"
            )
        target = spaces[entry["outcome_space"]]
        kernel = {w: _weights(row, f"{label} row {w!r}") for w, row in entry["kernel"].items()}
        try:
            observables[name] = Observable(name, omega, target, kernel)
        except OpcorrError as exc:
            raise SystemValidationError(label, exc) from exc

    joints = {}
    for name, entry in doc.get("joints", {}).items():
        label = f"joint {name!r}"
        try:
            A1 = observables[entry["left"]]
            A2 = observables[entry["right"]]
        except KeyError as exc:
            raise SystemValidationError(label, f"unknown observable {exc.args[0]!r}") from None
        try:
            if entry["rows"] == "product":
                joints[name] = product_joint(A1, A2, name)
                continue
            pair_space = product_space(A1.outcome_space, A2.outcome_space)
            rows = {}
            for w, cells in entry["rows"].items():
                row: dict = {}
                for (x1, x2), weight in cells:
                    if (x1, x2) not in pair_space:
                        raise UnknownPoint((x1, x2), pair_space.id)
                    row[(x1, x2)] = row.get((x1, x2), 0) + _weights({0: weight}, label)[0]
                rows[w] = row
            joints[name] = make_joint(A1, A2, rows, name)
        except OpcorrError as exc:
            raise SystemValidationError(label, exc) from exc

    return SystemFile(
        phase_space=omega,
        outcome_spaces=spaces,
        states=states,
        observables=observables,
        joints=joints,
        values=values,
        description=doc.get("description", ""),
        source=source,
    )


def loads(text: str, source: str = "<string>") -> SystemFile:
    """Parse and fully validate a system document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno, source) from None
    return _build(doc, source)


def bundled_systems() -> list[str]:
    """Names of the example systems shipped with the package."""
    data = resources.files("opcorr") / "data"
    return sorted(p.name[: -len(".json")] for p in data.iterdir() if p.name.endswith(".json"))


def bundled_path(name: str) -> Path:
    path = resources.files("opcorr") / "data" / f"{name}.json"
    if not path.is_file():
        raise FileNotFoundError(f"no bundled system named {name!r}")
    return Path(str(path))


def load(path: str | Path) -> SystemFile:
    """Load a system file; a bare bundled name such as ``"bell_diagonal"`` also works."""
    p = Path(path)
    if not p.exists() and str(path) in bundled_systems():
        p = bundled_path(str(path))
    return loads(p.read_text(encoding="utf-8"), str(path))
