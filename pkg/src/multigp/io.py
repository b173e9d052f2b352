"""JSON problem documents.

Document layout::

    {"name": "example1",
     "variables": ["t1", "t2", "t3"],
     "objective": {"terms": [{"coef": [10, 20, 30], "exponents": {"t1": -1}}]},
     "constraints": [{"terms": [...], "rhs": 1}]}

Every numeric slot is a number or a ``[low, mid, high]`` array. ``name``,
``constraints``, ``exponents`` and ``rhs`` (default 1) may be omitted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ParseError
from .model import (ConstraintSpec, MultiGpProblem, Posynomial, Term, Triplet,
                    validate_problem)

_DOC_KEYS = {"name", "variables", "objective", "constraints"}
_POSY_KEYS = {"terms"}
_CON_KEYS = {"terms", "rhs"}
_TERM_KEYS = {"coef", "exponents"}


@dataclass
class ParsedDocument:
    problem: MultiGpProblem
    warnings: list[str] = field(default_factory=list)


def _keys(obj: Any, allowed: set[str], required: set[str], path: str) -> dict:
    if not isinstance(obj, dict):
        raise ParseError(f"expected an object, got {type(obj).__name__}", path)
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ParseError(f"unknown key(s) {', '.join(map(repr, unknown))}", path)
    missing = sorted(required - set(obj))
    if missing:
        raise ParseError(f"missing key(s) {', '.join(map(repr, missing))}", path)
    return obj


def _number(v: Any, path: str) -> float:
    # bool is an int subclass, but true/false is never a sensible parameter
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"expected a number, got {json.dumps(v)}", path)
    return float(v)


def _triplet(v: Any, path: str) -> Triplet:
    if isinstance(v, list):
        if len(v) != 3:
            raise ParseError(f"a triplet needs exactly 3 numbers, got {len(v)}", path)
        return Triplet(*(_number(x, f"{path}[{i}]") for i, x in enumerate(v)))
    return Triplet.of(_number(v, path))


def _terms(obj: Any, path: str) -> Posynomial:
    if not isinstance(obj, list):
        raise ParseError("expected a list of terms", path)
    terms = []
    for t, raw in enumerate(obj):
        tp = f"{path}[{t}]"
        _keys(raw, _TERM_KEYS, {"coef"}, tp)
        exps = raw.get("exponents", {})
        if not isinstance(exps, dict):
            raise ParseError("expected an object mapping variable names to exponents",
                             f"{tp}.exponents")
        terms.append(Term(_triplet(raw["coef"], f"{tp}.coef"),
                          {k: _triplet(v, f"{tp}.exponents.{k}") for k, v in exps.items()}))
    return Posynomial(tuple(terms))


def _problem(doc: Any) -> MultiGpProblem:
    _keys(doc, _DOC_KEYS, {"variables", "objective"}, "")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise ParseError("expected a string", "name")
    variables = doc["variables"]
    if not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
        raise ParseError("expected a list of variable names", "variables")
    obj = _keys(doc["objective"], _POSY_KEYS, {"terms"}, "objective")
    objective = _terms(obj["terms"], "objective.terms")
    raw_cons = doc.get("constraints", [])
    if not isinstance(raw_cons, list):
        raise ParseError("expected a list of constraints", "constraints")
    cons = []
    for i, raw in enumerate(raw_cons):
        cp = f"constraints[{i}]"
        _keys(raw, _CON_KEYS, {"terms"}, cp)
        rhs = _triplet(raw.get("rhs", 1.0), f"{cp}.rhs")
        cons.append(ConstraintSpec(_terms(raw["terms"], f"{cp}.terms"), rhs))
    return MultiGpProblem(tuple(variables), objective, tuple(cons), name)


def parse_document(text: str) -> ParsedDocument:
    """Parse and validate; validation warnings are returned, errors raised."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc
    problem = _problem(doc)
    report = validate_problem(problem)
    if not report.ok:
        raise ParseError("invalid problem:\n  " + "\n  ".join(report.errors),
                         violations=report.errors)
    return ParsedDocument(problem, list(report.warnings))


def parse_problem(text: str) -> MultiGpProblem:
    return parse_document(text).problem


def load_document(path: str | Path) -> ParsedDocument:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror or exc}", str(path)) from exc
    return parse_document(text)


def _encode(t: Triplet) -> float | list[float]:
    return t.low if t.degenerate else [t.low, t.mid, t.high]


def _encode_terms(posy: Posynomial) -> list[dict]:
    return [{"coef": _encode(term.coefficient),
             "exponents": {k: _encode(v) for k, v in term.exponents.items()}}
            for term in posy.terms]


def problem_to_dict(p: MultiGpProblem) -> dict:
    return {
        "name": p.name,
        "variables": list(p.variables),
        "objective": {"terms": _encode_terms(p.objective)},
        "constraints": [{"terms": _encode_terms(c.body), "rhs": _encode(c.rhs)}
                        for c in p.constraints],
    }


def serialize_problem(p: MultiGpProblem, indent: int | None = 2) -> str:
    return json.dumps(problem_to_dict(p), indent=indent)
