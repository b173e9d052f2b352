"""Text and JSON renderings of a :class:`RunReport`.

Both renderings carry the same fields. Text prints numbers with 7
significant digits; JSON keeps full double precision.
"""

from __future__ import annotations

import json
from typing import Any

from .oracle import SweepReport
from .pipeline import OracleCheck, RunReport, ScenarioResult


def _oracle_dict(o: OracleCheck) -> dict[str, Any]:
    return {"status": o.status, "value": o.value, "x": o.x,
            "relative_difference": o.relative_difference, "agrees": o.agrees,
            "message": o.message}


def scenario_dict(r: ScenarioResult) -> dict[str, Any]:
    out: dict[str, Any] = {
        "scenario": r.scenario,
        "status": r.status,
        "Z": r.dual_value,
        "weights": r.weights,
        "lambda": r.lam,
        "x": r.x,
        "primal_value": r.primal_value,
        "relative_gap": r.relative_gap,
        "max_constraint_violation": r.max_violation,
        "kkt_residual": r.kkt_residual,
        "iterations": r.iterations,
        "method": r.method,
        "unique": r.unique,
        "inactive_constraints": r.inactive,
        "message": r.message,
    }
    if r.wall_time is not None:
        out["wall_time"] = r.wall_time
    if r.oracle is not None:
        out["oracle"] = _oracle_dict(r.oracle)
    return out


def sweep_dict(s: SweepReport) -> dict[str, Any]:
    return {
        "k": s.k, "combos": s.combos, "sites": list(s.sites), "values": list(s.values),
        "failures": {str(i): tag for i, tag in sorted(s.failures.items())},
        "min_value": s.min_value,
        "min_choice": list(s.min_choice) if s.min_choice is not None else None,
        "max_value": s.max_value,
        "max_choice": list(s.max_choice) if s.max_choice is not None else None,
        "all_low": s.all_low, "all_mid": s.all_mid, "all_high": s.all_high,
        "low_attains_min": s.low_attains_min, "high_attains_max": s.high_attains_max,
        "low_attains_max": s.low_attains_max, "high_attains_min": s.high_attains_min,
    }


def report_dict(r: RunReport) -> dict[str, Any]:
    out: dict[str, Any] = {
        "tool": "multigp",
        "version": r.version,
        "problem": r.problem,
        "warnings": list(r.warnings),
        "scenarios": [scenario_dict(s) for s in r.scenarios],
    }
    if r.sweep is not None:
        out["sweep"] = sweep_dict(r.sweep)
    if r.sweep_error:
        out["sweep_error"] = r.sweep_error
    return out


def _num(v: Any) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    return f"{v:#.7g}"


def _rows(rows: list[tuple[str, Any]], indent: str = "  ") -> list[str]:
    width = max((len(k) for k, _ in rows), default=0)
    return [f"{indent}{k:<{width}} = {v if isinstance(v, str) else _num(v)}" for k, v in rows]


def _scenario_text(r: ScenarioResult) -> list[str]:
    lines = [f"scenario {r.scenario}: {r.status}"]
    if r.message:
        lines.append(f"  {r.message}")
    rows: list[tuple[str, Any]] = []
    if r.dual_value is not None:
        rows.append((f"Z^{r.scenario}", r.dual_value))
    rows += list(r.weights.items()) + list(r.lam.items()) + list(r.x.items())
    if r.primal_value is not None:
        rows += [("primal value", r.primal_value), ("relative gap", r.relative_gap),
                 ("max violation", r.max_violation)]
    if r.kkt_residual is not None:
        rows.append(("KKT residual", r.kkt_residual))
    if r.iterations is not None:
        rows.append(("iterations", r.iterations))
    if r.method:
        rows.append(("method", r.method))
    if r.unique is not None:
        rows.append(("unique x", r.unique))
    if r.inactive:
        rows.append(("inactive", ", ".join(map(str, r.inactive))))
    if r.wall_time is not None:
        rows.append(("wall time [s]", r.wall_time))
    if r.oracle is not None:
        o = r.oracle
        rows += [("oracle status", o.status), ("oracle value", o.value),
                 ("oracle rel. diff", o.relative_difference), ("oracle agrees", o.agrees)]
    return lines + _rows(rows)


def _sweep_text(s: SweepReport) -> list[str]:
    lines = ["sweep:"]
    lines += ["  " + line for line in s.summary().splitlines()]
    return lines


def render_text(r: RunReport) -> str:
    p = r.problem
    n_con = len(p.get("constraints", []))
    head = (f"multigp {r.version}  problem {p.get('name') or '<unnamed>'}: "
            f"{len(p.get('variables', []))} variables, {n_con} constraint{'' if n_con == 1 else 's'}")
    lines = [head]
    lines += [f"warning: {w}" for w in r.warnings]
    for s in r.scenarios:
        lines.append("")
        lines += _scenario_text(s)
    if r.sweep is not None:
        lines.append("")
        lines += _sweep_text(r.sweep)
    if r.sweep_error:
        lines += ["", f"sweep: {r.sweep_error}"]
    return "\n".join(lines) + "\n"


def render_json(r: RunReport) -> str:
    return json.dumps(report_dict(r), indent=2, allow_nan=False) + "\n"


def render_report(r: RunReport, format: str = "text") -> str:
    if format == "text":
        return render_text(r)
    if format == "json":
        return render_json(r)
    raise ValueError(f"unknown report format {format!r}")
