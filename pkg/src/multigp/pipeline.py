"""Solve scenarios end to end: standard form, dual, recovery, certificate."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

from .dual import build_dual
from .errors import (DegenerateWeightsError, GpDomainError, InfeasibleDualError,
                     NonConvergedError, PrimalInfeasibleError, UnboundedBelowError)
from .model import MultiGpProblem
from .oracle import OracleOptions, SweepReport, oracle_solve
from .recovery import certify, recover_primal
from .scenario import Scenario, standard_form
from .solver import SolverOptions, maximize_dual

ORACLE_RTOL = 1e-5

# statuses besides the certificate verdicts
INFEASIBLE_DUAL = "INFEASIBLE_DUAL"
NONCONVERGED = "NONCONVERGED"
RECOVERY_FAILED = "RECOVERY_FAILED"


@dataclass
class OracleCheck:
    status: str
    value: float | None = None
    x: dict[str, float] | None = None
    relative_difference: float | None = None
    agrees: bool | None = None
    message: str = ""


@dataclass
class ScenarioResult:
    scenario: str
    status: str
    dual_value: float | None = None
    weights: dict[str, float] = field(default_factory=dict)
    lam: dict[str, float] = field(default_factory=dict)
    x: dict[str, float] = field(default_factory=dict)
    primal_value: float | None = None
    relative_gap: float | None = None
    max_violation: float | None = None
    kkt_residual: float | None = None
    iterations: int | None = None
    method: str = ""
    unique: bool | None = None
    inactive: list[int] = field(default_factory=list)
    message: str = ""
    wall_time: float | None = None
    oracle: OracleCheck | None = None

    @property
    def certified(self) -> bool:
        return self.status == "CERTIFIED"


@dataclass
class RunReport:
    version: str
    problem: dict
    scenarios: list[ScenarioResult] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    sweep: SweepReport | None = None
    sweep_error: str = ""

    def exit_code(self) -> int:
        statuses = {r.status for r in self.scenarios}
        if INFEASIBLE_DUAL in statuses:
            return 1
        if self.sweep_error or any(not r.certified for r in self.scenarios):
            return 3
        return 0


def _oracle(g, variables, dual_value, opts: OracleOptions) -> OracleCheck:
    try:
        ps = oracle_solve(g, opts)
    except UnboundedBelowError as exc:
        return OracleCheck("UNBOUNDED_BELOW", message=str(exc))
    except PrimalInfeasibleError as exc:
        return OracleCheck("INFEASIBLE_PRIMAL", message=str(exc))
    except NonConvergedError as exc:
        return OracleCheck(NONCONVERGED, message=str(exc))
    check = OracleCheck("SOLVED", ps.objective_value, ps.as_dict(variables))
    if dual_value is not None:
        check.relative_difference = abs(dual_value - ps.objective_value) / dual_value
        check.agrees = check.relative_difference <= ORACLE_RTOL
    return check


def solve_scenario(p: MultiGpProblem, s: Scenario, opts: SolverOptions | None = None,
                   oracle_check: bool = False, timing: bool = False) -> ScenarioResult:
    """Run the dual route for one scenario; failures become statuses, not exceptions."""
    opts = opts or SolverOptions()
    start = time.perf_counter()
    g = standard_form(p, s)
    dp = build_dual(g)
    res = ScenarioResult(scenario=s.label, status="")
    try:
        ds = maximize_dual(dp, opts)
    except InfeasibleDualError as exc:
        res.status, res.message = INFEASIBLE_DUAL, str(exc)
    except NonConvergedError as exc:
        res.status, res.message = NONCONVERGED, str(exc)
        best = exc.best
        if hasattr(best, "kkt_residual"):
            res.kkt_residual = best.kkt_residual
            res.iterations = best.iterations
    else:
        res.dual_value = ds.dual_value
        res.weights = dict(zip(dp.weight_labels(), map(float, ds.w)))
        res.lam = {f"lambda{i + 1}": float(v) for i, v in enumerate(ds.lam)}
        res.kkt_residual = ds.kkt_residual
        res.iterations = ds.iterations
        res.method = ds.method
        try:
            ps = recover_primal(g, ds, opts.zero_weight_threshold)
        except (DegenerateWeightsError, GpDomainError) as exc:
            res.status, res.message = RECOVERY_FAILED, str(exc)
        else:
            cert = certify(g, ds, ps)
            res.status = cert.verdict.value
            res.x = ps.as_dict(p.variables)
            res.primal_value = ps.objective_value
            res.relative_gap = cert.relative_gap
            res.max_violation = cert.max_constraint_violation
            res.unique = bool(ps.unique)
            res.inactive = [i for i in range(1, g.m + 1) if i not in ps.active]
    if oracle_check:
        res.oracle = _oracle(g, p.variables, res.dual_value, OracleOptions())
    if timing:
        res.wall_time = time.perf_counter() - start
    return res


def solve_problem(p: MultiGpProblem, scenarios: Sequence[Scenario] = tuple(Scenario),
                  opts: SolverOptions | None = None, oracle_check: bool = False,
                  timing: bool = False) -> list[ScenarioResult]:
    return [solve_scenario(p, s, opts, oracle_check, timing) for s in scenarios]
