"""Primal variables from optimal dual weights, and the primal/dual certificate."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ._logspace import nearest_feasible, null_space
from .errors import DegenerateWeightsError, GpDomainError
from .model import constraint_residuals, evaluate_posynomial
from .scenario import StandardGp
from .solver import DualSolution

GAP_TOL = 1e-5
VIOLATION_TOL = 1e-6
COMPLEMENTARITY_TOL = 1e-4


def active_threshold(lam: NDArray[np.float64]) -> float:
    """Block-sum level below which a constraint counts as inactive."""
    top = float(np.max(lam)) if np.size(lam) else 0.0
    return 1e-7 * max(1.0, top)


@dataclass(frozen=True, eq=False)
class PrimalSolution:
    x: NDArray[np.float64]
    objective_value: float
    constraint_residuals: NDArray[np.float64]
    recovery_residual: float
    unique: bool
    method: str = "dual-recovery"
    active: tuple[int, ...] = ()

    def as_dict(self, variables) -> dict[str, float]:
        return {name: float(v) for name, v in zip(variables, self.x)}


class Verdict(str, enum.Enum):
    CERTIFIED = "CERTIFIED"
    GAP_TOO_LARGE = "GAP_TOO_LARGE"
    INFEASIBLE_PRIMAL = "INFEASIBLE_PRIMAL"


@dataclass(frozen=True)
class Certificate:
    dual_value: float
    primal_value: float
    relative_gap: float
    max_constraint_violation: float
    complementarity_slack: float
    complementarity_ok: bool
    verdict: Verdict

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.CERTIFIED


def primal_from_log(g: StandardGp, y: NDArray, resid: float, unique: bool, method: str,
            active=()) -> PrimalSolution:
    x = np.exp(y)
    if not np.all(np.isfinite(x)) or not np.all(x > 0):
        raise GpDomainError("recovered variables overflow or underflow; "
                            "the optimum is probably not attained")
    return PrimalSolution(x=x, objective_value=evaluate_posynomial(g.objective, x),
                          constraint_residuals=constraint_residuals(g.as_concrete(), x),
                          recovery_residual=float(resid), unique=bool(unique), method=method,
                          active=tuple(active))


def recover_primal(g: StandardGp, ds: DualSolution,
                   zero_weight_threshold: float = 1e-9) -> PrimalSolution:
    """Solve the log-linear weight relations for ``ln x`` in the least-squares sense.

    Each objective term with positive weight gives
    ``a_0t . ln x = ln(w_0t Z / c_0t)``; each term of an active constraint
    gives ``a_it . ln x = ln(w_it / (lam_i d_it))``. When the system has
    rank below n the minimum-norm solution is taken and, if it violates one
    of the inactive constraints, moved within the solution set to the
    nearest point that satisfies them.
    """
    if not ds.dual_value > 0:
        raise GpDomainError("the dual value must be positive")
    w, lam = np.asarray(ds.w), np.asarray(ds.lam)
    act = active_threshold(lam)
    rows, rhs = [], []
    obj = g.objective
    for t in range(obj.n_terms):
        if w[t] > zero_weight_threshold:
            rows.append(obj.exponents[t])
            rhs.append(np.log(w[t] * ds.dual_value / obj.coefficients[t]))
    offset = obj.n_terms
    active, inactive = [], []
    for i, blk in enumerate(g.constraints, start=1):
        wi = w[offset:offset + blk.n_terms]
        offset += blk.n_terms
        if lam[i - 1] <= act:
            inactive.append(i)
            continue
        active.append(i)
        for t in range(blk.n_terms):
            if wi[t] > zero_weight_threshold:
                rows.append(blk.exponents[t])
                rhs.append(np.log(wi[t] / (lam[i - 1] * blk.coefficients[t])))
    if not rows:
        raise DegenerateWeightsError("no dual weight is large enough to define an equation")

    e = np.array(rows, dtype=float)
    r = np.array(rhs, dtype=float)
    y, _, rank, _ = np.linalg.lstsq(e, r, rcond=None)
    resid = float(np.max(np.abs(e @ y - r)))
    unique = bool(rank == g.n)
    if not unique and inactive:
        basis, _ = null_space(e)
        blocks = [(np.log(g.blocks[i].coefficients), g.blocks[i].exponents) for i in inactive]
        y, _ = nearest_feasible(blocks, y, basis)
    return primal_from_log(g, y, resid, unique, "dual-recovery", active)


def certify(g: StandardGp, ds: DualSolution, ps: PrimalSolution) -> Certificate:
    """Compare primal and dual values and check primal feasibility."""
    dual = float(ds.dual_value)
    primal = float(ps.objective_value)
    gap = abs(primal - dual) / max(1.0, abs(dual))
    resid = np.asarray(ps.constraint_residuals, dtype=float)
    violation = max(0.0, float(np.max(resid))) if resid.size else 0.0
    lam = np.asarray(ds.lam, dtype=float)
    slack = float(np.max(np.minimum(lam, np.abs(resid)))) if resid.size else 0.0
    act = active_threshold(lam)
    comp_ok = bool(np.all(np.abs(resid[lam > act]) <= COMPLEMENTARITY_TOL)) if resid.size else True
    if violation > VIOLATION_TOL:
        verdict = Verdict.INFEASIBLE_PRIMAL
    elif gap > GAP_TOL:
        verdict = Verdict.GAP_TOO_LARGE
    else:
        verdict = Verdict.CERTIFIED
    return Certificate(dual, primal, gap, violation, slack, comp_ok, verdict)
