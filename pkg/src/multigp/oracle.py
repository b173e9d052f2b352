"""Independent checks of the dual route.

* :func:`oracle_solve` works on the primal side only: with ``y = ln x`` the
  program becomes ``min lse_0(y)`` s.t. ``lse_i(y) <= 0``, a smooth convex
  problem solved here with a log-barrier Newton method. It shares no code
  with the dual solver beyond the log-sum-exp derivatives.
* :func:`generate_random_gp` builds random well-posed instances.
* :func:`sweep_scenarios` solves every point of the parameter space.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import linprog

from ._logspace import LogPosy, lse, lse_derivatives
from .dual import build_dual
from .errors import (CapExceededError, InfeasibleDualError, NonConvergedError,
                     PrimalInfeasibleError, UnboundedBelowError)
from .model import ConcretePosynomial, MultiGpProblem
from .recovery import PrimalSolution, primal_from_log
from .scenario import ParameterSpace, StandardGp, instantiate_choice, normalize, parameter_space
from .solver import SolverOptions, maximize_dual

log = logging.getLogger(__name__)

SWEEP_CAP = 12


@dataclass(frozen=True)
class OracleOptions:
    gap_tol: float = 1e-11  # bound on the log-objective suboptimality
    max_iter: int = 500
    t_init: float = 1.0
    t_growth: float = 10.0
    unbounded_norm: float = 100.0
    proximal: float = 1e-2  # weight of mu/2 * |y|^2; keeps flat optimal sets from drifting


def _log_blocks(g: StandardGp) -> list[LogPosy]:
    return [(np.log(b.coefficients), b.exponents) for b in g.blocks]


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def step(self, where: str, best=None):
        self.used += 1
        if self.used > self.limit:
            raise NonConvergedError(f"oracle {where}: iteration limit {self.limit} reached", best)


def _barrier_newton(value_derivs, z: NDArray, feasible, budget: _Budget, where: str,
                    dec_tol: float = 1e-12, stop=None) -> NDArray:
    """Damped Newton minimization of a barrier function from a feasible ``z``."""
    while True:
        f, g, h = value_derivs(z)
        dz = -np.linalg.lstsq(h, g, rcond=1e-13)[0]
        dec2 = -float(g @ dz)
        if dec2 <= 2 * dec_tol or (stop is not None and stop(z)):
            return z
        budget.step(where, z)
        t = 1.0
        while t > 1e-14:
            cand = z + t * dz
            if feasible(cand) and value_derivs(cand, value_only=True) <= f - 0.25 * t * dec2:
                break
            t *= 0.5
        else:
            return z
        z = cand


def _phase_one(cons: list[LogPosy], n: int, budget: _Budget) -> NDArray:
    """A point with every ``lse_i < 0``, found by minimizing the largest constraint."""
    y = np.zeros(n)
    if not cons or max(lse(c, y) for c in cons) < -1e-3:
        return y
    s = max(lse(c, y) for c in cons) + 1.0
    z = np.concatenate([y, [s]])

    def feasible(z):
        return all(lse(c, z[:-1]) < z[-1] for c in cons)

    def stop(z):
        return all(lse(c, z[:-1]) < -1e-3 for c in cons)

    t = 1.0
    for _ in range(40):
        def vd(z, value_only=False, mu=1.0 / t):
            y, s = z[:-1], z[-1]
            val = s
            grad = np.zeros(n + 1)
            grad[-1] = 1.0
            hess = np.zeros((n + 1, n + 1))
            for c in cons:
                fi, gi, hi = lse_derivatives(c, y)
                slack = s - fi
                val -= mu * np.log(slack)
                gz = np.concatenate([-gi, [1.0]])
                grad -= mu * gz / slack
                hess[:n, :n] += mu * hi / slack
                hess += mu * np.outer(gz, gz) / slack ** 2
            # keep s bounded below so the subproblem has a minimizer
            val -= mu * np.log(s + 10.0)
            grad[-1] -= mu / (s + 10.0)
            hess[-1, -1] += mu / (s + 10.0) ** 2
            return val if value_only else (val, grad, hess)

        z = _barrier_newton(vd, z, lambda z: feasible(z) and z[-1] > -10.0, budget, "phase 1",
                            dec_tol=1e-10 / t, stop=stop)
        if stop(z):
            return z[:-1]
        # barrier gap bound: the smallest achievable s is at least z[-1] - (k + 1) / t
        if z[-1] - (len(cons) + 1) / t > 1e-9 or (len(cons) + 1) / t < 1e-10:
            break
        t *= 10.0
    raise PrimalInfeasibleError(
        f"no strictly feasible x found (smallest max constraint log-value {z[-1]:.3g})")


def _certify_ray(blocks: list[LogPosy], d: NDArray) -> bool:
    obj_ok = bool(np.all(blocks[0][1] @ d < 0))
    cons_ok = all(np.all(a @ d <= 1e-9) for _, a in blocks[1:])
    return obj_ok and cons_ok


def oracle_solve(g: StandardGp, opts: OracleOptions | None = None) -> PrimalSolution:
    """Minimize the primal program in log variables with a log-barrier method.

    The objective is handled as ``ln g_0``, which has the same minimizers as
    ``g_0`` and better scaling. A small proximal term, scaled with the
    barrier weight, keeps iterates bounded when the optimal set is
    unbounded. ``recovery_residual`` of the result holds the final barrier
    weight bound ``max(m, 1) / t``.
    """
    opts = opts or OracleOptions()
    blocks = _log_blocks(g)
    obj, cons = blocks[0], blocks[1:]
    budget = _Budget(opts.max_iter)
    y = _phase_one(cons, g.n, budget)
    m = len(cons)

    def feasible(y):
        return all(lse(c, y) < 0 for c in cons)

    def check_unbounded(y):
        norm = float(np.linalg.norm(y))
        if norm > opts.unbounded_norm:
            d = y / norm
            if _certify_ray(blocks, d):
                raise UnboundedBelowError("objective tends to zero along a feasible ray", ray=d)
            raise NonConvergedError("oracle iterates diverge without a certified ray", y)
        return False

    # minimize ln g_0 + mu * (sum(-ln(-lse_i)) + prox/2 |y|^2); mu = 1/t keeps values O(1)
    t = opts.t_init
    prox = opts.proximal
    while True:
        def vd(y, value_only=False, mu=1.0 / t):
            val, grad, hess = lse_derivatives(obj, y)
            val += 0.5 * mu * prox * float(y @ y)
            grad = grad + mu * prox * y
            hess = hess + mu * prox * np.eye(y.size)
            for c in cons:
                fi, gi, hi = lse_derivatives(c, y)
                val -= mu * np.log(-fi)
                grad = grad + mu * gi / -fi
                hess = hess + mu * (hi / -fi + np.outer(gi, gi) / fi ** 2)
            return val if value_only else (val, grad, hess)

        y = _barrier_newton(vd, y, feasible, budget, "centering", stop=check_unbounded)
        if max(m, 1) / t <= opts.gap_tol:
            break
        t *= opts.t_growth

    _, _, h0 = lse_derivatives(obj, y)
    hess = h0 + sum((lse_derivatives(c, y)[2] for c in cons), np.zeros_like(h0))
    rank = np.linalg.matrix_rank(hess, tol=1e-10 * max(1.0, np.abs(hess).max()))
    return primal_from_log(g, y, max(m, 1) / t, rank == g.n, "primal-barrier")


@dataclass(frozen=True, eq=False)
class RandomInstance:
    gp: StandardGp
    x0: NDArray[np.float64]
    seed: int
    attempts: int


def _dual_is_canonical(g: StandardGp) -> bool:
    """True when the dual system has a strictly positive solution (checked by LP)."""
    dp = build_dual(g)
    n_w = dp.n_weights
    # variables (w, s): maximize s subject to A w = b, s - w <= 0, s <= 1
    c = np.zeros(n_w + 1)
    c[-1] = -1.0
    a_eq = np.hstack([dp.a_eq, np.zeros((dp.a_eq.shape[0], 1))])
    a_ub = np.hstack([-np.eye(n_w), np.ones((n_w, 1))])
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(n_w), A_eq=a_eq, b_eq=dp.b_eq,
                  bounds=[(0, None)] * n_w + [(None, 1.0)], method="highs")
    return res.status == 0 and -res.fun > 1e-6


def random_instance(n: int, m: int, terms_per_posy: int | Sequence[int], seed: int,
                    require_canonical_dual: bool = True, max_attempts: int = 200) -> RandomInstance:
    """Random standard-form GP with a known interior point ``x0``.

    Coefficients are log-uniform in [0.1, 10] and exponents integers in
    [-3, 3] (no all-zero rows). Each constraint is then rescaled so that
    ``g_i(x0) = 0.5``. With ``require_canonical_dual`` the draw is repeated
    (deterministically, from the same generator) until the dual has a
    strictly positive feasible point, which guarantees the primal minimum
    is attained.
    """
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    counts = [terms_per_posy] * (m + 1) if np.isscalar(terms_per_posy) else list(terms_per_posy)
    if len(counts) != m + 1 or min(counts) < 1:
        raise ValueError("need one term count >= 1 per posynomial (objective first)")
    rng = np.random.default_rng(seed)
    for attempt in range(1, max_attempts + 1):
        x0 = np.exp(rng.uniform(-1.0, 1.0, size=n))
        blocks = []
        for k, count in enumerate(counts):
            coef = 10.0 ** rng.uniform(-1.0, 1.0, size=count)
            exps = rng.integers(-3, 4, size=(count, n)).astype(float)
            for row in exps:
                while not np.any(row):
                    row[:] = rng.integers(-3, 4, size=n)
            if k > 0:
                value = float(np.sum(coef * np.exp(exps @ np.log(x0))))
                coef = coef * (0.5 / value)
            blocks.append(ConcretePosynomial(coef, exps))
        gp = StandardGp(tuple(f"x{j + 1}" for j in range(n)), tuple(blocks),
                        source=f"random(seed={seed})")
        if not require_canonical_dual or _dual_is_canonical(gp):
            return RandomInstance(gp, x0, seed, attempt)
    raise RuntimeError(f"no well-posed instance after {max_attempts} draws")


def generate_random_gp(n: int, m: int, terms_per_posy: int | Sequence[int], seed: int,
                       require_canonical_dual: bool = True) -> StandardGp:
    return random_instance(n, m, terms_per_posy, seed, require_canonical_dual).gp


@dataclass(frozen=True)
class SweepReport:
    k: int
    combos: int
    sites: tuple[str, ...]
    values: tuple[float | None, ...]
    failures: dict[int, str] = field(default_factory=dict)
    min_value: float | None = None
    min_choice: tuple[int, ...] | None = None
    max_value: float | None = None
    max_choice: tuple[int, ...] | None = None
    all_low: float | None = None
    all_mid: float | None = None
    all_high: float | None = None
    low_attains_min: bool = False
    high_attains_max: bool = False
    low_attains_max: bool = False
    high_attains_min: bool = False

    def summary(self) -> str:
        def fmt(v):
            return "n/a" if v is None else f"{v:#.7g}"
        lines = [
            f"parameter sites K = {self.k}, combinations = {self.combos}, "
            f"failed = {len(self.failures)}",
            f"min over S = {fmt(self.min_value)} at {self.min_choice}",
            f"max over S = {fmt(self.max_value)} at {self.max_choice}",
            f"all-L = {fmt(self.all_low)}, all-M = {fmt(self.all_mid)}, all-U = {fmt(self.all_high)}",
            f"all-L attains min: {self.low_attains_min}; all-U attains max: {self.high_attains_max}",
            f"all-L attains max: {self.low_attains_max}; all-U attains min: {self.high_attains_min}",
        ]
        return "\n".join(lines)


def _choice_index(choice: Sequence[int]) -> int:
    idx = 0
    for c in choice:
        idx = 3 * idx + int(c)
    return idx


def _solve_choice(args) -> tuple[float | None, str | None]:
    p, space, choice, opts = args
    try:
        dp = build_dual(normalize(instantiate_choice(p, space, choice)))
        return maximize_dual(dp, opts).dual_value, None
    except InfeasibleDualError:
        return None, "INFEASIBLE_DUAL"
    except NonConvergedError:
        return None, "NONCONVERGED"


def _close(a: float | None, b: float | None, rtol: float) -> bool:
    return a is not None and b is not None and abs(a - b) <= rtol * max(abs(a), abs(b), 1e-300)


def sweep_scenarios(p: MultiGpProblem, opts: SolverOptions | None = None, cap: int = SWEEP_CAP,
                    workers: int = 1, rtol: float = 1e-6) -> SweepReport:
    """Solve every combination of triplet components and report the extremes.

    Results are indexed by combination (lexicographic over the sites, 0 = low),
    so the report does not depend on ``workers``.
    """
    opts = opts or SolverOptions()
    space: ParameterSpace = parameter_space(p)
    if space.k > cap:
        raise CapExceededError(f"{space.k} imprecise parameters give {space.size} combinations; "
                               f"the cap is K <= {cap}")
    choices = list(space.combinations())
    jobs = [(p, space, c, opts) for c in choices]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_solve_choice, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_solve_choice(j) for j in jobs]

    values = tuple(v for v, _ in results)
    failures = {i: tag for i, (_, tag) in enumerate(results) if tag is not None}
    solved = [(v, i) for i, v in enumerate(values) if v is not None]
    lo = hi = None
    if solved:
        lo = min(solved)
        hi = max(solved)
    all_low = values[_choice_index([0] * space.k)]
    all_mid = values[_choice_index([1] * space.k)]
    all_high = values[_choice_index([2] * space.k)]
    min_value = lo[0] if lo else None
    max_value = hi[0] if hi else None
    return SweepReport(
        k=space.k, combos=space.size, sites=tuple(s.describe() for s in space.sites),
        values=values, failures=failures,
        min_value=min_value, min_choice=choices[lo[1]] if lo else None,
        max_value=max_value, max_choice=choices[hi[1]] if hi else None,
        all_low=all_low, all_mid=all_mid, all_high=all_high,
        low_attains_min=_close(all_low, min_value, rtol),
        high_attains_max=_close(all_high, max_value, rtol),
        low_attains_max=_close(all_low, max_value, rtol),
        high_attains_min=_close(all_high, min_value, rtol),
    )
