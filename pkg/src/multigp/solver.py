"""Maximization of the concave log-dual over ``{w >= 0, A w = b}``.

The main path is a primal log-barrier method: for a decreasing sequence of
barrier weights ``mu`` it maximizes ``v(w) + mu * sum(ln w)`` with Newton
steps restricted to the null space of ``A`` (so every iterate stays on the
affine feasible set). Once the barrier reaches its floor, constraint blocks
whose weight has collapsed are set to exactly zero and a plain Newton polish
on the remaining support drives the stationarity residual down. The result
is accepted only if its KKT residual is within tolerance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import linprog

from ._logspace import nearest_feasible, null_space
from .dual import DualProgram, dual_log_objective
from .errors import InfeasibleDualError, NonConvergedError

log = logging.getLogger(__name__)

PHASE1_TOL = 1e-8
COLLAPSED_BLOCK_RTOL = 1e-4
UNBOUNDED_WEIGHT = 1e10


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-8
    max_iter: int = 200
    barrier_init: float = 1e-1
    barrier_shrink: float = 0.1
    barrier_min: float = 1e-10
    zero_weight_threshold: float = 1e-9
    seed: int = 0  # reserved for randomized restarts; the default path is deterministic
    record_iterates: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not 0 < self.barrier_shrink < 1:
            raise ValueError("barrier_shrink must lie in (0, 1)")
        if not 0 < self.barrier_min < self.barrier_init:
            raise ValueError("need 0 < barrier_min < barrier_init")
        if self.max_iter < 0:
            raise ValueError("max_iter must be nonnegative")
        if self.zero_weight_threshold < 0:
            raise ValueError("zero_weight_threshold must be nonnegative")


@dataclass(frozen=True)
class PhaseOneResult:
    """Outcome of the feasibility search.

    ``w`` is strictly positive on ``support``; coordinates outside the support
    are zero in every nonnegative solution of the system.
    """

    feasible: bool
    w: NDArray[np.float64] | None
    support: NDArray[np.bool_] | None
    residual: float


@dataclass(frozen=True, eq=False)
class DualSolution:
    """Optimal weights and the path that led to them.

    ``history[k]`` is the log-dual value of the k-th recorded point (the
    phase-1 point first). ``roundings`` lists the positions where small
    weights were snapped to zero; the values are non-decreasing between
    consecutive roundings.
    """

    w: NDArray[np.float64]
    lam: NDArray[np.float64]
    dual_value: float
    log_dual_value: float
    kkt_residual: float
    iterations: int
    converged: bool
    method: str = "barrier"
    multipliers: NDArray[np.float64] | None = None
    zero_blocks: tuple[int, ...] = ()
    history: tuple[float, ...] = ()
    iterates: tuple[NDArray[np.float64], ...] | None = None
    roundings: tuple[int, ...] = ()


@dataclass
class _Kkt:
    residual: float
    feasibility: float
    stationarity: float
    boundary: float
    multipliers: NDArray[np.float64]


def _project(a: NDArray, b: NDArray, w: NDArray, idx: NDArray) -> NDArray:
    """Minimum-norm correction of ``w[idx]`` so that ``a w = b``."""
    out = w.copy()
    if idx.size:
        r = b - a @ out
        out[idx] += np.linalg.lstsq(a[:, idx], r, rcond=None)[0]
    return out


def find_feasible_weights(dp: DualProgram) -> PhaseOneResult:
    """A relative-interior point of ``{w >= 0, A w = b}``, or a certificate that it is empty.

    One linear program over the homogenised cone ``A z = b tau``, ``tau >= 1``
    maximises ``sum s`` with ``0 <= s <= 1`` and ``s <= z``. A coordinate gets
    ``s = 1`` exactly when some feasible point has it positive, so ``z / tau``
    is positive on the largest possible support.
    """
    a, b = np.asarray(dp.a_eq), np.asarray(dp.b_eq)
    rows, n_w = a.shape
    # variables: z (n_w), tau, s (n_w)
    a_eq = np.hstack([a, -b[:, None], np.zeros((rows, n_w))])
    a_ub = np.hstack([-np.eye(n_w), np.zeros((n_w, 1)), np.eye(n_w)])
    cost = np.concatenate([np.zeros(n_w + 1), -np.ones(n_w)])
    bounds = [(0, None)] * n_w + [(1, None)] + [(0, 1)] * n_w
    lp = linprog(cost, A_ub=a_ub, b_ub=np.zeros(n_w), A_eq=a_eq, b_eq=np.zeros(rows),
                 bounds=bounds, method="highs")
    if lp.status == 2:
        return PhaseOneResult(False, None, None, float("inf"))
    if lp.status != 0:
        raise NonConvergedError(f"phase 1 linear program failed: {lp.message}")
    z, tau, s = lp.x[:n_w], lp.x[n_w], lp.x[n_w + 1:]
    support = s > 0.5
    w = np.where(support, z / tau, 0.0)
    projected = _project(a, b, w, np.flatnonzero(support))
    if np.all(projected[support] > 0):
        w = projected
    resid = float(np.max(np.abs(a @ w - b)))
    if resid > PHASE1_TOL * max(1.0, float(np.linalg.norm(b))):
        return PhaseOneResult(False, None, None, resid)
    return PhaseOneResult(True, w, support, resid)


def _solution(dp: DualProgram, w: NDArray, kkt: float, iterations: int, converged: bool,
              method: str, multipliers=None, zero_blocks=(), history=(), iterates=None,
              roundings=()):
    logv = dual_log_objective(dp, w)
    return DualSolution(w=w, lam=dp.block_sums(w), dual_value=float(np.exp(logv)),
                        log_dual_value=logv, kkt_residual=float(kkt), iterations=iterations,
                        converged=converged, method=method, multipliers=multipliers,
                        zero_blocks=tuple(zero_blocks), history=tuple(history),
                        iterates=iterates, roundings=tuple(roundings))


def solve_zero_dod(dp: DualProgram) -> DualSolution | None:
    """Direct solve when the dual feasible set is a single point.

    Returns None when not applicable (degrees of difficulty != 0, or a
    singular system); raises :class:`InfeasibleDualError` when the unique
    solution has a negative component.
    """
    a, b = np.asarray(dp.a_eq), np.asarray(dp.b_eq)
    if a.shape[0] != a.shape[1]:
        return None
    s = np.linalg.svd(a, compute_uv=False)
    if s[-1] <= 1e-12 * s[0]:
        return None
    w = np.linalg.solve(a, b)
    if np.any(w < -1e-12):
        raise InfeasibleDualError(
            f"the normality/orthogonality system forces a negative weight: {w.tolist()}")
    w = np.clip(w, 0.0, None)
    feas = float(np.max(np.abs(a @ w - b)))
    return _solution(dp, w, feas, 0, True, "zero-dod", history=(dual_log_objective(dp, w),))


class _Run:
    """State of one barrier/polish run on a fixed set of free coordinates."""

    def __init__(self, dp: DualProgram, opts: SolverOptions):
        self.dp = dp
        self.opts = opts
        self.a = np.asarray(dp.a_eq)
        self.b = np.asarray(dp.b_eq)
        self.iterations = 0
        self.history: list[float] = []
        self.iterates: list[NDArray] | None = [] if opts.record_iterates else None
        self.roundings: list[int] = []

    def checkpoint(self):
        return (list(self.history), None if self.iterates is None else list(self.iterates),
                list(self.roundings))

    def restore(self, state) -> None:
        history, iterates, roundings = state
        self.history, self.roundings = list(history), list(roundings)
        self.iterates = None if iterates is None else list(iterates)

    def _accept(self, w: NDArray, v: float) -> None:
        self.iterations += 1
        self.history.append(v)
        if self.iterates is not None:
            self.iterates.append(w.copy())
        if np.max(w) > UNBOUNDED_WEIGHT:
            raise NonConvergedError("dual weights grow without bound; "
                                    "the primal program is probably infeasible")

    def _budget(self, w):
        if self.iterations >= self.opts.max_iter:
            raise NonConvergedError(f"iteration limit {self.opts.max_iter} reached",
                                    best=w.copy())

    def _newton(self, w: NDArray, idx: NDArray, basis: NDArray, mu: float):
        """Null-space Newton direction for ``v + mu * sum(ln w[idx])``."""
        g = dual_gradient_partial(self.dp, w, idx)
        h = dual_hessian_partial(self.dp, w, idx)
        gphi = g + mu / w[idx]
        hneg = -h + np.diag(mu / w[idx] ** 2)
        m = basis.T @ hneg @ basis
        r = basis.T @ gphi
        dz = np.linalg.lstsq(m, r, rcond=1e-14)[0]
        d = np.zeros_like(w)
        d[idx] = basis @ dz
        return d, float(r @ dz), float(g @ d[idx])

    def _line_search(self, w: NDArray, d: NDArray, idx: NDArray, mu: float, slope: float):
        neg = d[idx] < 0
        t = 1.0
        if np.any(neg):
            t = min(1.0, 0.99 * float(np.min(-w[idx][neg] / d[idx][neg])))
        v0 = dual_log_objective(self.dp, w)
        phi0 = v0 + mu * float(np.sum(np.log(w[idx])))
        for _ in range(60):
            cand = w + t * d
            if np.all(cand[idx] > 0):
                v1 = dual_log_objective(self.dp, cand)
                phi1 = v1 + mu * float(np.sum(np.log(cand[idx])))
                if phi1 >= phi0 + 1e-4 * t * slope and v1 >= v0 - 1e-12:
                    return cand, v1
            t *= 0.5
        return None, v0

    def centre(self, w: NDArray, idx: NDArray, basis: NDArray, mu: float,
               dec_tol: float) -> NDArray:
        """Newton iterations at fixed ``mu`` until the decrement is below ``dec_tol``."""
        while True:
            d, dec2, vslope = self._newton(w, idx, basis, mu)
            if 0.5 * dec2 <= dec_tol or not np.any(d):
                return w
            if vslope < 0:
                # the barrier term pulls against v here; leave it to a smaller mu
                return w
            self._budget(w)
            cand, v1 = self._line_search(w, d, idx, mu, dec2)
            if cand is None:
                return w
            w = _project(self.a, self.b, cand, idx)
            if np.any(w[idx] <= 0):
                w = cand
            self._accept(w, v1 if w is cand else dual_log_objective(self.dp, w))

    def barrier(self, w: NDArray, idx: NDArray) -> NDArray:
        basis, _ = null_space(self.a[:, idx])
        if basis.shape[1] == 0:
            return w
        mu = self.opts.barrier_init
        while True:
            w = self.centre(w, idx, basis, mu, dec_tol=1e-10)
            if mu <= self.opts.barrier_min:
                return w
            mu = max(mu * self.opts.barrier_shrink, self.opts.barrier_min)

    def polish(self, w: NDArray, idx: NDArray) -> NDArray:
        basis, _ = null_space(self.a[:, idx])
        if basis.shape[1] == 0:
            return w
        for _ in range(50):
            d, dec2, _ = self._newton(w, idx, basis, 0.0)
            g = dual_gradient_partial(self.dp, w, idx)
            zg = np.max(np.abs(basis.T @ g))
            if zg <= 1e-2 * self.opts.tol or dec2 <= 1e-30:
                return w
            self._budget(w)
            v0 = dual_log_objective(self.dp, w)
            if dec2 <= 1e-13 * max(1.0, abs(v0)):
                # the predicted gain is below the resolution of v, so judge
                # the full step by the reduced gradient instead
                cand = w + d
                if np.any(cand[idx] <= 0):
                    return w
                gc = dual_gradient_partial(self.dp, cand, idx)
                if np.max(np.abs(basis.T @ gc)) >= zg:
                    return w
                v1 = dual_log_objective(self.dp, cand)
            else:
                cand, v1 = self._line_search(w, d, idx, 0.0, dec2)
                if cand is None:
                    return w
            w = cand
            self._accept(w, v1)
        return w

    def polish_active_set(self, w: NDArray, idx: NDArray) -> NDArray | None:
        """Snap sub-threshold weights to zero, restore feasibility, polish; repeat.

        Returns None if the remaining support cannot satisfy ``A w = b`` with
        positive weights.
        """
        thr = self.opts.zero_weight_threshold
        w = w.copy()
        for _ in range(2 * len(self.dp.blocks) + 2):
            small = w[idx] <= thr
            w[idx[small]] = 0.0
            idx = idx[~small]
            w = _project(self.a, self.b, w, idx)
            if idx.size == 0 or np.any(w[idx] <= 0):
                return None
            self.roundings.append(len(self.history))
            self.history.append(dual_log_objective(self.dp, w))
            if self.iterates is not None:
                self.iterates.append(w.copy())
            w = self.polish(w, idx)
            if not np.any(w[idx] <= thr):
                return w
        return None


def _block_idx(dp: DualProgram, blocks) -> NDArray:
    if not blocks:
        return np.zeros(0, dtype=int)
    return np.flatnonzero(np.isin(dp.block_of, list(blocks)))


def dual_gradient_partial(dp: DualProgram, w: NDArray, idx: NDArray) -> NDArray:
    """Gradient of ``v`` restricted to ``idx`` (other weights may be zero)."""
    lam = np.concatenate([[np.exp(-1.0)], dp.block_sums(w)])
    wi = w[idx]
    return np.log(dp.coefficients[idx]) - np.log(wi) + np.log(lam[dp.block_of[idx]])


def dual_hessian_partial(dp: DualProgram, w: NDArray, idx: NDArray) -> NDArray:
    lam = dp.block_sums(w)
    blk = dp.block_of[idx]
    h = np.diag(-1.0 / w[idx])
    for i in range(1, len(dp.blocks)):
        sel = np.flatnonzero(blk == i)
        if sel.size:
            h[np.ix_(sel, sel)] += 1.0 / lam[i - 1]
    return h


def kkt_residual(dp: DualProgram, w: NDArray, threshold: float = 0.0,
                 fixed: NDArray | None = None) -> _Kkt:
    """Optimality residual of ``w`` for the dual program.

    Components, all in log units:

    * equality residual ``|A w - b|``;
    * stationarity on the support: the gradient restricted to ``w > 0`` must
      lie in the row space of the restricted system (residual of the
      least-squares multiplier fit);
    * boundary conditions for zero weights, with one multiplier vector
      ``nu`` chosen from the admissible family: a constraint block that is
      entirely zero needs ``ln sum_t d_t exp(-A_t . nu) <= 0`` (the
      one-sided derivative of ``lam ln lam`` terms); an isolated zero in a
      positive block needs a nonpositive reduced gradient evaluated at the
      snapping level ``threshold``.

    ``fixed`` marks coordinates that are zero in every feasible point; they
    carry no condition.
    """
    a, b = np.asarray(dp.a_eq), np.asarray(dp.b_eq)
    w = np.asarray(w, dtype=float)
    fixed = np.zeros(w.shape, dtype=bool) if fixed is None else np.asarray(fixed, dtype=bool)
    idx = np.flatnonzero(w > 0)
    feas = float(np.max(np.abs(a @ w - b))) if b.size else 0.0
    neg = max(0.0, -float(np.min(w))) if w.size else 0.0
    a_s = a[:, idx]
    g = dual_gradient_partial(dp, w, idx)
    nu, *_ = np.linalg.lstsq(a_s.T, g, rcond=None)
    stat = float(np.max(np.abs(a_s.T @ nu - g))) if idx.size else 0.0

    lam = np.concatenate([[np.exp(-1.0)], dp.block_sums(w)])
    logc = np.log(dp.coefficients)
    level = np.log(max(threshold, np.finfo(float).tiny))
    conditions = []
    for i in range(len(dp.blocks)):
        sl = dp.block_slice(i)
        cols = np.arange(sl.start, sl.stop)
        zero = cols[(w[cols] <= 0) & ~fixed[cols]]
        if zero.size == 0:
            continue
        if i > 0 and lam[i] == 0.0:
            conditions.append((logc[zero], -a[:, zero].T))
        else:
            for k in zero:
                conditions.append((np.array([logc[k] + np.log(lam[i]) - level]), -a[:, [k]].T))
    bound = 0.0
    if conditions:
        basis, _ = null_space(a_s.T)
        nu_b, worst = nearest_feasible(conditions, nu, basis)
        bound = max(0.0, worst)
        nu = nu_b
    residual = max(feas, neg, stat, bound)
    return _Kkt(residual, feas, stat, bound, nu)


def _reactivate(dp: DualProgram, w: NDArray, nu: NDArray, fixed: NDArray) -> NDArray | None:
    """Give zero weights in positive blocks their stationary value ``c lam exp(-a . nu)``.

    Values that land below the snapping threshold are zeroed again by the
    following polish. Returns None when no weight qualifies.
    """
    lam = np.concatenate([[np.exp(-1.0)], dp.block_sums(w)])
    blk = dp.block_of
    zero = (w <= 0) & ~fixed & (lam[blk] > 0)
    if not np.any(zero):
        return None
    target = dp.coefficients * lam[blk] * np.exp(-(dp.a_eq.T @ nu))
    if np.any(blk[zero] == 0):
        # objective block: the constant -1 of its gradient shifts the stationary value
        target = np.where(blk == 0, dp.coefficients * np.exp(-1.0 - dp.a_eq.T @ nu), target)
    up = zero & (target > 0) & np.isfinite(target)
    if not np.any(up):
        return None
    out = w.copy()
    out[up] = target[up]
    return out


def maximize_dual(dp: DualProgram, opts: SolverOptions | None = None) -> DualSolution:
    """Optimal dual weights.

    Raises :class:`InfeasibleDualError` when no nonnegative weights satisfy
    normality and orthogonality, and :class:`NonConvergedError` when the
    iteration budget runs out or the KKT residual stays above ``opts.tol``.
    """
    opts = opts or SolverOptions()
    direct = solve_zero_dod(dp)
    if direct is not None:
        return direct

    p1 = find_feasible_weights(dp)
    if not p1.feasible:
        raise InfeasibleDualError(
            f"no nonnegative weights satisfy normality and orthogonality "
            f"(phase 1 residual {p1.residual:.3g})")
    run = _Run(dp, opts)
    free = np.flatnonzero(p1.support)
    w = p1.w.copy()
    run.history.append(dual_log_objective(dp, w))
    if run.iterates is not None:
        run.iterates.append(w.copy())
    w = run.barrier(w, free)

    lam = dp.block_sums(w)
    scale = max(1.0, float(np.max(lam))) if lam.size else 1.0
    collapsed = tuple(i for i in range(1, len(dp.blocks))
                      if lam[i - 1] <= COLLAPSED_BLOCK_RTOL * scale)
    attempts = [collapsed, ()] if collapsed else [()]
    fixed = ~p1.support

    # each attempt continues the interior path; only the chosen one is reported
    interior = run.checkpoint()
    best = None
    for zero_blocks in attempts:
        run.restore(interior)
        cand = w.copy()
        cand[_block_idx(dp, zero_blocks)] = 0.0
        cand = run.polish_active_set(cand, free)
        if cand is None:
            continue
        kkt = kkt_residual(dp, cand, opts.zero_weight_threshold, fixed)
        log.debug("crossover zero_blocks=%s kkt=%.3g", zero_blocks, kkt.residual)
        if best is None or kkt.residual < best[1].residual:
            best = (cand, kkt, run.checkpoint())
        if kkt.residual <= opts.tol:
            break
    if best is None:
        raise NonConvergedError("barrier iterate could not be restored to feasibility",
                                best=w)
    for _ in range(3):
        if best[1].residual <= opts.tol:
            break
        # a weight snapped to zero whose optimum lies just above the threshold
        run.restore(best[2])
        cand = _reactivate(dp, best[0], best[1].multipliers, fixed)
        cand = run.polish_active_set(cand, free) if cand is not None else None
        if cand is None:
            break
        kkt = kkt_residual(dp, cand, opts.zero_weight_threshold, fixed)
        log.debug("reactivation kkt=%.3g", kkt.residual)
        if kkt.residual >= best[1].residual:
            break
        best = (cand, kkt, run.checkpoint())
    w, kkt, path = best
    run.restore(path)
    zero_blocks = tuple(i for i in range(1, len(dp.blocks))
                        if not np.any(w[dp.block_slice(i)] > 0))
    sol = _solution(dp, w, kkt.residual, run.iterations, kkt.residual <= opts.tol,
                    "barrier", multipliers=kkt.multipliers, zero_blocks=zero_blocks,
                    history=run.history, roundings=run.roundings,
                    iterates=tuple(run.iterates) if run.iterates is not None else None)
    if not sol.converged:
        raise NonConvergedError(
            f"KKT residual {sol.kkt_residual:.3g} exceeds tolerance {opts.tol:g}", best=sol)
    return sol
