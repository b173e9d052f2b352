"""Log-sum-exp helpers shared by the solver, recovery and oracle."""

from __future__ import annotations

from typing import Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import minimize
from scipy.special import logsumexp, softmax

LogPosy = tuple[NDArray[np.float64], NDArray[np.float64]]  # (ln coefficients, exponents)


def lse(block: LogPosy, y: NDArray[np.float64]) -> float:
    """``ln sum_t exp(a_t . y + ln c_t)``."""
    logc, a = block
    return float(logsumexp(a @ y + logc))


def lse_derivatives(block: LogPosy, y: NDArray[np.float64]):
    """Value, gradient and Hessian of :func:`lse` at ``y``."""
    logc, a = block
    z = a @ y + logc
    p = softmax(z)
    grad = a.T @ p
    hess = (a.T * p) @ a - np.outer(grad, grad)
    return float(logsumexp(z)), grad, hess


def null_space(a: NDArray[np.float64], rtol: float = 1e-10) -> tuple[NDArray[np.float64], int]:
    """Orthonormal basis of ``{z : a z = 0}`` and the numerical rank of ``a``."""
    if a.size == 0:
        return np.eye(a.shape[1]), 0
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    rank = int(np.sum(s > rtol * max(1.0, s[0] if s.size else 0.0)))
    return vh[rank:].T.copy(), rank


def nearest_feasible(blocks: Sequence[LogPosy], y0: NDArray[np.float64],
                     basis: NDArray[np.float64]) -> tuple[NDArray[np.float64], float]:
    """Closest point to ``y0`` on ``y0 + span(basis)`` with every ``lse_i <= 0``.

    Returns the point and ``max_i lse_i`` there (``-inf`` without blocks). If
    ``y0`` is already feasible, or the family is a single point, ``y0`` is
    returned unchanged; if no feasible point exists the returned max is > 0.
    """
    y0 = np.asarray(y0, dtype=float)
    if not blocks:
        return y0, -np.inf
    value0 = max(lse(b, y0) for b in blocks)
    if value0 <= 0.0 or basis.shape[1] == 0:
        return y0, value0

    cons = []
    for blk in blocks:
        def c(z, blk=blk):
            return -lse(blk, y0 + basis @ z)

        def cj(z, blk=blk):
            _, g, _ = lse_derivatives(blk, y0 + basis @ z)
            return -(basis.T @ g)
        cons.append({"type": "ineq", "fun": c, "jac": cj})

    res = minimize(lambda z: 0.5 * z @ z, np.zeros(basis.shape[1]), jac=lambda z: z,
                   constraints=cons, method="SLSQP", options={"ftol": 1e-15, "maxiter": 500})
    y = y0 + basis @ res.x
    value = max(lse(b, y) for b in blocks)
    if value > value0:
        return y0, value0
    return y, value
