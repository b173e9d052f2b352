"""The dual of a standard-form posynomial program.

For weights ``w`` (one per primal term, grouped in blocks: objective first,
then one block per constraint) the dual objective in log form is

    v(w) = sum_t w_0t ln(c_0t / w_0t)
         + sum_{i>=1} [ sum_t w_it ln(d_it / w_it) + lam_i ln lam_i ],
    lam_i = sum_t w_it,

to be maximized over ``w >= 0`` subject to normality (objective weights sum
to one) and orthogonality (``sum_k a_kj w_k = 0`` for every variable j).
``v`` is concave and continuous on the closed orthant with 0 ln 0 = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import xlogy

from .errors import GpDomainError
from .scenario import StandardGp


@dataclass(frozen=True, eq=False)
class DualProgram:
    blocks: tuple[int, ...]
    coefficients: NDArray[np.float64]
    exponents: NDArray[np.float64]
    a_eq: NDArray[np.float64]
    b_eq: NDArray[np.float64]
    block_of: NDArray[np.int64]
    variables: tuple[str, ...] = ()

    @property
    def n_weights(self) -> int:
        return int(self.coefficients.shape[0])

    @property
    def n_variables(self) -> int:
        return int(self.exponents.shape[1])

    @property
    def m(self) -> int:
        return len(self.blocks) - 1

    @property
    def degrees_of_difficulty(self) -> int:
        return self.n_weights - (self.n_variables + 1)

    def block_slice(self, i: int) -> slice:
        start = sum(self.blocks[:i])
        return slice(start, start + self.blocks[i])

    def block_sums(self, w: ArrayLike) -> NDArray[np.float64]:
        """``lam_i`` for i = 1..m."""
        w = np.asarray(w, dtype=float)
        return np.bincount(self.block_of, weights=w, minlength=len(self.blocks))[1:]

    def weight_labels(self) -> list[str]:
        labels = []
        for i, count in enumerate(self.blocks):
            labels += [f"w{i}{t + 1}" if count < 10 else f"w{i}.{t + 1}" for t in range(count)]
        return labels


def _frozen(a: ArrayLike, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


def build_dual(g: StandardGp) -> DualProgram:
    """Assemble dual coefficients, exponent matrix and the normality/orthogonality system."""
    blocks = g.term_counts
    coef = np.concatenate([b.coefficients for b in g.blocks])
    exps = np.vstack([b.exponents for b in g.blocks])
    block_of = np.repeat(np.arange(len(blocks)), blocks)
    n_w = coef.shape[0]
    normality = (block_of == 0).astype(float)
    a_eq = np.vstack([normality[None, :], exps.T])
    b_eq = np.zeros(1 + g.n)
    b_eq[0] = 1.0
    return DualProgram(blocks=tuple(int(b) for b in blocks), coefficients=_frozen(coef),
                       exponents=_frozen(exps), a_eq=_frozen(a_eq), b_eq=_frozen(b_eq),
                       block_of=_frozen(block_of, np.int64), variables=g.variables)


def _as_weights(dp: DualProgram, w: ArrayLike, strict: bool = False) -> NDArray[np.float64]:
    w = np.asarray(w, dtype=float).reshape(-1)
    if w.shape[0] != dp.n_weights:
        raise GpDomainError(f"expected {dp.n_weights} weights, got {w.shape[0]}")
    if strict and not np.all(w > 0):
        raise GpDomainError("the dual gradient needs strictly positive weights")
    if not np.all(w >= 0):
        raise GpDomainError("dual weights must be nonnegative")
    return w


def dual_log_objective(dp: DualProgram, w: ArrayLike) -> float:
    """Log of the dual objective, finite on the whole nonnegative orthant."""
    w = _as_weights(dp, w)
    lam = dp.block_sums(w)
    return float(np.sum(xlogy(w, dp.coefficients) - xlogy(w, w)) + np.sum(xlogy(lam, lam)))


def dual_value(dp: DualProgram, w: ArrayLike) -> float:
    """The dual objective itself (product form)."""
    return float(np.exp(dual_log_objective(dp, w)))


def dual_gradient(dp: DualProgram, w: ArrayLike) -> NDArray[np.float64]:
    w = _as_weights(dp, w, strict=True)
    lam = np.concatenate([[np.exp(-1.0)], dp.block_sums(w)])
    # objective block: ln c - ln w - 1, constraint block i: ln d - ln w + ln lam_i
    return np.log(dp.coefficients) - np.log(w) + np.log(lam[dp.block_of])


def dual_hessian(dp: DualProgram, w: ArrayLike) -> NDArray[np.float64]:
    """Dense Hessian: ``-diag(1/w)`` plus ``ones/lam_i`` on each constraint block."""
    w = _as_weights(dp, w, strict=True)
    h = np.diag(-1.0 / w)
    lam = dp.block_sums(w)
    for i in range(1, len(dp.blocks)):
        sl = dp.block_slice(i)
        h[sl, sl] += 1.0 / lam[i - 1]
    return h


def degrees_of_difficulty(g: StandardGp) -> int:
    """Total terms minus (variables + 1); negative means an over-determined dual."""
    return sum(g.term_counts) - (g.n + 1)
