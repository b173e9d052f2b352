"""Shared builders and hypothesis strategies."""

import numpy as np
from hypothesis import strategies as st

from multigp import MultiGpProblem, Posynomial, StandardGp, Term, random_instance
from multigp.model import ConcretePosynomial

PROBLEMS_DIR = "problems"


def x_plus_inverse(c1: float = 1.0, c2: float = 1.0) -> MultiGpProblem:
    """min c1 x + c2 / x."""
    return MultiGpProblem(("x",), Posynomial((Term.make(c1, {"x": 1}), Term.make(c2, {"x": -1}))))


def standard(coefs, exps, constraints=(), variables=None) -> StandardGp:
    """StandardGp from an objective (coefs, exponent rows) and constraint blocks."""
    exps = np.asarray(exps, dtype=float)
    variables = variables or tuple(f"x{j + 1}" for j in range(exps.shape[1]))
    blocks = [ConcretePosynomial(coefs, exps)]
    blocks += [ConcretePosynomial(c, e) for c, e in constraints]
    return StandardGp(tuple(variables), tuple(blocks), "test")


@st.composite
def concrete_posynomials(draw, n=None):
    n = n or draw(st.integers(1, 4))
    t = draw(st.integers(1, 4))
    coefs = draw(st.lists(st.floats(1e-2, 1e2), min_size=t, max_size=t))
    exps = draw(st.lists(st.lists(st.floats(-3, 3), min_size=n, max_size=n),
                         min_size=t, max_size=t))
    return ConcretePosynomial(coefs, exps)


def positive_vectors(n, lo=1e-2, hi=1e2):
    return st.lists(st.floats(lo, hi), min_size=n, max_size=n).map(np.array)


@st.composite
def generated_instances(draw, canonical=True):
    """Random well-posed instances whose shape always admits generation."""
    n = draw(st.integers(1, 4))
    m = draw(st.integers(0, 3))
    t_min = -(-(n + 2) // (m + 1))
    t = draw(st.integers(max(2, t_min), max(4, t_min)))
    seed = draw(st.integers(0, 2**31 - 1))
    return random_instance(n, m, t, seed, require_canonical_dual=canonical)


def random_feasible_weights(dp, rng, interior):
    """A random point of {w >= 0, A w = b}: ``interior`` moved along the null space."""
    from multigp._logspace import null_space

    basis, _ = null_space(dp.a_eq)
    if basis.shape[1] == 0:
        return interior.copy()
    d = basis @ rng.normal(size=basis.shape[1])
    neg = d < 0
    t_max = np.min(-interior[neg] / d[neg]) if np.any(neg) else 1.0
    w = interior + rng.uniform(0.0, 0.999) * t_max * d
    return np.maximum(w, 0.0)
