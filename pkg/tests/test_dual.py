import numpy as np
import pytest
from hypothesis import given, strategies as st

from multigp import GpDomainError, Scenario, build_dual, dual_gradient, dual_log_objective
from multigp.dual import degrees_of_difficulty, dual_hessian, dual_value
from multigp.model import evaluate_posynomial
from multigp.scenario import StandardGp, standard_form
from multigp.solver import find_feasible_weights, maximize_dual

from helpers import generated_instances, random_feasible_weights, standard

W_EX1_LOW = [0.1410885, 0.5767344, 0.2821770, 0.2178230, 0.1410885]


def x_plus_inverse_dual():
    return build_dual(standard([1, 1], [[1], [-1]]))


class TestBuild:
    def test_example1_low(self, example1):
        dp = build_dual(standard_form(example1, Scenario.LOW))
        assert dp.n_weights == 5 and dp.a_eq.shape == (4, 5)
        assert list(dp.b_eq) == [1, 0, 0, 0]
        assert list(dp.a_eq[0]) == [1, 1, 1, 0, 0]
        assert list(dp.a_eq[1]) == [-3, 1, 1, -2, 0]
        # the exponent triplet (2, 3, 4) gives +2 w01 in the second row
        assert list(dp.a_eq[2]) == [2, 1, 1, -2, -5]
        assert list(dp.a_eq[3]) == [-1, 0, 1, 0, -1]

    def test_example1_high_rows(self, example1):
        dp = build_dual(standard_form(example1, Scenario.HIGH))
        assert list(dp.a_eq[1]) == [-1, 1, 1, -2, 0]
        assert list(dp.a_eq[2]) == [4, 1, 1, -2, -3]

    def test_example2_low(self, example2):
        dp = build_dual(standard_form(example2, Scenario.LOW))
        assert dp.n_weights == 6 and dp.a_eq.shape == (5, 6)
        assert list(dp.a_eq[4]) == [-1, 0, 0, 0, -2, 1]
        assert list(dp.a_eq[1]) == [-4, -2, 3, -1, 0, 2]
        assert np.allclose(dp.coefficients, [1, 3, 2 / 3, 1 / 3, 1, 3])

    def test_x_plus_inverse(self):
        dp = x_plus_inverse_dual()
        assert dp.a_eq.tolist() == [[1, 1], [1, -1]]
        assert dp.b_eq.tolist() == [1, 0]

    def test_labels(self, example2):
        dp = build_dual(standard_form(example2, Scenario.LOW))
        assert dp.weight_labels() == ["w01", "w02", "w11", "w12", "w21", "w22"]


class TestObjective:
    def test_example1_reported_weights(self, example1):
        dp = build_dual(standard_form(example1, Scenario.LOW))
        assert dual_log_objective(dp, W_EX1_LOW) == pytest.approx(np.log(125.9045), abs=1e-3)
        assert dual_value(dp, W_EX1_LOW) == pytest.approx(125.9045, rel=1e-3)

    def test_x_plus_inverse(self):
        assert dual_log_objective(x_plus_inverse_dual(), [0.5, 0.5]) == pytest.approx(np.log(2))

    def test_zero_block_contributes_nothing(self, example2):
        dp = build_dual(standard_form(example2, Scenario.LOW))
        w = np.array([0.8, 0.2, 0.3, 0.4, 0.5, 0.6])
        w0 = w.copy()
        w0[2:4] = 0.0
        drop = w[2:4] @ np.log(dp.coefficients[2:4] / w[2:4]) + w[2:4].sum() * np.log(w[2:4].sum())
        assert dual_log_objective(dp, w0) == pytest.approx(dual_log_objective(dp, w) - drop)
        assert np.isfinite(dual_log_objective(dp, np.zeros(6)))

    def test_negative_weight(self):
        with pytest.raises(GpDomainError):
            dual_log_objective(x_plus_inverse_dual(), [1.5, -0.5])


class TestGradient:
    def test_x_plus_inverse(self):
        g = dual_gradient(x_plus_inverse_dual(), [0.5, 0.5])
        assert np.allclose(g, np.log(2) - 1)

    def test_zero_at_matching_block(self):
        # d_t = w_t / lam makes the constraint-block partial derivatives vanish
        w_con = np.array([0.2, 0.6])
        d = w_con / w_con.sum()
        dp = build_dual(standard([1, 1], [[1], [-1]], [(d, [[1], [2]])]))
        g = dual_gradient(dp, [0.5, 0.5, *w_con])
        assert np.allclose(g[2:], 0.0, atol=1e-15)

    def test_requires_positive(self):
        with pytest.raises(GpDomainError):
            dual_gradient(x_plus_inverse_dual(), [1.0, 0.0])


class TestDegreesOfDifficulty:
    def test_examples(self, example1, example2):
        assert degrees_of_difficulty(standard_form(example1, Scenario.LOW)) == 1
        assert degrees_of_difficulty(standard_form(example2, Scenario.LOW)) == 1

    def test_zero(self):
        assert degrees_of_difficulty(standard([1, 1], [[1], [-1]])) == 0

    def test_negative(self):
        assert degrees_of_difficulty(standard([1], [[1, 1]])) == -2


@given(generated_instances(canonical=False), st.integers(0, 2**32 - 1))
def test_gradient_matches_central_differences(inst, seed):
    dp = build_dual(inst.gp)
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.05, 2.0, size=dp.n_weights)
    g = dual_gradient(dp, w)
    fd = np.empty_like(w)
    for k in range(w.size):
        h = 1e-5 * w[k]
        up, dn = w.copy(), w.copy()
        up[k] += h
        dn[k] -= h
        fd[k] = (dual_log_objective(dp, up) - dual_log_objective(dp, dn)) / (2 * h)
    assert np.max(np.abs(g - fd) / np.maximum(1.0, np.abs(g))) <= 1e-6


@given(generated_instances(canonical=False), st.integers(0, 2**32 - 1))
def test_hessian_matches_gradient_differences(inst, seed):
    dp = build_dual(inst.gp)
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.05, 2.0, size=dp.n_weights)
    h = dual_hessian(dp, w)
    assert np.allclose(h, h.T)
    d = rng.normal(size=w.size)
    eps = 1e-6
    fd = (dual_gradient(dp, w + eps * d * w) - dual_gradient(dp, w - eps * d * w)) / (2 * eps)
    assert np.allclose(h @ (d * w), fd, rtol=1e-5, atol=1e-6)


@given(generated_instances(), st.integers(0, 2**32 - 1), st.floats(0.01, 0.99))
def test_concavity_on_feasible_pairs(inst, seed, alpha):
    dp = build_dual(inst.gp)
    rng = np.random.default_rng(seed)
    interior = find_feasible_weights(dp).w
    w1 = random_feasible_weights(dp, rng, interior)
    w2 = random_feasible_weights(dp, rng, interior)
    mix = alpha * w1 + (1 - alpha) * w2
    lhs = dual_log_objective(dp, mix)
    rhs = alpha * dual_log_objective(dp, w1) + (1 - alpha) * dual_log_objective(dp, w2)
    assert lhs >= rhs - 1e-12 * max(1.0, abs(rhs))


@given(generated_instances(), st.integers(0, 2**32 - 1))
def test_weak_duality(inst, seed):
    g = inst.gp
    dp = build_dual(g)
    rng = np.random.default_rng(seed)
    w = random_feasible_weights(dp, rng, find_feasible_weights(dp).w)
    # x0 has every constraint at 0.5; a small random move keeps it feasible
    x = inst.x0 * np.exp(rng.uniform(-0.05, 0.05, size=g.n))
    if any(evaluate_posynomial(c, x) > 1.0 for c in g.constraints):
        x = inst.x0
    assert dual_value(dp, w) <= evaluate_posynomial(g.objective, x) * (1 + 1e-9)


@given(generated_instances(), st.floats(1e-3, 1e3), st.integers(0, 2**32 - 1))
def test_objective_scaling_shifts_log_dual(inst, k, seed):
    g = inst.gp
    scaled = StandardGp(g.variables, (g.objective.scaled(k),) + g.constraints)
    dp, dk = build_dual(g), build_dual(scaled)
    w = random_feasible_weights(dp, np.random.default_rng(seed), find_feasible_weights(dp).w)
    w[:g.objective.n_terms] /= w[:g.objective.n_terms].sum()  # exact normality
    assert dual_log_objective(dk, w) - dual_log_objective(dp, w) == pytest.approx(np.log(k),
                                                                                  abs=1e-12)
