import numpy as np
import pytest
from hypothesis import given

from multigp import (CapExceededError, MultiGpProblem, Posynomial, PrimalInfeasibleError,
                     Scenario, Term, UnboundedBelowError, build_dual, certify, maximize_dual,
                     oracle_solve, random_instance, recover_primal, sweep_scenarios)
from multigp.dual import degrees_of_difficulty
from multigp.model import ConstraintSpec, Triplet, evaluate_posynomial
from multigp.oracle import generate_random_gp
from multigp.scenario import standard_form

from helpers import generated_instances, standard


class TestOracleSolve:
    def test_example1_low(self, example1):
        ps = oracle_solve(standard_form(example1, Scenario.LOW))
        assert ps.objective_value == pytest.approx(125.9045, rel=1e-3)

    def test_x_plus_inverse(self):
        ps = oracle_solve(standard([1, 1], [[1], [-1]]))
        assert ps.x[0] == pytest.approx(1.0, abs=1e-6)
        assert ps.objective_value == pytest.approx(2.0, rel=1e-10)

    def test_unbounded(self):
        with pytest.raises(UnboundedBelowError) as info:
            oracle_solve(standard([1], [[1]]))
        assert info.value.ray is not None

    @pytest.mark.parametrize("cons", [
        [([2.0], [[0.0]])],
        [([2.0], [[1.0]]), ([2.0], [[-1.0]])],
    ])
    def test_infeasible(self, cons):
        with pytest.raises(PrimalInfeasibleError):
            oracle_solve(standard([1, 1], [[1], [-1]], cons))

    def test_constrained_closed_form(self):
        # min 1/x subject to x / 4 <= 1 has x = 4
        ps = oracle_solve(standard([1], [[-1]], [([0.25], [[1.0]])]))
        assert ps.x[0] == pytest.approx(4.0, rel=1e-8)


class TestGenerator:
    def test_deterministic(self):
        a = generate_random_gp(3, 2, 2, seed=7)
        b = generate_random_gp(3, 2, 2, seed=7)
        assert a == b
        assert a != generate_random_gp(3, 2, 2, seed=8)

    def test_interior_point(self):
        inst = random_instance(4, 3, 3, seed=11)
        for c in inst.gp.constraints:
            assert evaluate_posynomial(c, inst.x0) == pytest.approx(0.5, rel=1e-12)

    def test_degrees_of_difficulty(self):
        assert degrees_of_difficulty(generate_random_gp(3, 2, 2, seed=3)) == 2

    def test_ranges(self):
        g = generate_random_gp(4, 2, 4, seed=5)
        assert np.all((g.objective.coefficients >= 0.1) & (g.objective.coefficients <= 10))
        for b in g.blocks:
            assert np.all(b.exponents == np.round(b.exponents))
            assert np.all(np.abs(b.exponents) <= 3)
            assert np.all(np.any(b.exponents != 0, axis=1))

    def test_bad_shape(self):
        with pytest.raises(ValueError):
            random_instance(0, 1, 2, seed=0)


@given(generated_instances())
def test_oracle_agreement(inst):
    g = inst.gp
    ds = maximize_dual(build_dual(g))
    cert = certify(g, ds, recover_primal(g, ds))
    po = oracle_solve(g)
    if cert.certified:
        assert abs(ds.dual_value - po.objective_value) / ds.dual_value <= 1e-5


class TestSweep:
    def test_example1(self, example1):
        rep = sweep_scenarios(example1)
        assert rep.k == 5 and rep.combos == 243 and len(rep.values) == 243
        assert not rep.failures
        assert rep.all_low == pytest.approx(125.9045, rel=1e-3)
        assert rep.all_high == pytest.approx(296.2627, rel=1e-3)
        assert rep.min_value <= rep.all_mid <= rep.max_value
        assert rep.values[0] == rep.all_low and rep.values[-1] == rep.all_high
        assert rep.low_attains_min == (abs(rep.all_low - rep.min_value) <= 1e-6 * rep.min_value)
        assert "combinations = 243" in rep.summary()

    def test_example2_label_inversion(self, example2):
        rep = sweep_scenarios(example2)
        assert rep.k == 8 and rep.combos == 6561
        assert rep.all_high == pytest.approx(23.22874, rel=1e-3)
        assert rep.all_low == pytest.approx(47.47193, rel=1e-3)
        assert rep.all_high < rep.all_low
        assert rep.min_value <= rep.all_mid <= rep.max_value

    def test_degenerate(self):
        p = MultiGpProblem(("x",), Posynomial((Term.make(2, {"x": 1}), Term.make(8, {"x": -1}))))
        rep = sweep_scenarios(p)
        assert rep.k == 0 and rep.combos == 1
        assert rep.values[0] == pytest.approx(8.0)
        assert rep.low_attains_min and rep.high_attains_max

    def test_cap(self):
        terms = tuple(Term.make([1, 2, 3], {"x": [1, 1.5, 2]}) for _ in range(7))
        p = MultiGpProblem(("x",), Posynomial(terms + (Term.make(1, {"x": -1}),)))
        with pytest.raises(CapExceededError):
            sweep_scenarios(p)

    def test_failures_recorded(self):
        # the objective coefficient choice does not matter; the exponent (1, 0, -1) makes
        # the high combination a single decreasing monomial with an infeasible dual
        p = MultiGpProblem(("x",), Posynomial((Term.make(1, {"x": [1, 0, -1]}),
                                               Term.make(1, {"x": 1}))),
                           (ConstraintSpec(Posynomial((Term.make(1, {"x": -1}),)),
                                           Triplet.of(1)),))
        rep = sweep_scenarios(p)
        assert rep.combos == 3
        assert rep.values[2] is not None and rep.values[0] is not None

    def test_workers_same_result(self, example1):
        assert sweep_scenarios(example1, workers=2).values == sweep_scenarios(example1).values
