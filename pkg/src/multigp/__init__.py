"""Geometric programs with imprecise {low, mid, high} parameters, solved through the dual."""

__version__ = "0.1.0"

from .dual import DualProgram, build_dual, dual_gradient, dual_log_objective, dual_value
from .errors import (CapExceededError, DegenerateWeightsError, GpDomainError, GpError,
                     InfeasibleDualError, NonConvergedError, ParseError,
                     PrimalInfeasibleError, UnboundedBelowError)
from .io import load_document, parse_problem, serialize_problem
from .model import (ConcreteGp, ConcretePosynomial, ConstraintSpec, MultiGpProblem,
                    Posynomial, Term, Triplet, evaluate_posynomial, validate_problem)
from .oracle import oracle_solve, generate_random_gp, random_instance, sweep_scenarios
from .pipeline import RunReport, ScenarioResult, solve_problem, solve_scenario
from .recovery import Certificate, PrimalSolution, Verdict, certify, recover_primal
from .report import render_report
from .scenario import (Scenario, StandardGp, instantiate, normalize, parameter_space,
                       standard_form)
from .solver import DualSolution, SolverOptions, find_feasible_weights, maximize_dual
