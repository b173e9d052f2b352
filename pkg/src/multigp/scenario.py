"""Scenario instantiation, normalization to standard form, and the parameter space."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from numpy.typing import NDArray

from .model import (ConcreteGp, ConcretePosynomial, MultiGpProblem, Posynomial, Triplet,
                    validate_problem)


class Scenario(enum.IntEnum):
    LOW = 0
    MID = 1
    HIGH = 2

    @property
    def label(self) -> str:
        return "LMU"[self.value]

    @classmethod
    def parse(cls, text: str) -> "Scenario":
        key = text.strip().upper()
        aliases = {"L": cls.LOW, "LOW": cls.LOW, "M": cls.MID, "MID": cls.MID,
                   "U": cls.HIGH, "H": cls.HIGH, "HIGH": cls.HIGH, "UPPER": cls.HIGH}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown scenario {text!r}; use L, M or U") from None


@dataclass(frozen=True, eq=False)
class StandardGp:
    """A concrete program with every constraint in ``sum_t d_t prod x^a <= 1`` form.

    ``blocks[0]`` is the objective, ``blocks[i]`` (i >= 1) is constraint i
    with its coefficients already divided by the original right-hand side.
    """

    variables: tuple[str, ...]
    blocks: tuple[ConcretePosynomial, ...]
    source: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if not self.blocks:
            raise ValueError("a standard GP needs an objective block")
        n = len(self.variables)
        for k, blk in enumerate(self.blocks):
            if blk.exponents.shape[1] != n:
                raise ValueError(f"block {k} has {blk.exponents.shape[1]} exponent columns, expected {n}")
            if blk.n_terms == 0:
                raise ValueError(f"block {k} has no terms")
            if not np.all(blk.coefficients > 0):
                raise ValueError(f"block {k} has a nonpositive coefficient")

    @property
    def objective(self) -> ConcretePosynomial:
        return self.blocks[0]

    @property
    def constraints(self) -> tuple[ConcretePosynomial, ...]:
        return self.blocks[1:]

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def m(self) -> int:
        return len(self.blocks) - 1

    @property
    def term_counts(self) -> tuple[int, ...]:
        return tuple(b.n_terms for b in self.blocks)

    def as_concrete(self) -> ConcreteGp:
        return ConcreteGp(self.variables, self.objective, self.constraints,
                          np.ones(self.m), scenario=self.source)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StandardGp):
            return NotImplemented
        return self.variables == other.variables and self.blocks == other.blocks


@dataclass(frozen=True)
class Site:
    """Location of one imprecise parameter.

    ``block`` is 0 for the objective and i for constraint i; ``term`` is the
    0-based term index (None for a right-hand side); ``variable`` is set for
    exponents only.
    """

    kind: str  # "coefficient" | "exponent" | "rhs"
    block: int
    term: int | None = None
    variable: str | None = None

    def describe(self) -> str:
        where = "objective" if self.block == 0 else f"constraint {self.block}"
        if self.kind == "rhs":
            return f"{where} rhs"
        if self.kind == "coefficient":
            return f"{where} term {self.term + 1} coefficient"
        return f"{where} term {self.term + 1} exponent of {self.variable}"


@dataclass(frozen=True)
class ParameterSpace:
    sites: tuple[Site, ...]
    triplets: tuple[Triplet, ...]

    @property
    def k(self) -> int:
        return len(self.sites)

    @property
    def size(self) -> int:
        return 3 ** self.k

    def combinations(self) -> Iterator[tuple[int, ...]]:
        """All choice vectors in lexicographic order (0 = low, 1 = mid, 2 = high)."""
        return itertools.product(range(3), repeat=self.k)


def _iter_sites(p: MultiGpProblem) -> Iterator[tuple[Site, Triplet]]:
    for b, (_, posy) in enumerate(p.posynomials()):
        for t, term in enumerate(posy.terms):
            yield Site("coefficient", b, t), term.coefficient
            for var in p.variables:
                if var in term.exponents:
                    yield Site("exponent", b, t, var), term.exponents[var]
        if b > 0:
            yield Site("rhs", b), p.constraints[b - 1].rhs


def parameter_space(p: MultiGpProblem) -> ParameterSpace:
    """The imprecise (non-degenerate) parameter sites of ``p``."""
    pairs = [(s, t) for s, t in _iter_sites(p) if not t.degenerate]
    return ParameterSpace(tuple(s for s, _ in pairs), tuple(t for _, t in pairs))


def _require_valid(p: MultiGpProblem) -> None:
    report = validate_problem(p)
    if not report.ok:
        raise ValueError("invalid problem: " + "; ".join(report.errors))


def _concrete(posy: Posynomial, variables: Sequence[str], pick) -> ConcretePosynomial:
    coef = np.array([pick(term.coefficient) for term in posy.terms], dtype=float)
    exps = np.array([[pick(term.exponent(v)) for v in variables] for term in posy.terms],
                    dtype=float).reshape(len(posy.terms), len(variables))
    return ConcretePosynomial(coef, exps)


def _build(p: MultiGpProblem, pick, label: str | None) -> ConcreteGp:
    objective = _concrete(p.objective, p.variables, pick)
    constraints = tuple(_concrete(c.body, p.variables, pick) for c in p.constraints)
    rhs = np.array([pick(c.rhs) for c in p.constraints], dtype=float)
    return ConcreteGp(p.variables, objective, constraints, rhs, scenario=label)


def instantiate(p: MultiGpProblem, s: Scenario) -> ConcreteGp:
    """Select component ``s`` of every triplet (coefficients, exponents and rhs alike)."""
    _require_valid(p)
    s = Scenario(s)
    return _build(p, lambda t: t.component(s), s.label)


def instantiate_choice(p: MultiGpProblem, space: ParameterSpace,
                       choice: Sequence[int]) -> ConcreteGp:
    """Concrete program for one point of the parameter space.

    ``choice[k]`` picks the component for ``space.sites[k]``; degenerate
    triplets have a single value anyway.
    """
    if len(choice) != space.k:
        raise ValueError(f"choice has {len(choice)} entries, parameter space has {space.k}")
    _require_valid(p)
    chosen = dict(zip(space.sites, choice))
    lookup = {site: trip.component(chosen.get(site, 1)) for site, trip in _iter_sites(p)}

    def posy(b: int, body: Posynomial) -> ConcretePosynomial:
        coef = np.array([lookup[Site("coefficient", b, t)] for t in range(len(body.terms))])
        exps = np.zeros((len(body.terms), p.n))
        for t, term in enumerate(body.terms):
            for j, v in enumerate(p.variables):
                if v in term.exponents:
                    exps[t, j] = lookup[Site("exponent", b, t, v)]
        return ConcretePosynomial(coef, exps)

    objective = posy(0, p.objective)
    constraints = tuple(posy(i + 1, c.body) for i, c in enumerate(p.constraints))
    rhs = np.array([lookup[Site("rhs", i + 1)] for i in range(p.m)], dtype=float)
    return ConcreteGp(p.variables, objective, constraints, rhs, scenario=None)


def normalize(c: ConcreteGp) -> StandardGp:
    """Divide each constraint's coefficients by its right-hand side."""
    if np.any(c.rhs <= 0):
        raise ValueError("right-hand sides must be positive")
    blocks = [c.objective]
    blocks += [ConcretePosynomial(g.coefficients / b, g.exponents)
               for g, b in zip(c.constraints, c.rhs)]
    return StandardGp(c.variables, tuple(blocks), source=c.scenario)


def standard_form(p: MultiGpProblem, s: Scenario) -> StandardGp:
    return normalize(instantiate(p, s))


def scenario_values(p: MultiGpProblem) -> dict[Scenario, NDArray[np.float64]]:
    """Flattened triplet components per scenario, in site order (handy for checks)."""
    trips = [t for _, t in _iter_sites(p)]
    return {s: np.array([t.component(s) for t in trips]) for s in Scenario}
