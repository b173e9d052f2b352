"""Posynomials with imprecise ({low, mid, high}) parameters.

A :class:`MultiGpProblem` is the user-facing description: named variables,
an objective posynomial and ``posynomial <= rhs`` constraints, where every
coefficient, exponent and right-hand side is a :class:`Triplet`. Selecting a
single component everywhere yields a :class:`ConcreteGp`, which is plain
numeric data (coefficient vectors and dense exponent matrices).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import GpDomainError

MIDPOINT_RTOL = 1e-9


@dataclass(frozen=True)
class Triplet:
    """An imprecise scalar given by three values.

    Construction does not enforce ``low <= mid <= high``; that is reported
    by :func:`validate_problem` so that every violation in a document can be
    listed at once. Exponent triplets may also run high-to-low (the scenario
    still picks the first, middle or last entry); coefficients and right-hand
    sides must be nondecreasing.
    """

    low: float
    mid: float
    high: float

    @classmethod
    def of(cls, value: "TripletLike") -> "Triplet":
        """Promote a scalar or a 3-sequence to a Triplet."""
        if isinstance(value, Triplet):
            return value
        if isinstance(value, (int, float, np.integer, np.floating)):
            v = float(value)
            return cls(v, v, v)
        items = list(value)
        if len(items) != 3:
            raise ValueError(f"a triplet needs exactly 3 values, got {len(items)}")
        return cls(*(float(v) for v in items))

    @property
    def degenerate(self) -> bool:
        return self.low == self.mid == self.high

    @property
    def ordered(self) -> bool:
        return self.low <= self.mid <= self.high

    def component(self, index: int) -> float:
        """Return low (0), mid (1) or high (2)."""
        return (self.low, self.mid, self.high)[int(index)]

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.low, self.mid, self.high)

    def midpoint_gap(self) -> float:
        return abs(self.mid - 0.5 * (self.low + self.high))


TripletLike = Union[Triplet, float, int, Sequence[float]]


@dataclass(frozen=True)
class Term:
    """One monomial ``coefficient * prod_j x_j ** exponents[j]``.

    Variables missing from ``exponents`` have exponent 0.
    """

    coefficient: Triplet
    exponents: Mapping[str, Triplet] = field(default_factory=dict)

    @classmethod
    def make(cls, coefficient: TripletLike,
             exponents: Mapping[str, TripletLike] | None = None) -> "Term":
        exps = {k: Triplet.of(v) for k, v in (exponents or {}).items()}
        return cls(Triplet.of(coefficient), exps)

    def exponent(self, name: str) -> Triplet:
        return self.exponents.get(name, _ZERO)


_ZERO = Triplet(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Posynomial:
    terms: tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class ConstraintSpec:
    """``body <= rhs``."""

    body: Posynomial
    rhs: Triplet = Triplet(1.0, 1.0, 1.0)


@dataclass(frozen=True)
class MultiGpProblem:
    variables: tuple[str, ...]
    objective: Posynomial
    constraints: tuple[ConstraintSpec, ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def m(self) -> int:
        return len(self.constraints)

    def posynomials(self) -> list[tuple[str, Posynomial]]:
        """Objective followed by constraint bodies, with display labels."""
        out = [("objective", self.objective)]
        out += [(f"constraint {i + 1}", c.body) for i, c in enumerate(self.constraints)]
        return out


@dataclass(frozen=True, eq=False)
class ConcretePosynomial:
    """Numeric posynomial: ``sum_t coefficients[t] * prod_j x_j ** exponents[t, j]``."""

    coefficients: NDArray[np.float64]
    exponents: NDArray[np.float64]

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=float).reshape(-1)
        a = np.array(self.exponents, dtype=float)
        if a.ndim != 2 or a.shape[0] != c.shape[0]:
            raise ValueError(f"exponent matrix shape {a.shape} does not match {c.shape[0]} terms")
        c.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "exponents", a)

    @property
    def n_terms(self) -> int:
        return self.coefficients.shape[0]

    def scaled(self, factor: float) -> "ConcretePosynomial":
        return ConcretePosynomial(self.coefficients * factor, self.exponents)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConcretePosynomial):
            return NotImplemented
        return (np.array_equal(self.coefficients, other.coefficients)
                and np.array_equal(self.exponents, other.exponents))


@dataclass(frozen=True, eq=False)
class ConcreteGp:
    """One scenario of a problem: all parameters scalar, constraints ``g_i(x) <= rhs[i]``."""

    variables: tuple[str, ...]
    objective: ConcretePosynomial
    constraints: tuple[ConcretePosynomial, ...] = ()
    rhs: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))
    scenario: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        b = np.array(self.rhs, dtype=float).reshape(-1)
        if b.shape[0] != len(self.constraints):
            raise ValueError("one rhs value is needed per constraint")
        b.setflags(write=False)
        object.__setattr__(self, "rhs", b)

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def m(self) -> int:
        return len(self.constraints)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConcreteGp):
            return NotImplemented
        return (self.variables == other.variables and self.objective == other.objective
                and self.constraints == other.constraints
                and np.array_equal(self.rhs, other.rhs))


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self) -> bool:
        return self.ok


def _check_triplet(t: Triplet, where: str, report: ValidationReport,
                   positive: bool = False, allow_decreasing: bool = False) -> None:
    vals = t.as_tuple()
    if not all(math.isfinite(v) for v in vals):
        report.errors.append(f"{where}: values must be finite, got {list(vals)}")
        return
    if not t.ordered:
        if allow_decreasing and t.low >= t.mid >= t.high:
            report.warnings.append(f"{where}: exponent triplet is decreasing {list(vals)}")
        else:
            report.errors.append(
                f"{where}: triplet must satisfy low <= mid <= high, got {list(vals)}")
    if positive and t.low <= 0:
        report.errors.append(f"{where}: must be positive, got {list(vals)}")
    if t.midpoint_gap() > MIDPOINT_RTOL * max(1.0, t.high - t.low):
        report.warnings.append(
            f"{where}: mid {t.mid:g} is not the average of low {t.low:g} and high {t.high:g}")


def validate_problem(p: MultiGpProblem) -> ValidationReport:
    """Collect every structural violation of ``p``.

    Errors make the problem unusable; warnings flag triplets whose middle
    value is not the average of the outer two (legal, but unusual).
    """
    report = ValidationReport()
    if len(p.variables) == 0:
        report.errors.append("variables: at least one variable is required")
    seen: set[str] = set()
    for name in p.variables:
        if name in seen:
            report.errors.append(f"variables: duplicate name {name!r}")
        seen.add(name)
    known = set(p.variables)

    for label, posy in p.posynomials():
        if len(posy.terms) == 0:
            report.errors.append(f"{label}: a posynomial needs at least one term")
        for t, term in enumerate(posy.terms):
            where = f"{label} term {t + 1}"
            _check_triplet(term.coefficient, f"{where} coefficient", report, positive=True)
            for var, exp in term.exponents.items():
                if var not in known:
                    report.errors.append(f"{where}: unknown variable {var!r}")
                _check_triplet(exp, f"{where} exponent of {var}", report,
                               allow_decreasing=True)
    for i, con in enumerate(p.constraints):
        _check_triplet(con.rhs, f"constraint {i + 1} rhs", report, positive=True)
    return report


def _log_x(x: ArrayLike, n: int) -> NDArray[np.float64]:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != n:
        raise GpDomainError(f"expected {n} variables, got {x.shape[0]}")
    if not np.all(x > 0) or not np.all(np.isfinite(x)):
        raise GpDomainError("posynomials are only defined for x > 0")
    return np.log(x)


def evaluate_posynomial(g: ConcretePosynomial, x: ArrayLike) -> float:
    """``sum_t c_t prod_j x_j ** a_tj`` for strictly positive ``x``."""
    y = _log_x(x, g.exponents.shape[1])
    return float(np.sum(g.coefficients * np.exp(g.exponents @ y)))


def constraint_residuals(p: ConcreteGp, x: ArrayLike) -> NDArray[np.float64]:
    """``g_i(x) / b_i - 1`` per constraint; nonpositive entries are satisfied."""
    _log_x(x, p.n)
    return np.array([evaluate_posynomial(g, x) / b - 1.0
                     for g, b in zip(p.constraints, p.rhs)], dtype=float)


def term_values(g: ConcretePosynomial, x: ArrayLike) -> NDArray[np.float64]:
    y = _log_x(x, g.exponents.shape[1])
    return g.coefficients * np.exp(g.exponents @ y)


def concrete_posynomial(coefficients: Iterable[float],
                        exponents: ArrayLike) -> ConcretePosynomial:
    return ConcretePosynomial(np.asarray(list(coefficients), float), np.asarray(exponents, float))
