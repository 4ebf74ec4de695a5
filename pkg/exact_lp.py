#!/usr/bin/env python3
"""
Exact linear programming over the rationals.

A dense two-phase simplex tableau of Fractions with Bland's rule. Every
optimum comes back with a dual certificate and is re-checked (primal
feasibility, dual feasibility, equal objectives, complementary slackness)
before it is returned.
"""
from dataclasses import dataclass, field
from fractions import Fraction

from solver_errors import ImplicitGameError, InputError, InternalConsistencyError

Rational = Fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

SENSES = ("<=", ">=", "==")


@dataclass(frozen=True)
class LinearConstraint:
    coefficients: dict
    sense: str
    rhs: Fraction
    name: object = None


@dataclass(frozen=True)
class Objective:
    coefficients: dict
    sense: str = "max"


@dataclass
class LpSolution:
    """
    certificate maps constraint names to dual values y with
    sum(rhs * y) == objective at optimality (signs follow the objective sense).
    """
    status: str
    objective: Fraction = None
    primal_values: dict = field(default_factory=dict)
    certificate: dict = field(default_factory=dict)


def parse_rational(text):
    """Fraction from "p/q" or "p"; decimals are rejected."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str) or "." in text or "e" in text.lower():
        raise InputError(f"not an exact rational: {text!r}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"not an exact rational: {text!r}") from e


def format_rational(value):
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


class SimplexTableau:
    """Rows are B^-1 [A | b]; the objective row holds reduced costs z_j - c_j and the value."""

    def __init__(self, rows, rhs, basis, width):
        self.rows = [list(r) + [b] for r, b in zip(rows, rhs)]
        self.basis = list(basis)
        self.width = width
        self.objective = [Fraction(0)] * (width + 1)
        self.pivots = 0

    def set_costs(self, costs):
        """Install max-form costs and price out the current basis."""
        obj = [-c for c in costs] + [Fraction(0)]
        for row, b in zip(self.rows, self.basis):
            cb = costs[b]
            if cb:
                for j in range(self.width + 1):
                    if row[j]:
                        obj[j] += cb * row[j]
        self.objective = obj

    def pivot(self, i, j):
        row = self.rows[i]
        piv = row[j]
        if piv != 1:
            self.rows[i] = row = [v / piv for v in row]
        for k, other in enumerate(self.rows):
            if k != i and other[j]:
                f = other[j]
                self.rows[k] = [a - f * b if b else a for a, b in zip(other, row)]
        if self.objective[j]:
            f = self.objective[j]
            self.objective = [a - f * b if b else a for a, b in zip(self.objective, row)]
        self.basis[i] = j
        self.pivots += 1

    def bland_step(self, allowed):
        entering = next((j for j in allowed if self.objective[j] < 0), None)
        if entering is None:
            return OPTIMAL
        candidates = [(row[-1] / row[entering], self.basis[i], i)
                      for i, row in enumerate(self.rows) if row[entering] > 0]
        if not candidates:
            return UNBOUNDED
        _, _, leaving = min(candidates)
        self.pivot(leaving, entering)
        return "go_on"

    def run(self, allowed):
        while True:
            state = self.bland_step(allowed)
            if state != "go_on":
                return state

    def value_of(self, column):
        for row, b in zip(self.rows, self.basis):
            if b == column:
                return row[-1]
        return Fraction(0)


def _variable_order(constraints, objective, variables):
    if variables is not None:
        return list(variables)
    order = list(objective.coefficients)
    seen = set(order)
    for c in constraints:
        for v in c.coefficients:
            if v not in seen:
                seen.add(v)
                order.append(v)
    return order


def solve_rational_lp(constraints, objective, variables=None):
    """Optimize objective over x >= 0 subject to the constraints, exactly."""
    if objective.sense not in ("max", "min"):
        raise InputError(f"objective sense must be max or min, got {objective.sense!r}")
    constraints = list(constraints)
    names = [c.name if c.name is not None else i for i, c in enumerate(constraints)]
    if len(set(names)) != len(names):
        raise InputError("constraint names must be unique")
    order = _variable_order(constraints, objective, variables)
    index = {v: j for j, v in enumerate(order)}
    nv = len(order)
    sign = 1 if objective.sense == "max" else -1
    max_costs = [sign * Fraction(objective.coefficients.get(v, 0)) for v in order]

    # sign-normalize so every rhs is non-negative
    rows, rhs, senses, flips = [], [], [], []
    for c in constraints:
        if c.sense not in SENSES:
            raise InputError(f"unknown constraint sense {c.sense!r}")
        row = [Fraction(0)] * nv
        for v, a in c.coefficients.items():
            if v not in index:
                raise InputError(f"constraint uses undeclared variable {v!r}")
            row[index[v]] = Fraction(a)
        b = Fraction(c.rhs)
        sense = c.sense
        flip = 1
        if b < 0:
            row = [-a for a in row]
            b = -b
            flip = -1
            sense = {"<=": ">=", ">=": "<=", "==": "=="}[sense]
        rows.append(row)
        rhs.append(b)
        senses.append(sense)
        flips.append(flip)

    m = len(rows)
    surplus_rows = [i for i in range(m) if senses[i] == ">="]
    surplus_col = {i: nv + k for k, i in enumerate(surplus_rows)}
    first_init = nv + len(surplus_rows)
    width = first_init + m
    init_col = [first_init + i for i in range(m)]
    artificial = {init_col[i] for i in range(m) if senses[i] != "<="}

    full_rows = []
    for i in range(m):
        row = rows[i] + [Fraction(0)] * (width - nv)
        if i in surplus_col:
            row[surplus_col[i]] = Fraction(-1)
        row[init_col[i]] = Fraction(1)
        full_rows.append(row)
    tableau = SimplexTableau(full_rows, rhs, init_col, width)

    if artificial:
        phase_one = [Fraction(-1) if j in artificial else Fraction(0) for j in range(width)]
        tableau.set_costs(phase_one)
        tableau.run(range(width))
        if tableau.objective[-1] < 0:
            return LpSolution(INFEASIBLE)
        for i in range(m):
            if tableau.basis[i] in artificial:
                row = tableau.rows[i]
                j = next((j for j in range(width) if j not in artificial and row[j]), None)
                if j is not None:
                    tableau.pivot(i, j)

    allowed = [j for j in range(width) if j not in artificial]
    tableau.set_costs(max_costs + [Fraction(0)] * (width - nv))
    if tableau.run(allowed) == UNBOUNDED:
        return LpSolution(UNBOUNDED)

    primal = {v: tableau.value_of(index[v]) for v in order}
    duals = {}
    for i, name in enumerate(names):
        duals[name] = sign * flips[i] * tableau.objective[init_col[i]]
    solution = LpSolution(OPTIMAL, sign * tableau.objective[-1], primal, duals)
    verify_solution(constraints, objective, solution, names, order)
    return solution


def verify_solution(constraints, objective, solution, names=None, variables=None):
    """Re-check an optimal solution against its dual certificate; raises on any mismatch."""
    if names is None:
        names = [c.name if c.name is not None else i for i, c in enumerate(constraints)]
    if variables is None:
        variables = _variable_order(constraints, objective, None)
    x = solution.primal_values
    y = solution.certificate
    problems = []
    for v in variables:
        if x.get(v, 0) < 0:
            problems.append(f"variable {v!r} negative")
    # with s = +1 for max and -1 for min, s*y must be the max-form dual
    s = 1 if objective.sense == "max" else -1
    for c, name in zip(constraints, names):
        lhs = sum((Fraction(a) * x.get(v, 0) for v, a in c.coefficients.items()), Fraction(0))
        slack = lhs - Fraction(c.rhs)
        if (c.sense == "<=" and slack > 0) or (c.sense == ">=" and slack < 0) or \
                (c.sense == "==" and slack != 0):
            problems.append(f"constraint {name!r} violated")
        dual = s * y.get(name, Fraction(0))
        if (c.sense == "<=" and dual < 0) or (c.sense == ">=" and dual > 0):
            problems.append(f"dual of {name!r} has the wrong sign")
        if slack != 0 and dual != 0:
            problems.append(f"complementary slackness fails on {name!r}")
    for v in variables:
        column = sum((Fraction(c.coefficients.get(v, 0)) * s * y.get(name, Fraction(0))
                      for c, name in zip(constraints, names)), Fraction(0))
        reduced = column - s * Fraction(objective.coefficients.get(v, 0))
        if reduced < 0:
            problems.append(f"dual constraint of {v!r} violated")
        if x.get(v, 0) > 0 and reduced != 0:
            problems.append(f"complementary slackness fails on {v!r}")
    primal_value = sum((Fraction(a) * x.get(v, 0) for v, a in objective.coefficients.items()),
                       Fraction(0))
    dual_value = sum((Fraction(c.rhs) * y.get(name, Fraction(0))
                      for c, name in zip(constraints, names)), Fraction(0))
    if primal_value != solution.objective or dual_value != solution.objective:
        problems.append(f"objective mismatch: primal {primal_value}, dual {dual_value}, "
                        f"reported {solution.objective}")
    if problems:
        raise InternalConsistencyError("LP verification failed: " + "; ".join(problems))


def _explicit(game):
    if getattr(game, "is_implicit", False):
        raise ImplicitGameError("implicit games have no explicit coalition list for the LP")
    return game


def covering_lp(game):
    """min sum x_i subject to x(S) >= v(S) for every listed coalition."""
    _explicit(game)
    agents = list(range(game.graph.n))
    constraints = [LinearConstraint({i: 1 for i in sorted(s)}, ">=", Fraction(value), s)
                   for s, value in game.coalitions]
    return solve_rational_lp(constraints, Objective({i: 1 for i in agents}, "min"), agents)


def packing_lp(game):
    """max sum v(S) y_S subject to each agent lying in coalitions of total weight <= 1."""
    _explicit(game)
    coalitions = [s for s, _ in game.coalitions]
    constraints = []
    for i in range(game.graph.n):
        members = {s: 1 for s in coalitions if i in s}
        constraints.append(LinearConstraint(members, "<=", Fraction(1), i))
    objective = Objective({s: value for s, value in game.coalitions}, "max")
    return solve_rational_lp(constraints, objective, coalitions)
