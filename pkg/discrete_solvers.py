#!/usr/bin/env python3
"""Integral covering, integral packing and minimum hitting sets by branch and bound."""
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
import math

from exact_lp import INFEASIBLE, LinearConstraint, Objective, solve_rational_lp
from graph_core import canonical_key, from_mask, mask_members, to_mask
from solver_errors import BudgetExceeded, ImplicitGameError, InputError

DEFAULT_NODE_BUDGET = 10**7


@dataclass(frozen=True)
class IntegralCover:
    allocation: dict
    cost: int


@dataclass(frozen=True)
class IntegralPacking:
    coalitions: tuple
    value: int


@dataclass(frozen=True)
class HittingSet:
    members: frozenset
    size: int


def _explicit(game):
    if getattr(game, "is_implicit", False):
        raise ImplicitGameError("implicit games need the dedicated path-power routines")


def minimal_masks(masks):
    """Distinct masks with every strict superset of another member dropped."""
    unique = sorted(set(masks), key=lambda m: (m.bit_count(), m))
    kept = []
    for m in unique:
        if not any(k & m == k for k in kept):
            kept.append(m)
    return kept


class HittingSetSearch:
    """Branch on the unhit set with the fewest allowed vertices; earlier siblings are forbidden."""

    def __init__(self, masks, node_budget):
        self.masks = minimal_masks(masks)
        self.node_budget = node_budget
        self.nodes = 0
        self.best = self.greedy()

    def greedy(self):
        chosen = 0
        unhit = list(self.masks)
        while unhit:
            counts = {}
            for m in unhit:
                for v in mask_members(m):
                    counts[v] = counts.get(v, 0) + 1
            v = min(counts, key=lambda u: (-counts[u], u))
            chosen |= 1 << v
            unhit = [m for m in unhit if not m & chosen]
        return chosen

    @staticmethod
    def bound(unhit):
        """Size of a greedy family of pairwise disjoint unhit sets."""
        used = 0
        count = 0
        for m in sorted(unhit, key=lambda m: (m.bit_count(), m)):
            if not m & used:
                used |= m
                count += 1
        return count

    def branch(self, chosen, size, unhit, forbidden):
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise BudgetExceeded("node", self.node_budget, "minimum hitting set")
        if not unhit:
            if size < self.best.bit_count():
                self.best = chosen
            return
        if size + self.bound(unhit) >= self.best.bit_count():
            return
        target = min(unhit, key=lambda m: ((m & ~forbidden).bit_count(), m))
        allowed = target & ~forbidden
        for v in mask_members(allowed):
            bit = 1 << v
            self.branch(chosen | bit, size + 1, [m for m in unhit if not m & bit], forbidden)
            forbidden |= bit

    def run(self):
        self.branch(0, 0, list(self.masks), 0)
        return self.best


def _check_family(family, n):
    family = [frozenset(s) for s in family]
    if not family:
        raise InputError("hitting set family must be non-empty")
    for s in family:
        if not s:
            raise InputError("hitting set family contains an empty set")
        bad = [v for v in s if not (0 <= v < n)]
        if bad:
            raise InputError(f"family member {sorted(s)} has vertices outside 0..{n - 1}")
    return family


def min_hitting_set(family, n, node_budget=DEFAULT_NODE_BUDGET):
    family = _check_family(family, n)
    best = HittingSetSearch([to_mask(s) for s in family], node_budget).run()
    members = from_mask(best)
    return HittingSet(members, len(members))


def minimum_hitting_sets(family, n, node_budget=DEFAULT_NODE_BUDGET):
    """Every minimum transversal of the family, in canonical order."""
    family = _check_family(family, n)
    size = min_hitting_set(family, n, node_budget).size
    masks = minimal_masks(to_mask(s) for s in family)
    found = []
    for combo in combinations(range(n), size):
        x = to_mask(combo)
        if all(m & x for m in masks):
            found.append(HittingSet(frozenset(combo), size))
    return found


class CoverSearch:
    """
    Integer covering: x_i >= 0 integral with x(S) >= v(S). Each node solves the
    exact LP relaxation under the branching bounds; rounding every value up
    gives a feasible cover for the incumbent.
    """

    def __init__(self, game, node_budget):
        self.n = game.graph.n
        self.coalitions = list(game.coalitions)
        self.node_budget = node_budget
        self.nodes = 0
        self.best_cost, self.best = self.greedy()

    def greedy(self):
        x = [0] * self.n
        for s, value in self.coalitions:
            deficit = value - sum(x[i] for i in s)
            if deficit > 0:
                x[min(s)] += deficit
        return sum(x), x

    def relaxation(self, lower, upper):
        agents = list(range(self.n))
        constraints = [LinearConstraint({i: 1 for i in sorted(s)}, ">=", Fraction(value), ("S", s))
                       for s, value in self.coalitions]
        for i in agents:
            if lower[i] > 0:
                constraints.append(LinearConstraint({i: 1}, ">=", Fraction(lower[i]), ("lo", i)))
            if upper[i] is not None:
                constraints.append(LinearConstraint({i: 1}, "<=", Fraction(upper[i]), ("hi", i)))
        return solve_rational_lp(constraints, Objective({i: 1 for i in agents}, "min"), agents)

    def branch(self, lower, upper):
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise BudgetExceeded("node", self.node_budget, "integral covering")
        solution = self.relaxation(lower, upper)
        if solution.status == INFEASIBLE:
            return
        if math.ceil(solution.objective) >= self.best_cost:
            return
        x = [solution.primal_values[i] for i in range(self.n)]
        rounded = [math.ceil(v) for v in x]
        if sum(rounded) < self.best_cost:
            self.best_cost, self.best = sum(rounded), rounded
        j = next((i for i, v in enumerate(x) if v.denominator != 1), None)
        if j is None:
            return
        down = list(upper)
        down[j] = math.floor(x[j])
        self.branch(lower, down)
        up = list(lower)
        up[j] = math.ceil(x[j])
        self.branch(up, upper)

    def run(self):
        self.branch([0] * self.n, [None] * self.n)
        return self.best_cost, self.best


def integral_covering(game, node_budget=DEFAULT_NODE_BUDGET):
    _explicit(game)
    n = game.graph.n
    if not game.coalitions:
        return IntegralCover({i: 0 for i in range(n)}, 0)
    if game.is_simple:
        hit = min_hitting_set([s for s, _ in game.coalitions], n, node_budget)
        return IntegralCover({i: int(i in hit.members) for i in range(n)}, hit.size)
    cost, x = CoverSearch(game, node_budget).run()
    return IntegralCover({i: x[i] for i in range(n)}, cost)


class PackingSearch:
    """Include/exclude over coalitions sorted by value; bound by the sum of compatible values."""

    def __init__(self, game, node_budget):
        items = sorted(game.coalitions, key=lambda sv: (-sv[1], canonical_key(sv[0])))
        self.sets = [s for s, _ in items]
        self.masks = [to_mask(s) for s in self.sets]
        self.values = [v for _, v in items]
        self.node_budget = node_budget
        self.nodes = 0
        self.best_value = 0
        self.best = []

    def branch(self, candidates, value, chosen):
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise BudgetExceeded("node", self.node_budget, "integral packing")
        if value > self.best_value:
            self.best_value, self.best = value, list(chosen)
        if not candidates:
            return
        if value + sum(self.values[j] for j in candidates) <= self.best_value:
            return
        i, rest = candidates[0], candidates[1:]
        compatible = [j for j in rest if not self.masks[j] & self.masks[i]]
        chosen.append(i)
        self.branch(compatible, value + self.values[i], chosen)
        chosen.pop()
        self.branch(rest, value, chosen)

    def run(self):
        self.branch(list(range(len(self.sets))), 0, [])
        return self.best_value, sorted((self.sets[i] for i in self.best), key=canonical_key)


def integral_packing(game, node_budget=DEFAULT_NODE_BUDGET):
    _explicit(game)
    value, coalitions = PackingSearch(game, node_budget).run()
    return IntegralPacking(tuple(coalitions), value)
