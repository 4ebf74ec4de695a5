#!/usr/bin/env python3
"""
Coalition games on interaction graphs and the extremal constructions.

A game stores only its positive-value coalitions; every other coalition is
worth 0. Disjoint unions are never stored: integral packing realizes them.
"""
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
import math

from discrete_solvers import DEFAULT_NODE_BUDGET, min_hitting_set
from graph_core import (canonical_key, clique_graph, connected_set_masks, from_mask,
                        grid_column, grid_graph, grid_row, mask_members, path_power_graph,
                        to_mask, validate_minor_model)
from solver_errors import (BudgetExceeded, CertificateError, GameValidationError,
                           InputError)
from width_params import require_thicket

MAX_CLIQUE_HALF_N = 12
MAX_PRIMAL_GAP_MEMBERS = 12
MAX_PATHPOWER_N = 200
MAX_EXPLICIT_PATHPOWER_N = 12


@dataclass(frozen=True)
class CoalitionGame:
    """coalitions is a tuple of (frozenset, value) pairs in canonical order."""
    graph: object
    coalitions: tuple
    tag: str = ""

    is_implicit = False

    @property
    def values(self):
        return dict(self.coalitions)

    @property
    def is_simple(self):
        return all(value == 1 for _, value in self.coalitions)

    def value(self, s):
        return self.values.get(frozenset(s), 0)

    @property
    def grand_value(self):
        """v(I) when the grand coalition is listed, else None."""
        return self.values.get(frozenset(range(self.graph.n)))


def game_violations(graph, coalitions):
    violations = []
    seen = set()
    for members, value in coalitions:
        members = frozenset(members)
        label = sorted(members)
        if not members:
            violations.append("empty coalition")
            continue
        bad = sorted(v for v in members if not (0 <= v < graph.n))
        if bad:
            violations.append(f"coalition {label} has out-of-range agents {bad}")
            continue
        if members in seen:
            violations.append(f"coalition {label} listed twice")
        seen.add(members)
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            violations.append(f"coalition {label} has value {value!r}, need a positive integer")
        if not graph.is_connected_mask(to_mask(members)):
            violations.append(f"coalition {label} is not viable: its induced subgraph is disconnected")
    return violations


def make_game(graph, coalitions, tag=""):
    """Validated game from (members, value) pairs or a {members: value} mapping."""
    if isinstance(coalitions, dict):
        coalitions = list(coalitions.items())
    coalitions = [(frozenset(m), v) for m, v in coalitions]
    violations = game_violations(graph, coalitions)
    if violations:
        raise GameValidationError(violations)
    return CoalitionGame(graph, tuple(sorted(coalitions, key=lambda mv: canonical_key(mv[0]))), tag)


def simple_game(graph, sets, tag=""):
    return make_game(graph, [(s, 1) for s in {frozenset(s) for s in sets}], tag)


# --- constructions ---

def thicket_game(g, t):
    """Value 1 exactly on the thicket sets: kappa is the hitting size and rho is 1."""
    require_thicket(g, t)
    return simple_game(g, t.sets, "thicket")


def grid_rowcol_game(k):
    if k < 2:
        raise InputError(f"grid row-column game needs k >= 2, got {k}")
    return simple_game(grid_graph(k), [grid_row(k, i) | grid_column(k, i) for i in range(k)],
                       f"grid_rowcol({k})")


def minor_thicket_game(g, m):
    violations = validate_minor_model(g, m)
    if violations:
        raise CertificateError("minor model", violations)
    sets = []
    for i in range(1, m.k + 1):
        h = frozenset()
        for j in range(1, m.k + 1):
            h |= m.branch_set(i, j) | m.branch_set(j, i)
        sets.append(h)
    return simple_game(g, sets, f"minor_thicket({m.k})")


def clique_grid_game(n):
    side = math.isqrt(n) if n >= 0 else 0
    if n < 4 or side * side != n:
        raise InputError(f"clique grid game needs a perfect square n >= 4, got {n}")
    sets = [grid_row(side, i) | grid_column(side, i) for i in range(side)]
    return simple_game(clique_graph(n), sets, f"clique_grid({n})")


def clique_half_game(n, max_n=MAX_CLIQUE_HALF_N):
    if n < 2:
        raise InputError(f"clique half-game needs n >= 2, got {n}")
    if n > max_n:
        raise BudgetExceeded("clique size", max_n, "clique half-game")
    half = (n + 1) // 2
    return simple_game(clique_graph(n), [frozenset(c) for c in combinations(range(n), half)],
                       f"clique_half({n})")


def primal_gap_game(g, t, x, max_members=MAX_PRIMAL_GAP_MEMBERS,
                    node_budget=DEFAULT_NODE_BUDGET):
    """
    Unions of thicket subfamilies that keep at least ceil(tau/2) vertices of the
    minimum hitting set x, each at value 1.
    """
    require_thicket(g, t)
    if len(t.sets) > max_members:
        raise BudgetExceeded("thicket members", max_members, f"{len(t.sets)} members")
    members = frozenset(x.members) if hasattr(x, "members") else frozenset(x)
    unhit = [sorted(s) for s in t.sets if not s & members]
    if unhit:
        raise InputError(f"{sorted(members)} misses thicket sets {unhit}")
    tau = min_hitting_set(t.sets, g.n, node_budget).size
    if len(members) != tau:
        raise InputError(f"{sorted(members)} is not a minimum hitting set (minimum size {tau})")
    threshold = (tau + 1) // 2
    masks = [to_mask(s) for s in t.sets]
    x_mask = to_mask(members)
    unions = set()
    for chosen in range(1, 1 << len(masks)):
        union = 0
        for i in mask_members(chosen):
            union |= masks[i]
        unions.add(union)
    sets = [from_mask(u) for u in unions if (u & x_mask).bit_count() >= threshold]
    return simple_game(g, sets, "primal_gap")


# --- implicit path-power games ---

@dataclass(frozen=True)
class ImplicitPathPowerGame:
    """Value 1 on every connected set of the r-th path power with at least ceil(n/k) vertices."""
    n: int
    r: int
    k: int

    is_implicit = True

    def __post_init__(self):
        for name in ("n", "r", "k"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise InputError(f"{name} must be a positive integer, got {value!r}")
        if self.n < 3 * self.r:
            raise InputError(f"path-power game needs n >= 3r, got n={self.n}, r={self.r}")

    @property
    def threshold(self):
        return -(-self.n // self.k)


def largest_avoiding_block(game, removed):
    """
    Largest number of surviving positions in one block, where blocks are split
    by runs of at least r consecutive removed positions. A connected set of
    the path power avoiding `removed` fits inside a single block.
    """
    removed = set(removed)
    largest = current = run = 0
    for position in range(game.n):
        if position in removed:
            run += 1
            if run >= game.r:
                current = 0
        else:
            run = 0
            current += 1
            largest = max(largest, current)
    return largest


def pathpower_lower_bound(game):
    return (game.n // (game.threshold + game.r)) * game.r


class PathPowerCoverSearch:
    """
    Scan positions left to right deciding keep or remove. The state is the run of
    removed positions (capped at r) and the survivors in the current block; a
    block reaching the threshold is the lazily found violated coalition. States
    already reached with no more removals are dominated.
    """

    def __init__(self, game, node_budget):
        self.game = game
        self.node_budget = node_budget
        self.nodes = 0
        self.window = game.threshold + game.r - 1
        self.best, self.best_set = self.greedy()
        self.seen = {}

    def greedy(self):
        removed = []
        survivors = 0
        position = 0
        while position < self.game.n:
            if survivors == self.game.threshold - 1:
                removed.extend(range(position, min(position + self.game.r, self.game.n)))
                position += self.game.r
                survivors = 0
            else:
                survivors += 1
                position += 1
        return len(removed), removed

    def suffix_bound(self, position):
        # every window of threshold + r - 1 positions needs r removals
        return ((self.game.n - position) // self.window) * self.game.r

    def branch(self, position, run, survivors, removed):
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise BudgetExceeded("node", self.node_budget, "path-power cover")
        count = len(removed)
        if count + self.suffix_bound(position) >= self.best:
            return
        if position == self.game.n:
            self.best, self.best_set = count, list(removed)
            return
        state = (position, run, survivors)
        if self.seen.get(state, count + 1) <= count:
            return
        self.seen[state] = count
        if survivors + 1 < self.game.threshold:
            self.branch(position + 1, 0, survivors + 1, removed)
        removed.append(position)
        new_run = min(run + 1, self.game.r)
        self.branch(position + 1, new_run, 0 if new_run == self.game.r else survivors, removed)
        removed.pop()

    def run(self):
        self.branch(0, 0, 0, [])
        return self.best, sorted(self.best_set)


def pathpower_min_cover(game, node_budget=DEFAULT_NODE_BUDGET):
    if game.n > MAX_PATHPOWER_N:
        raise BudgetExceeded("path length", MAX_PATHPOWER_N, "path-power cover")
    _, cover = PathPowerCoverSearch(game, node_budget).run()
    if largest_avoiding_block(game, cover) >= game.threshold:
        raise InputError("path-power cover search returned an infeasible cover")
    return frozenset(cover)


def pathpower_cover_number(game, node_budget=DEFAULT_NODE_BUDGET):
    return len(pathpower_min_cover(game, node_budget))


def pathpower_frac_upper(game):
    """k, from the uniform allocation k/n: a coalition of at least ceil(n/k) agents gets at least 1."""
    share = Fraction(game.k, game.n)
    if game.threshold * share < 1:
        raise InputError("uniform allocation is not feasible")
    return share * game.n


def pathpower_explicit_game(game, max_n=MAX_EXPLICIT_PATHPOWER_N):
    if game.n > max_n:
        raise BudgetExceeded("path length", max_n, "explicit path-power game")
    g = path_power_graph(game.n, game.r)
    sets = [from_mask(m) for m in connected_set_masks(g, game.threshold, game.n)]
    return simple_game(g, sets, f"path_power({game.n},{game.r},{game.k})")


def random_game(graph, rng, max_coalitions=15, max_value=3, connected=None):
    """Uniform sample of connected sets, values uniform in 1..max_value."""
    pool = connected if connected is not None else connected_set_masks(graph)
    m = rng.randint(1, min(max_coalitions, len(pool)))
    picks = sorted(rng.sample(range(len(pool)), m))
    return make_game(graph, [(from_mask(pool[i]), rng.randint(1, max_value)) for i in picks],
                     "random")


def random_simple_game(graph, rng, max_coalitions=15, connected=None):
    return random_game(graph, rng, max_coalitions, 1, connected)

