#!/usr/bin/env python3
"""
Stabilizing allocations and the packing/covering gap report.

vine_allocation walks a vine decomposition bottom-up, paying each node's
largest residual coalition to every agent in the node label, and reads a
disjoint packing off the same residuals top-down. sqrt_allocation pays a
greedy packing of small coalitions plus a uniform share of the largest value.
"""
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
import math

from discrete_solvers import DEFAULT_NODE_BUDGET, integral_covering, integral_packing
from exact_lp import covering_lp, packing_lp
from graph_core import canonical_key
from solver_errors import CertificateError, ImplicitGameError, InputError, InternalConsistencyError
from width_params import pad_labels, validate_vine


@dataclass(frozen=True)
class Allocation:
    values: dict
    cost: Fraction


@dataclass(frozen=True)
class PackingWitness:
    coalitions: tuple
    value: int


@dataclass(frozen=True)
class ResidualStep:
    node: int
    coalition: frozenset
    residual: Fraction


@dataclass(frozen=True)
class GapReport:
    kappa: Fraction
    kappa_f: Fraction
    rho: Fraction
    rho_f: Fraction
    ratio_pc: Fraction
    gap_primal: Fraction
    gap_dual: Fraction
    alpha_star: Fraction
    tau: int = None
    checks: dict = field(default_factory=dict)
    grand_value: int = None
    core_nonempty: bool = None
    relative_cost: Fraction = None
    certificates: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def passed(self):
        return all(self.checks.values())


def _explicit(game):
    if getattr(game, "is_implicit", False):
        raise ImplicitGameError("allocations need the explicit coalition list")


def allocation_shortfalls(game, values):
    """Coalitions whose members receive less than the coalition value."""
    return [s for s, v in game.coalitions if sum((values.get(i, 0) for i in s), Fraction(0)) < v]


def packing_problems(game, coalitions):
    problems = []
    listed = game.values
    used = set()
    for s in coalitions:
        if s not in listed:
            problems.append(f"{sorted(s)} is not a listed coalition")
        if used & s:
            problems.append(f"{sorted(s)} overlaps an earlier coalition")
        used |= s
    return problems


def _rooted_tree(d):
    adjacency = d.tree_adjacency()
    parent = {0: None}
    depth = {0: 0}
    order = []
    queue = deque([0])
    while queue:
        t = queue.popleft()
        order.append(t)
        for s in sorted(adjacency[t]):
            if s not in parent:
                parent[s] = t
                depth[s] = depth[t] + 1
                queue.append(s)
    return adjacency, depth, order


def vine_allocation(game, d):
    _explicit(game)
    violations = validate_vine(game.graph, d)
    if violations:
        raise CertificateError("vine decomposition", violations)
    padded = pad_labels(d)
    adjacency, depth, order = _rooted_tree(padded)
    node_sets = padded.node_sets(game.graph.n)

    coalition_nodes = {}
    rooted_at = {t: [] for t in order}
    for s, _ in game.coalitions:
        nodes = set().union(*(node_sets[v] for v in s))
        if not _connected_nodes(adjacency, nodes):
            raise InputError(f"nodes of coalition {sorted(s)} are disconnected in the decomposition")
        coalition_nodes[s] = nodes
        rooted_at[min(nodes, key=lambda t: (depth[t], t))].append(s)

    values = game.values
    x = {i: Fraction(0) for i in range(game.graph.n)}
    steps = {}
    for t in reversed(order):
        best, best_residual = None, Fraction(0)
        for s in sorted(rooted_at[t], key=lambda q: tuple(sorted(q))):
            residual = max(values[s] - sum(x[i] for i in s), Fraction(0))
            if best is None or residual > best_residual:
                best, best_residual = s, residual
        if best_residual > 0:
            for i in padded.labels[t]:
                x[i] += best_residual
        steps[t] = ResidualStep(t, best, best_residual)

    deleted = set()
    chosen = []
    for t in order:
        if t in deleted:
            continue
        step = steps[t]
        if step.residual > 0:
            chosen.append(step.coalition)
            deleted |= coalition_nodes[step.coalition]
        else:
            deleted.add(t)

    allocation = Allocation(x, sum(x.values(), Fraction(0)))
    witness = PackingWitness(tuple(sorted(chosen, key=canonical_key)),
                             sum(values[s] for s in chosen))
    trace = tuple(steps[t] for t in reversed(order))
    total_residual = sum((step.residual for step in trace), Fraction(0))
    problems = [f"coalition {sorted(s)} underpaid" for s in allocation_shortfalls(game, x)]
    problems += packing_problems(game, witness.coalitions)
    if total_residual > witness.value:
        problems.append(f"residual total {total_residual} exceeds witness value {witness.value}")
    if allocation.cost > padded.width * witness.value:
        problems.append(f"cost {allocation.cost} exceeds width {padded.width} x witness {witness.value}")
    if problems:
        raise InternalConsistencyError("vine allocation: " + "; ".join(problems))
    return allocation, witness, trace


def _connected_nodes(adjacency, nodes):
    if not nodes:
        return False
    start = min(nodes)
    seen = {start}
    queue = deque([start])
    while queue:
        t = queue.popleft()
        for s in adjacency[t]:
            if s in nodes and s not in seen:
                seen.add(s)
                queue.append(s)
    return seen == nodes


def sqrt_allocation(game):
    """
    Coalitions with size^2 < n are small. A greedy packing of small coalitions
    by decreasing value pays each picked value to its members; every agent also
    gets v* / ceil(sqrt(n)), which covers every large coalition.
    """
    _explicit(game)
    n = game.graph.n
    x = {i: Fraction(0) for i in range(n)}
    small = sorted(((s, v) for s, v in game.coalitions if len(s) ** 2 < n),
                   key=lambda sv: (-sv[1], canonical_key(sv[0])))
    used = set()
    for s, v in small:
        if not s & used:
            used |= s
            for i in s:
                x[i] += v
    v_star = max((v for _, v in game.coalitions), default=0)
    share = Fraction(v_star, math.isqrt(n - 1) + 1)
    for i in x:
        x[i] += share
    allocation = Allocation(x, sum(x.values(), Fraction(0)))
    if allocation_shortfalls(game, x):
        raise InternalConsistencyError("square-root allocation is infeasible")
    return allocation


def sqrt_bound_holds(allocation, n, rho):
    """cost <= 2 sqrt(n) rho, compared exactly as cost^2 <= 4 n rho^2."""
    return allocation.cost ** 2 <= 4 * n * Fraction(rho) ** 2


def gap_report(game, tau=None, treewidth=None, node_budget=DEFAULT_NODE_BUDGET):
    _explicit(game)
    cover = integral_covering(game, node_budget)
    packing = integral_packing(game, node_budget)
    covering = covering_lp(game)
    fractional = packing_lp(game)
    if covering.objective != fractional.objective:
        raise InternalConsistencyError(
            f"covering LP {covering.objective} != packing LP {fractional.objective}")
    kappa, rho = Fraction(cover.cost), Fraction(packing.value)
    kappa_f = rho_f = covering.objective
    if game.coalitions:
        ratio_pc, gap_primal, gap_dual = kappa / rho, kappa / kappa_f, rho_f / rho
    else:
        ratio_pc = gap_primal = gap_dual = Fraction(1)
    checks = {
        "strong_duality": kappa_f == rho_f,
        "weak_duality": rho <= rho_f <= kappa,
        "ratio_product": ratio_pc == gap_primal * gap_dual,
    }
    if tau is not None:
        checks["pc_le_tau"] = ratio_pc <= tau
        checks["primal_le_tau"] = gap_primal <= tau
        checks["dual_le_tau"] = gap_dual <= tau
    if treewidth is not None:
        checks["pc_le_treewidth_plus_one"] = ratio_pc <= treewidth + 1
    grand = game.grand_value
    certificates = {
        "cover": cover,
        "packing": packing,
        "fractional_cover": covering.primal_values,
        "fractional_packing": fractional.primal_values,
    }
    return GapReport(
        kappa, kappa_f, rho, rho_f, ratio_pc, gap_primal, gap_dual, gap_dual, tau, checks,
        grand_value=grand,
        core_nonempty=None if grand is None else kappa_f == grand,
        relative_cost=None if grand is None else kappa_f / grand,
        certificates=certificates,
    )
