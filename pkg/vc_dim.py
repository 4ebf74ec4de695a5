#!/usr/bin/env python3
"""VC-dimension of the family of connected induced subgraphs."""
from dataclasses import dataclass
from itertools import combinations

from discrete_solvers import DEFAULT_NODE_BUDGET, min_hitting_set
from graph_core import canonical_key, connected_set_masks, from_mask, mask_members, to_mask
from solver_errors import BudgetExceeded, ImplicitGameError, InputError

MAX_VC_VERTICES = 12
MAX_SHATTER_SIZE = 20


@dataclass(frozen=True)
class ShatterWitness:
    shattered_set: frozenset
    realizers: dict


@dataclass(frozen=True)
class NotShattered:
    """failing_subset is the first subset, in canonical order, that no connected set cuts out."""
    candidate: frozenset
    failing_subset: frozenset


def _subsets_in_order(members):
    for size in range(len(members) + 1):
        for combo in combinations(members, size):
            yield combo


def _shatter(x_mask, masks):
    first_realizer = {}
    for m in masks:
        trace = m & x_mask
        if trace not in first_realizer:
            first_realizer[trace] = m
    realizers = {}
    for combo in _subsets_in_order(mask_members(x_mask)):
        trace = to_mask(combo)
        if trace not in first_realizer:
            return NotShattered(from_mask(x_mask), frozenset(combo))
        realizers[frozenset(combo)] = from_mask(first_realizer[trace])
    return ShatterWitness(from_mask(x_mask), realizers)


def is_shattered(g, x):
    x = frozenset(x)
    if not x:
        raise InputError("candidate set must be non-empty")
    g.check_vertices(x)
    if len(x) > MAX_SHATTER_SIZE:
        raise BudgetExceeded("shatter size", MAX_SHATTER_SIZE, f"|X| = {len(x)}")
    return _shatter(to_mask(x), connected_set_masks(g))


def _pairs_realizable(g, x_mask):
    """Every pair of X must share a component once the rest of X is removed."""
    members = mask_members(x_mask)
    for u, v in combinations(members, 2):
        keep = g.full_mask & ~x_mask | (1 << u) | (1 << v)
        if not any(c >> u & 1 and c >> v & 1 for c in g.components_of_mask(keep)):
            return False
    return True


def vc_dimension_exact(g, max_vertices=MAX_VC_VERTICES):
    """Largest shattered set, scanning candidate sizes downward from log2 of the family size."""
    if g.n > max_vertices:
        raise BudgetExceeded("vertex", max_vertices, f"VC-dimension of a {g.n}-vertex graph")
    masks = connected_set_masks(g)
    top = min(g.n, len(masks).bit_length() - 1)
    for d in range(top, 0, -1):
        for combo in combinations(range(g.n), d):
            x_mask = to_mask(combo)
            if x_mask == g.full_mask or not _pairs_realizable(g, x_mask):
                continue
            result = _shatter(x_mask, masks)
            if isinstance(result, ShatterWitness):
                return d, result
    # a one-vertex graph has no connected set avoiding its only vertex
    return 0, ShatterWitness(frozenset(), {frozenset(): from_mask(masks[0])})


def justified_packing(game, node_budget=DEFAULT_NODE_BUDGET):
    """
    Disjoint coalitions of a simple game drawn from the justifying coalitions of
    a minimum hitting set X (one coalition meeting X in exactly x, per x).
    Each pick discards the picks it meets, so the packing has at least
    |X| / (d + 1) members when the VC-dimension is d.
    """
    if getattr(game, "is_implicit", False):
        raise ImplicitGameError("justified packing needs the explicit coalition list")
    if not game.is_simple:
        raise InputError("justified packing is defined for simple games")
    if not game.coalitions:
        return frozenset(), ()
    coalitions = [s for s, _ in game.coalitions]
    x = min_hitting_set(coalitions, game.graph.n, node_budget).members
    justifying = []
    for v in sorted(x):
        justifying.append(next(s for s in coalitions if s & x == {v}))
    remaining = sorted(justifying, key=canonical_key)
    packing = []
    while remaining:
        pick = remaining.pop(0)
        packing.append(pick)
        remaining = [s for s in remaining if not s & pick]
    return x, tuple(packing)
