from itertools import combinations
import random

import pytest

from discrete_solvers import (integral_covering, integral_packing, min_hitting_set,
                              minimal_masks, minimum_hitting_sets)
from games import ImplicitPathPowerGame, clique_half_game, grid_rowcol_game, make_game, random_game
from graph_core import clique_graph, path_graph, random_connected_graph, star_graph
from solver_errors import BudgetExceeded, ImplicitGameError, InputError


def brute_cover(game):
    """Smallest integral cover with entries up to the largest coalition value."""
    top = max((v for _, v in game.coalitions), default=0)
    best = None

    def extend(x):
        nonlocal best
        if len(x) == game.graph.n:
            if all(sum(x[i] for i in s) >= v for s, v in game.coalitions):
                cost = sum(x)
                best = cost if best is None else min(best, cost)
            return
        for value in range(top + 1):
            extend(x + [value])

    extend([])
    return best


def brute_packing(game):
    best = 0
    items = list(game.coalitions)
    for r in range(1, len(items) + 1):
        for combo in combinations(items, r):
            sets = [s for s, _ in combo]
            if all(not a & b for a, b in combinations(sets, 2)):
                best = max(best, sum(v for _, v in combo))
    return best


def test_minimal_masks_drops_supersets_and_duplicates():
    assert minimal_masks([0b011, 0b001, 0b111, 0b001, 0b110]) == [0b001, 0b110]


def test_min_hitting_set_on_clique_halves():
    family = [frozenset(c) for c in combinations(range(5), 3)]
    hit = min_hitting_set(family, 5)
    assert hit.size == 3
    assert all(s & hit.members for s in family)


def test_min_hitting_set_rejects_bad_families():
    with pytest.raises(InputError):
        min_hitting_set([], 3)
    with pytest.raises(InputError):
        min_hitting_set([frozenset()], 3)
    with pytest.raises(InputError):
        min_hitting_set([frozenset({4})], 3)


def test_minimum_hitting_sets_lists_every_optimum():
    family = [frozenset({0, 1}), frozenset({1, 2}), frozenset({2, 3})]
    found = minimum_hitting_sets(family, 4)
    assert [h.members for h in found] == [frozenset({0, 2}), frozenset({1, 2}),
                                          frozenset({1, 3})]


def test_hitting_set_budget():
    family = [frozenset(c) for c in combinations(range(8), 4)]
    with pytest.raises(BudgetExceeded):
        min_hitting_set(family, 8, node_budget=1)


@pytest.mark.parametrize("n, kappa", [(4, 3), (5, 3), (6, 4), (7, 4)])
def test_clique_half_cover(n, kappa):
    assert integral_covering(clique_half_game(n)).cost == kappa


def test_grid_rowcol_packing_is_a_single_coalition():
    assert integral_packing(grid_rowcol_game(4)).value == 1


def test_weighted_cover_and_packing_on_a_path():
    game = make_game(path_graph(4), {frozenset({0, 1}): 2, frozenset({1, 2}): 3,
                                     frozenset({2, 3}): 2})
    cover = integral_covering(game)
    assert cover.cost == 4
    assert all(sum(cover.allocation[i] for i in s) >= v for s, v in game.coalitions)
    packing = integral_packing(game)
    assert packing.value == 4
    assert packing.coalitions == (frozenset({0, 1}), frozenset({2, 3}))


def test_solvers_match_brute_force_on_random_games():
    for index in range(25):
        rng = random.Random(f"discrete:{index}")
        g = random_connected_graph(rng.randint(2, 5), 0.5, rng)
        game = random_game(g, rng, max_coalitions=6, max_value=3)
        assert integral_covering(game).cost == brute_cover(game)
        assert integral_packing(game).value == brute_packing(game)


def test_empty_game():
    game = make_game(star_graph(3), [])
    assert integral_covering(game).cost == 0
    assert integral_packing(game).value == 0


def test_implicit_games_need_the_path_power_routines():
    with pytest.raises(ImplicitGameError):
        integral_covering(ImplicitPathPowerGame(9, 1, 3))
    with pytest.raises(ImplicitGameError):
        integral_packing(ImplicitPathPowerGame(9, 1, 3))


def test_clique_packing():
    game = make_game(clique_graph(4), {frozenset({0, 1}): 1, frozenset({2, 3}): 1,
                                       frozenset({0, 1, 2, 3}): 3})
    assert integral_packing(game).value == 3
