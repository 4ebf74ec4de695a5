from fractions import Fraction
from itertools import combinations
import random

import pytest

from discrete_solvers import integral_covering, min_hitting_set
from games import (ImplicitPathPowerGame, clique_grid_game, clique_half_game, grid_rowcol_game,
                   largest_avoiding_block, make_game, minor_thicket_game,
                   pathpower_cover_number, pathpower_explicit_game, pathpower_frac_upper,
                   pathpower_lower_bound, pathpower_min_cover, primal_gap_game, random_game,
                   random_simple_game, simple_game, thicket_game)
from graph_core import (clique_graph, grid_graph, identity_minor_model, path_graph,
                        random_connected_graph)
from solver_errors import BudgetExceeded, CertificateError, GameValidationError, InputError
from width_params import Thicket, clique_majority_thicket, grid_cross_thicket


def test_make_game_orders_coalitions_canonically():
    game = make_game(path_graph(3), {frozenset({1, 2}): 2, frozenset({0}): 1,
                                     frozenset({0, 1, 2}): 4})
    assert [s for s, _ in game.coalitions] == [frozenset({0}), frozenset({1, 2}),
                                               frozenset({0, 1, 2})]
    assert game.value({1, 2}) == 2
    assert game.value({0, 1}) == 0
    assert game.grand_value == 4
    assert not game.is_simple


@pytest.mark.parametrize("coalitions, fragment", [
    ([({0, 2}, 1)], "not viable"),
    ([({0, 1}, 0)], "positive integer"),
    ([({0, 1}, 1), ({1, 0}, 2)], "listed twice"),
    ([({0, 5}, 1)], "out-of-range"),
    ([(set(), 1)], "empty coalition"),
    ([({0, 1}, Fraction(1, 2))], "positive integer"),
])
def test_make_game_rejects_invalid_coalitions(coalitions, fragment):
    with pytest.raises(GameValidationError) as info:
        make_game(path_graph(3), coalitions)
    assert any(fragment in v for v in info.value.violations)


def test_grid_rowcol_game_matches_identity_minor_thicket():
    rowcol = grid_rowcol_game(3)
    minor = minor_thicket_game(grid_graph(3), identity_minor_model(3))
    assert rowcol.coalitions == minor.coalitions
    assert rowcol.is_simple
    with pytest.raises(InputError):
        grid_rowcol_game(1)


def test_minor_thicket_game_rejects_bad_models():
    model = identity_minor_model(3)
    with pytest.raises(CertificateError):
        minor_thicket_game(path_graph(9), model)


def test_clique_constructions():
    game = clique_half_game(5)
    assert len(game.coalitions) == 10
    assert all(len(s) == 3 for s, _ in game.coalitions)
    with pytest.raises(BudgetExceeded):
        clique_half_game(13)
    with pytest.raises(InputError):
        clique_half_game(1)
    grid = clique_grid_game(9)
    assert grid.graph == clique_graph(9)
    assert len(grid.coalitions) == 3
    with pytest.raises(InputError):
        clique_grid_game(5)


def test_thicket_game_needs_a_thicket():
    g = grid_graph(3)
    assert integral_covering(thicket_game(g, grid_cross_thicket(3))).cost == 3
    with pytest.raises(CertificateError):
        thicket_game(path_graph(4), Thicket(({0}, {3})))


def test_primal_gap_game_on_the_grid():
    g = grid_graph(3)
    t = grid_cross_thicket(3)
    x = min_hitting_set(t.sets, g.n)
    game = primal_gap_game(g, t, x)
    assert game.is_simple
    assert all(len(s & x.members) >= 2 for s, _ in game.coalitions)


def test_primal_gap_game_input_checks():
    g = clique_graph(6)
    t = clique_majority_thicket(6)
    with pytest.raises(BudgetExceeded):
        primal_gap_game(g, t, min_hitting_set(t.sets, 6))
    with pytest.raises(InputError):
        primal_gap_game(grid_graph(3), grid_cross_thicket(3), {0, 1, 2, 3})
    with pytest.raises(InputError):
        primal_gap_game(grid_graph(3), grid_cross_thicket(3), {0, 4})


def test_implicit_path_power_game():
    game = ImplicitPathPowerGame(9, 1, 3)
    assert game.is_implicit
    assert game.threshold == 3
    with pytest.raises(InputError):
        ImplicitPathPowerGame(5, 2, 2)
    with pytest.raises(InputError):
        ImplicitPathPowerGame(9, 0, 3)


def test_largest_avoiding_block():
    game = ImplicitPathPowerGame(9, 1, 3)
    assert largest_avoiding_block(game, {2, 5}) == 3
    assert largest_avoiding_block(game, set()) == 9
    wide = ImplicitPathPowerGame(9, 2, 3)
    assert largest_avoiding_block(wide, {2}) == 8
    assert largest_avoiding_block(wide, {2, 3}) == 5


@pytest.mark.parametrize("n, r, k, kappa", [
    (9, 1, 3, 3),
    (27, 2, 3, 4),
    (6, 2, 2, 2),
])
def test_pathpower_cover_number(n, r, k, kappa):
    game = ImplicitPathPowerGame(n, r, k)
    assert pathpower_cover_number(game) == kappa
    cover = pathpower_min_cover(game)
    assert largest_avoiding_block(game, cover) < game.threshold
    assert pathpower_lower_bound(game) <= kappa


def test_pathpower_fractional_upper_bound():
    game = ImplicitPathPowerGame(27, 2, 3)
    assert pathpower_frac_upper(game) == 3
    assert Fraction(pathpower_cover_number(game)) / pathpower_frac_upper(game) >= Fraction(4, 3)


@pytest.mark.parametrize("n, r, k", [(6, 1, 2), (6, 2, 2), (7, 2, 3), (9, 1, 3), (9, 3, 2)])
def test_lazy_cover_matches_explicit_enumeration(n, r, k):
    game = ImplicitPathPowerGame(n, r, k)
    assert pathpower_cover_number(game) == integral_covering(pathpower_explicit_game(game)).cost


def test_explicit_path_power_game_size_limit():
    with pytest.raises(BudgetExceeded):
        pathpower_explicit_game(ImplicitPathPowerGame(13, 1, 2))


def test_random_games_are_seeded_and_viable():
    g = random_connected_graph(6, 0.4, random.Random("games:graph"))
    first = random_game(g, random.Random("games:1"))
    second = random_game(g, random.Random("games:1"))
    assert first == second
    assert 1 <= len(first.coalitions) <= 15
    assert all(1 <= v <= 3 for _, v in first.coalitions)
    assert random_simple_game(g, random.Random("games:2")).is_simple


def test_simple_game_dedups_sets():
    game = simple_game(clique_graph(3), [{0, 1}, {1, 0}, {2}])
    assert len(game.coalitions) == 2


def test_all_majority_subsets_of_k4_form_the_half_game():
    assert [s for s, _ in clique_half_game(4).coalitions] == [
        frozenset(c) for c in combinations(range(4), 2)]
