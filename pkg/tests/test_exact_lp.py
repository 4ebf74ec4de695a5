from fractions import Fraction
import random

import pytest

from exact_lp import (INFEASIBLE, OPTIMAL, UNBOUNDED, LinearConstraint, LpSolution, Objective,
                      covering_lp, format_rational, packing_lp, parse_rational,
                      solve_rational_lp, verify_solution)
from games import ImplicitPathPowerGame, clique_half_game, grid_rowcol_game, make_game, random_game
from graph_core import path_graph, random_connected_graph
from solver_errors import ImplicitGameError, InputError, InternalConsistencyError


def test_rationals_round_trip_as_p_over_q():
    assert format_rational(Fraction(3, 6)) == "1/2"
    assert format_rational(2) == "2/1"
    assert parse_rational("7/3") == Fraction(7, 3)
    assert parse_rational("4") == Fraction(4)


@pytest.mark.parametrize("text", ["0.5", "1e3", "abc", "1/0", None])
def test_parse_rational_rejects_inexact_input(text):
    with pytest.raises(InputError):
        parse_rational(text)


def test_two_variable_maximum_with_duals():
    constraints = [LinearConstraint({"x": 1, "y": 2}, "<=", 4, "a"),
                   LinearConstraint({"x": 3, "y": 1}, "<=", 6, "b")]
    solution = solve_rational_lp(constraints, Objective({"x": 1, "y": 1}))
    assert solution.status == OPTIMAL
    assert solution.objective == Fraction(14, 5)
    assert solution.primal_values == {"x": Fraction(8, 5), "y": Fraction(6, 5)}
    assert solution.certificate == {"a": Fraction(2, 5), "b": Fraction(1, 5)}


def test_minimum_with_covering_constraint():
    constraints = [LinearConstraint({"x": 1, "y": 1}, ">=", 2, "c"),
                   LinearConstraint({"x": 1}, ">=", Fraction(1, 2), "d")]
    solution = solve_rational_lp(constraints, Objective({"x": 1, "y": 1}, "min"))
    assert solution.status == OPTIMAL
    assert solution.objective == 2
    assert sum(solution.certificate[n] * c.rhs for n, c in zip("cd", constraints)) == 2


def test_equality_and_negative_rhs():
    constraints = [LinearConstraint({"x": 1, "y": 1}, "==", 3),
                   LinearConstraint({"x": -1}, "<=", -1)]
    solution = solve_rational_lp(constraints, Objective({"y": 1}))
    assert solution.status == OPTIMAL
    assert solution.objective == 2
    assert solution.primal_values["x"] == 1


def test_infeasible_and_unbounded():
    infeasible = [LinearConstraint({"x": 1}, ">=", 2), LinearConstraint({"x": 1}, "<=", 1)]
    assert solve_rational_lp(infeasible, Objective({"x": 1})).status == INFEASIBLE
    unbounded = [LinearConstraint({"x": 1}, ">=", 1)]
    assert solve_rational_lp(unbounded, Objective({"x": 1})).status == UNBOUNDED


def test_bad_lp_input():
    with pytest.raises(InputError):
        solve_rational_lp([LinearConstraint({"x": 1}, "<", 1)], Objective({"x": 1}))
    with pytest.raises(InputError):
        solve_rational_lp([], Objective({"x": 1}, "maximize"))
    with pytest.raises(InputError):
        solve_rational_lp([LinearConstraint({"z": 1}, "<=", 1)], Objective({"x": 1}), ["x"])


def test_verify_solution_catches_a_wrong_certificate():
    constraints = [LinearConstraint({"x": 1}, "<=", 1, "a")]
    objective = Objective({"x": 1})
    wrong = LpSolution(OPTIMAL, Fraction(1), {"x": Fraction(1)}, {"a": Fraction(2)})
    with pytest.raises(InternalConsistencyError):
        verify_solution(constraints, objective, wrong)


def test_covering_and_packing_on_clique_half_game():
    game = clique_half_game(4)
    covering, packing = covering_lp(game), packing_lp(game)
    assert covering.objective == packing.objective == 2
    assert all(covering.primal_values[i] >= 0 for i in range(4))
    # the covering duals are a fractional packing of the same value
    assert sum(covering.certificate.values()) == 2


def test_grid_rowcol_fractional_value():
    assert packing_lp(grid_rowcol_game(4)).objective == 2


def test_strong_duality_on_random_games():
    for index in range(20):
        rng = random.Random(f"lp:{index}")
        game = random_game(random_connected_graph(rng.randint(2, 6), 0.5, rng), rng)
        assert covering_lp(game).objective == packing_lp(game).objective


def test_empty_game_has_zero_optimum():
    game = make_game(path_graph(3), [])
    assert covering_lp(game).objective == 0
    assert packing_lp(game).objective == 0


def test_implicit_games_are_rejected():
    with pytest.raises(ImplicitGameError):
        covering_lp(ImplicitPathPowerGame(9, 1, 3))
