from fractions import Fraction

import pytest

from experiments import (EXPERIMENTS, STATUS_BUDGET, STATUS_ERROR, STATUS_OK, ExperimentConfig,
                         ReportRow, Task, experiment_document, explicit_random_game, row_document,
                         rows_csv, rows_frame, run_experiment, run_task, summary, summary_status)
from solver_errors import BudgetExceeded, EXIT_ASSERTION, EXIT_BUDGET, EXIT_OK, InputError


@pytest.mark.parametrize("name", ["dual-grid", "trees", "minmax", "primal-gap", "strong-duality"])
def test_quick_experiments_pass(name):
    rows = run_experiment(ExperimentConfig.quick(name))
    assert rows
    assert all(row.passed for row in rows), [row_document(r) for r in rows if not r.passed]
    assert summary_status(rows) == EXIT_OK


def test_dual_grid_rows():
    rows = {row.instance: row for row in run_experiment(ExperimentConfig.quick("dual-grid"))}
    assert sorted(rows) == ["clique-grid-04", "clique-grid-09", "grid-rowcol-3", "grid-rowcol-4",
                            "grid-rowcol-5"]
    assert rows["grid-rowcol-5"].fields["rho_f"] == Fraction(5, 2)
    assert rows["grid-rowcol-5"].measured == Fraction(5, 2)


def test_runs_are_deterministic_and_independent_of_workers():
    first = run_experiment(ExperimentConfig.quick("strong-duality", seed=7))
    again = run_experiment(ExperimentConfig.quick("strong-duality", seed=7))
    threaded = run_experiment(ExperimentConfig.quick("strong-duality", seed=7, workers=3))
    assert first == again == threaded
    assert [row.instance for row in first] == sorted(row.instance for row in first)


def test_random_game_corpus_is_shared_between_experiments():
    a = explicit_random_game(ExperimentConfig.quick("strong-duality", seed=3), 4)
    b = explicit_random_game(ExperimentConfig.quick("sandwich", seed=3), 4)
    assert a == b
    assert 2 <= a.graph.n <= 6


def test_every_experiment_has_unique_instances():
    for name, build in EXPERIMENTS.items():
        instances = [task.instance for task in build(ExperimentConfig.quick(name))]
        assert len(instances) == len(set(instances)), name


def test_bad_configs():
    with pytest.raises(InputError):
        run_experiment(ExperimentConfig.quick("no-such-experiment"))
    with pytest.raises(InputError):
        ExperimentConfig("minmax", node_budget=0)
    with pytest.raises(InputError):
        ExperimentConfig("minmax", workers=0)


def test_run_task_classifies_failures():
    def budget():
        raise BudgetExceeded("node", 5)

    def broken():
        raise InputError("bad instance")

    assert run_task(Task("a", budget)).status == STATUS_BUDGET
    row = run_task(Task("b", broken))
    assert row.status == STATUS_ERROR
    assert row.detail == "InputError: bad instance"


def test_summary_status_codes():
    ok = ReportRow("a", checks={"x": True})
    failed = ReportRow("b", checks={"x": False})
    budget = ReportRow("c", status=STATUS_BUDGET)
    error = ReportRow("d", status=STATUS_ERROR)
    assert summary_status([ok]) == EXIT_OK
    assert summary_status([ok, budget]) == EXIT_BUDGET
    assert summary_status([ok, budget, failed]) == EXIT_ASSERTION
    assert summary_status([error]) == EXIT_ASSERTION
    assert summary([ok, failed, budget, error]) == {
        "rows": 4, "passed": 1, "failed": 1, "budget": 1, "errors": 1,
        "exit_status": EXIT_ASSERTION}


def test_tables_write_rationals_and_check_columns():
    rows = [ReportRow("b", {"ratio": Fraction(3, 2)}, {"ok": True}, STATUS_OK),
            ReportRow("a", status=STATUS_BUDGET, detail="node budget")]
    frame = rows_frame(rows)
    assert list(frame.columns) == ["instance", "status", "ratio", "check_ok", "detail"]
    csv = rows_csv(rows)
    assert csv.splitlines()[0] == "instance,status,ratio,check_ok,detail"
    assert "b,ok,3/2,pass," in csv
    doc = experiment_document(ExperimentConfig.quick("trees"), rows)
    assert doc["rows"][0]["fields"] == {"ratio": "3/2"}
    assert doc["summary"]["budget"] == 1
    assert rows_frame([]).empty


def test_path_power_sweeps_every_small_instance():
    instances = {task.instance for task in EXPERIMENTS["path-power"](ExperimentConfig("path-power"))}
    explicit = {i for i in instances if i.startswith("explicit-")}
    assert len(explicit) == sum(n // 3 * n for n in range(3, 13))
    assert {"explicit-03-1-01", "explicit-12-4-12", "lazy-27-2-3", "tau-09-3"} <= instances


def test_quick_path_power_matches_lazy_and_explicit_covers():
    rows = run_experiment(ExperimentConfig.quick("path-power", pathpower_max_n=7))
    assert len([row for row in rows if row.instance.startswith("explicit-")]) == 38
    assert all(row.passed for row in rows), [row_document(r) for r in rows if not r.passed]
    by_name = {row.instance: row for row in rows}
    assert by_name["explicit-06-2-02"].fields["kappa"] == 2
    assert by_name["explicit-07-1-01"].fields["kappa_lazy"] == 1


NAMED_VINE_GAMES = {"grid-rowcol-4", "grid-rowcol-5", "clique-grid-04", "clique-grid-09",
                    "primal-gap-R3", "primal-gap-K6", "random-K05-002", "path-power-06-1-2",
                    "path-power-06-2-2", "clique-half-06", "thicket-R3"}


def test_quick_allocation_covers_every_named_game():
    rows = run_experiment(ExperimentConfig.quick("allocation"))
    assert NAMED_VINE_GAMES <= {row.instance for row in rows}
    assert all(row.passed for row in rows), [row_document(r) for r in rows if not r.passed]


def test_quick_separators_check_allocation_decompositions():
    rows = run_experiment(ExperimentConfig.quick("separators"))
    instances = {row.instance for row in rows}
    assert {f"allocation-{name}" for name in NAMED_VINE_GAMES} <= instances
    assert "allocation-game-007" in instances
    assert all(row.passed for row in rows), [row_document(r) for r in rows if not r.passed]
    padded = [row for row in rows if "padded_nodes_separate" in row.checks]
    assert len(padded) == len(rows) - ExperimentConfig.quick("separators").separator_thickets
