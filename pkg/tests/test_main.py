import json

import pytest

import documents
from main import main
from solver_errors import EXIT_ASSERTION, EXIT_BUDGET, EXIT_INPUT, EXIT_OK


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_graph(capsys, tmp_path, family, *params):
    path = tmp_path / f"{family}{''.join(params)}.txt"
    assert run(capsys, "generate", "graph", family, *params, "--out", str(path))[0] == EXIT_OK
    return str(path)


def write_game(capsys, tmp_path, construction, *params):
    path = tmp_path / f"{construction}{''.join(params)}.json"
    assert run(capsys, "generate", "game", construction, *params, "--out", str(path))[0] == EXIT_OK
    return str(path)


def test_generate_graph_prints_an_edge_list(capsys):
    code, out, _ = run(capsys, "generate", "graph", "grid", "3")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "9 12"
    assert lines[1] == "0 1"


@pytest.mark.parametrize("family, params, expected", [
    ("grid", ("3",), {"tau": 3, "nu": 3, "omega": 3}),
    ("clique", ("5",), {"tau": 3, "nu": 3, "omega": 4, "d": 4}),
    ("star", ("6",), {"tau": 1, "nu": 1, "omega": 1, "d": 6}),
])
def test_params(capsys, tmp_path, family, params, expected):
    graph = write_graph(capsys, tmp_path, family, *params)
    code, out, err = run(capsys, "params", graph)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert {k: doc[k] for k in expected} == expected
    assert "HASH: " in err


@pytest.mark.parametrize("construction, params, ratio", [
    ("thicket", ("grid", "3"), "3/1"),
    ("clique-half", ("4",), "3/2"),
])
def test_gaps(capsys, tmp_path, construction, params, ratio):
    game = write_game(capsys, tmp_path, construction, *params)
    code, out, _ = run(capsys, "gaps", game, "--compute-tau")
    assert code == EXIT_OK
    assert json.loads(out)["ratio_pc"] == ratio


def test_gaps_assert_tau_failure(capsys, tmp_path):
    game = write_game(capsys, tmp_path, "clique-half", "4")
    code, _, err = run(capsys, "gaps", game, "--assert-tau", "1")
    assert code == EXIT_ASSERTION
    assert "pc_le_tau: FAIL" in err


def test_malformed_game_is_an_input_error(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"graph": "2 1\n0 1\n", "coalitions": [], "bogus": 1}))
    code, _, err = run(capsys, "gaps", str(path))
    assert code == EXIT_INPUT
    assert "error: unknown game document fields" in err


def test_disconnected_coalition_is_an_input_error(capsys, tmp_path):
    path = tmp_path / "disconnected.json"
    path.write_text(json.dumps({"graph": "3 2\n0 1\n1 2\n",
                                "coalitions": [{"members": [0, 2], "value": 1}]}))
    assert run(capsys, "gaps", str(path))[0] == EXIT_INPUT


def test_width_budget_is_exit_3(capsys, tmp_path):
    graph = write_graph(capsys, tmp_path, "clique", "10")
    code, _, err = run(capsys, "params", graph)
    assert code == EXIT_BUDGET
    assert "budget" in err


def test_bad_arguments(capsys, tmp_path):
    assert run(capsys, "generate", "graph", "hexagon", "3")[0] == EXIT_INPUT
    assert run(capsys, "generate", "graph", "grid", "x")[0] == EXIT_INPUT
    graph = write_graph(capsys, tmp_path, "path", "3")
    assert run(capsys, "params", graph, "--budget-nodes", "0")[0] == EXIT_INPUT
    assert run(capsys, "params", str(tmp_path / "missing.txt"))[0] == EXIT_INPUT


@pytest.mark.parametrize("suffix", [".json", ".cbor"])
def test_verify_cert_round_trip(capsys, tmp_path, suffix):
    graph = write_graph(capsys, tmp_path, "grid", "3")
    bundle = str(tmp_path / f"bundle{suffix}")
    assert run(capsys, "params", graph, "--out", bundle)[0] == EXIT_OK
    code, out, _ = run(capsys, "verify-cert", bundle)
    assert code == EXIT_OK
    assert "certificate 0 (thicket): valid" in out
    assert "INVALID" not in out


def test_verify_cert_flags_tampering(capsys, tmp_path):
    graph = write_graph(capsys, tmp_path, "grid", "3")
    bundle = tmp_path / "bundle.json"
    run(capsys, "params", graph, "--out", str(bundle))
    doc = json.loads(bundle.read_text())
    doc["certificates"][0]["hitting_size"] = 2
    bundle.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "verify-cert", str(bundle))
    assert code == EXIT_ASSERTION
    assert "certificate 0 (thicket): INVALID" in out
    assert "claimed hitting size 2, actual 3" in out


def test_allocate_then_verify(capsys, tmp_path):
    game = write_game(capsys, tmp_path, "clique-half", "4")
    for method in ("vine", "sqrt"):
        bundle = str(tmp_path / f"{method}.json")
        assert run(capsys, "allocate", game, "--method", method, "--out", bundle)[0] == EXIT_OK
        code, out, _ = run(capsys, "verify-cert", bundle)
        assert code == EXIT_OK, out


def test_reproduce_quick_csv(capsys):
    code, out, err = run(capsys, "reproduce", "dual-grid", "--quick", "--format", "csv")
    assert code == EXIT_OK
    assert out.splitlines()[0].startswith("instance,status,")
    assert len(out.splitlines()) == 6
    assert "5/5 passed" in err


def test_reproduce_writes_tables(capsys, tmp_path):
    out_dir = tmp_path / "tables"
    code, _, _ = run(capsys, "reproduce", "trees", "--quick", "--out", str(out_dir))
    assert code == EXIT_OK
    doc = json.loads((out_dir / "trees.json").read_text())
    assert doc["summary"]["rows"] == 6
    assert (out_dir / "trees.csv").read_text().startswith("instance,status,")


def test_log_tees_output_into_logs(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out, _ = run(capsys, "generate", "graph", "path", "3", "--log")
    assert code == EXIT_OK
    logs = list((tmp_path / "logs").glob("generate_*.txt"))
    assert len(logs) == 1
    text = logs[0].read_text()
    assert "3 2\n0 1\n1 2\n" in text
    assert out.startswith("3 2\n")


def test_verify_cert_reports_out_of_range_realizers(capsys, tmp_path):
    graph = write_graph(capsys, tmp_path, "path", "3")
    bundle = tmp_path / "bundle.json"
    run(capsys, "params", graph, "--out", str(bundle))
    doc = json.loads(bundle.read_text())
    shatter = next(c for c in doc["certificates"] if c["kind"] == "shatter")
    shatter["realizers"][0]["realizer"] = [5]
    doc["certificates"].append("thicket")
    bundle.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "verify-cert", str(bundle))
    assert code == EXIT_ASSERTION
    assert "(shatter): INVALID" in out
    assert "out-of-range vertices [5]" in out
    assert "certificate must be an object, got str" in out


def test_non_list_coalitions_are_an_input_error(capsys, tmp_path):
    path = tmp_path / "five.json"
    path.write_text(json.dumps({"graph": "2 1\n0 1\n", "coalitions": 5}))
    code, _, err = run(capsys, "gaps", str(path))
    assert code == EXIT_INPUT
    assert "coalitions must be a list" in err


def test_malformed_vine_bundle_is_an_input_error(capsys, tmp_path):
    game = write_game(capsys, tmp_path, "clique-half", "4")
    vine = tmp_path / "vine.json"
    vine.write_text(json.dumps({"graph": "4 0\n", "certificates": [
        {"kind": "vine", "labels": [[0, 1], [2, "x"]], "links": [[0, 1]]}]}))
    code, _, err = run(capsys, "allocate", game, "--vine", str(vine))
    assert code == EXIT_INPUT
    assert "vine certificate does not fit" in err
    vine.write_text(json.dumps([1, 2]))
    assert run(capsys, "allocate", game, "--vine", str(vine))[0] == EXIT_INPUT


def test_unexpected_structure_errors_exit_as_input_errors(capsys, tmp_path, monkeypatch):
    def broken(path):
        return {}["graph"]
    monkeypatch.setattr(documents, "load_graph", broken)
    code, _, err = run(capsys, "params", str(tmp_path / "g.txt"))
    assert code == EXIT_INPUT
    assert "error: malformed input: KeyError('graph')" in err
