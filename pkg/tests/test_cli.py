import json

import pytest
from typer.testing import CliRunner

import kopt as ko
from kopt import cli
from kopt.cli import app

import tests.standard_instances as si

runner = CliRunner()


def json_lines(output: str) -> list[dict]:
    return [json.loads(line) for line in output.splitlines() if line.startswith("{")]


@pytest.fixture
def k4_file(tmp_path):
    path = tmp_path / "k4.txt"
    path.write_text(si.K4_TEXT)
    return path


@pytest.fixture
def prism_file(tmp_path):
    path = tmp_path / "prism.txt"
    path.write_text(ko.serialize_instance(si.prism()))
    return path


@pytest.mark.parametrize("alg", ["oracle", "meet", "dp", "quasi"])
def test_solve_prints_best_move(k4_file, alg):
    result = runner.invoke(app, ["solve", "--instance", str(k4_file), "--k", "2", "--alg", alg])
    assert result.exit_code == cli.EXIT_FOUND
    assert json_lines(result.stdout) == [
        {"gain": 8, "remove": [[0, 1], [2, 3]], "add": [[0, 2], [1, 3]]}
    ]


def test_solve_with_component_count(k4_file):
    result = runner.invoke(app, ["solve", "--instance", str(k4_file), "--k", "2", "--c", "1"])
    assert result.exit_code == cli.EXIT_FOUND
    assert json_lines(result.stdout)[0]["gain"] == 8


def test_solve_reports_none(prism_file):
    result = runner.invoke(app, ["solve", "--instance", str(prism_file), "--k", "3"])
    assert result.exit_code == cli.EXIT_NONE
    assert "NONE" in result.stdout


def test_solve_quasi_seven_on_unit_weights(tmp_path):
    path = tmp_path / "unit.txt"
    path.write_text(ko.serialize_instance(si.cubic(16, seed=2, max_weight=1)))
    result = runner.invoke(app, ["solve", "--instance", str(path), "--k", "7", "--alg", "quasi"])
    assert result.exit_code == cli.EXIT_NONE
    assert "NONE" in result.stdout


@pytest.mark.parametrize(
    "args",
    [
        ["--k", "8", "--alg", "k8"],
        ["--k", "7", "--alg", "k8", "--W", "5"],
        ["--k", "8", "--alg", "k8", "--W", "2"],
        ["--k", "9", "--alg", "quasi"],
    ],
)
def test_solve_usage_errors(k4_file, args):
    result = runner.invoke(app, ["solve", "--instance", str(k4_file), *args])
    assert result.exit_code == cli.EXIT_ERROR


@pytest.mark.parametrize("text", [None, "4 6 3\n0 1 2\n"])
def test_solve_unreadable_instance(tmp_path, text):
    path = tmp_path / "bad.txt"
    if text is not None:
        path.write_text(text)
    result = runner.invoke(app, ["solve", "--instance", str(path), "--k", "2"])
    assert result.exit_code == cli.EXIT_ERROR


def test_solve_surfaces_smaller_move(k4_file, monkeypatch):
    inst = si.k4_heavy()
    smaller = ko.validate_swap(inst, ko.Swap.build(inst, [0, 2], [(0, 2), (1, 3)]))

    def raising(inst, k):
        raise ko.PreconditionViolationError("smaller move", smaller)

    monkeypatch.setattr(cli, "detect_quasilinear", raising)
    result = runner.invoke(
        app, ["solve", "--instance", str(k4_file), "--k", "3", "--alg", "quasi"]
    )
    assert result.exit_code == cli.EXIT_PRECONDITION
    assert json_lines(result.stdout) == [
        {"gain": 8, "remove": [[0, 1], [2, 3]], "add": [[0, 2], [1, 3]]}
    ]


def test_local_search_writes_improved_instance(k4_file, tmp_path):
    out = tmp_path / "out.txt"
    result = runner.invoke(
        app,
        ["local-search", "--instance", str(k4_file), "--kmax", "3", "--out", str(out)],
    )
    assert result.exit_code == cli.EXIT_FOUND
    assert json_lines(result.stdout) == [
        {"k": 2, "gain": 8, "remove": [[0, 1], [2, 3]], "add": [[0, 2], [1, 3]], "weight": 4},
        {"initial_weight": 12, "final_weight": 4},
    ]
    assert ko.parse_instance(out.read_text()).tour == (0, 2, 1, 3)


def test_local_search_rerun_is_a_fixpoint(k4_file, tmp_path):
    first, second = tmp_path / "first.txt", tmp_path / "second.txt"
    runner.invoke(app, ["local-search", "--instance", str(k4_file), "--kmax", "3", "--out", str(first)])
    result = runner.invoke(
        app, ["local-search", "--instance", str(first), "--kmax", "3", "--out", str(second)]
    )
    assert result.exit_code == cli.EXIT_NONE
    assert json_lines(result.stdout) == [{"initial_weight": 4, "final_weight": 4}]
    assert second.read_text() == first.read_text()


def test_local_search_without_moves(prism_file, tmp_path):
    out = tmp_path / "out.txt"
    result = runner.invoke(
        app,
        [
            "local-search", "--instance", str(prism_file), "--kmax", "3",
            "--out", str(out), "--engine", "dp", "--strategy", "best",
        ],
    )
    assert result.exit_code == cli.EXIT_NONE
    assert json_lines(result.stdout) == [{"initial_weight": 6, "final_weight": 6}]
    assert ko.parse_instance(out.read_text()) == si.prism()


def test_local_search_rejects_best_with_quasi(k4_file, tmp_path):
    result = runner.invoke(
        app,
        [
            "local-search", "--instance", str(k4_file), "--kmax", "3",
            "--out", str(tmp_path / "out.txt"), "--strategy", "best",
        ],
    )
    assert result.exit_code == cli.EXIT_ERROR


def test_verify_prints_report():
    result = runner.invoke(app, ["verify", "--lemma", "interactions", "--k", "6", "--table"])
    assert result.exit_code == cli.EXIT_FOUND
    (report,) = json_lines(result.stdout)
    assert report["lemma"] == "interactions"
    assert report["total"] == 3840
    assert report["passed"] is True


@pytest.mark.parametrize(
    "alias,name", [("5.3", "interactions"), ("interactions", "interactions"), ("5.4", "adjacent-swap")]
)
def test_verify_accepts_numbered_aliases(alias, name):
    result = runner.invoke(app, ["verify", "--lemma", alias, "--k", "6"])
    assert result.exit_code == cli.EXIT_FOUND
    (report,) = json_lines(result.stdout)
    assert report["lemma"] == name
    assert report["violations"] == []


@pytest.mark.parametrize("lemma", ["5.5", "pair"])
def test_verify_rejects_unknown_lemma(lemma):
    result = runner.invoke(app, ["verify", "--lemma", lemma])
    assert result.exit_code == cli.EXIT_ERROR


@pytest.mark.slow
def test_verify_pair_relax_by_number():
    result = runner.invoke(app, ["verify", "--lemma", "5.7"])
    assert result.exit_code == cli.EXIT_FOUND
    (report,) = json_lines(result.stdout)
    assert report["lemma"] == "pair-relax"
    assert (report["total"], report["matching"]) == (645120, 136)
    assert report["violations"] == []
    assert report["passed"] is True


def test_verify_rejects_out_of_range_k():
    result = runner.invoke(app, ["verify", "--lemma", "adjacent-swap", "--k", "9"])
    assert result.exit_code == cli.EXIT_ERROR


def test_gen_triangle(tmp_path):
    graph = tmp_path / "g.txt"
    graph.write_text(si.TRIPARTITE_TEXT)
    out = tmp_path / "tri.txt"
    result = runner.invoke(app, ["gen", "triangle", str(graph), "--out", str(out)])
    assert result.exit_code == cli.EXIT_FOUND
    assert json_lines(result.stdout) == [{"n": 63, "catalogue": 7}]
    assert ko.parse_instance(out.read_text()).n == 63
    manifest = json.loads((tmp_path / "tri.txt.json").read_text())
    assert manifest["reduction"] == "triangle"
    assert len(manifest["catalogue"]) == 7


def test_gen_triangle_negative_mode_with_manifest_path(tmp_path):
    graph = tmp_path / "g.txt"
    graph.write_text("A 1\nB 2\nC 3\nedge 1 2 -1\nedge 2 3 -1\nedge 3 1 -1\n")
    manifest = tmp_path / "m.json"
    result = runner.invoke(
        app,
        [
            "gen", "triangle", str(graph), "--out", str(tmp_path / "t.txt"),
            "--manifest", str(manifest), "--mode", "negative",
        ],
    )
    assert result.exit_code == cli.EXIT_FOUND
    assert json.loads(manifest.read_text())["mode"] == "negative"


def test_gen_subiso(tmp_path):
    graph = tmp_path / "h.txt"
    graph.write_text(si.SUBISO_TEXT)
    out = tmp_path / "sub.txt"
    result = runner.invoke(app, ["gen", "subiso", str(graph), "--out", str(out)])
    assert result.exit_code == cli.EXIT_FOUND
    assert json_lines(result.stdout) == [{"n": 155, "beta": 165, "L": 9, "k_prime": 52}]
    assert ko.parse_instance(out.read_text()).total_weight == 165


@pytest.mark.parametrize("command", ["triangle", "subiso"])
def test_gen_rejects_bad_input(tmp_path, command):
    graph = tmp_path / "g.txt"
    graph.write_text("nonsense 1 2\n")
    result = runner.invoke(app, ["gen", command, str(graph), "--out", str(tmp_path / "o")])
    assert result.exit_code == cli.EXIT_ERROR


def test_bench_prints_one_line_per_size():
    result = runner.invoke(
        app, ["bench", "--sizes", "12,16", "--alg", "meet", "--k", "3", "--seed", "1"]
    )
    assert result.exit_code == cli.EXIT_FOUND
    lines = json_lines(result.stdout)
    assert [line["n"] for line in lines] == [12, 16]
    assert lines[0]["ratio"] is None
    assert all(line["alg"] == "meet" and line["k"] == 3 for line in lines)


def test_bench_rejects_bad_sizes():
    result = runner.invoke(app, ["bench", "--sizes", "ten"])
    assert result.exit_code == cli.EXIT_ERROR
