import csv
import json
import subprocess
import sys

import pytest

from netform.cli import build_parser, main

STAR = {"n": 4, "benefit": {"table": [1.0, 0.5, 0.25]}, "cost": {"homogeneous": 1.0}, "analysis": "efficient"}
DYN = {
    "n": 10,
    "benefit": {"delta": 0.7},
    "cost": {"state_dependent": {"base": 0.05, "alpha": 0.5}},
    "analysis": "dynamics",
    "profiles": {"capacities": [0.6] * 10},
    "params": {"heterogeneity": 1.0, "rounds": 25, "seed": 3},
}


@pytest.fixture
def write(tmp_path):
    def _write(doc, name="scenario.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
        return str(path)

    return _write


def invoke(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_efficient_star_regime(write, capsys):
    code, out, _ = invoke(capsys, "efficient", write(STAR))
    assert code == 0
    res = json.loads(out)["results"]
    assert res["regime"]["class"] == "STAR"
    assert res["graph"] == [[0, 1], [0, 2], [0, 3]]
    assert all(len(g) == 3 for g in res["enumeration"]["optimizers"])


def test_stable_cheap_links_unique(write, capsys):
    code, out, _ = invoke(capsys, "stable", write({**STAR, "cost": {"homogeneous": 0.3}}))
    res = json.loads(out)["results"]
    assert code == 0 and res["count"] == 1
    assert len(res["graphs"][0]) == 6


def test_poa(write, capsys):
    code, out, _ = invoke(capsys, "poa", write({**STAR, "cost": {"homogeneous": 0.7}}))
    assert code == 0
    assert json.loads(out)["results"]["poa"] == pytest.approx(12 / 11)


def test_missing_file(tmp_path, capsys):
    code, out, err = invoke(capsys, "efficient", str(tmp_path / "absent.json"))
    assert code == 1 and out == "" and "absent.json" in err


def test_validation_error_lists_paths(write, capsys):
    code, _, err = invoke(capsys, "efficient", write({**STAR, "cost": {"separable": [1, 2]}, "extra": 0}))
    assert code == 1
    assert "/cost/separable" in err and "/extra" in err


def test_malformed_document(write, capsys):
    code, _, err = invoke(capsys, "stable", write("{oops"))
    assert code == 1 and "malformed" in err


def test_cap_error(write, capsys):
    code, _, err = invoke(capsys, "stable", write({**STAR, "n": 9, "benefit": {"delta": 0.5}}))
    assert code == 2 and "cap" in err


def test_closed_form_past_cap(write, capsys):
    code, out, _ = invoke(capsys, "efficient", write({**STAR, "n": 12, "benefit": {"delta": 0.5}, "cost": {"homogeneous": 0.4}}))
    res = json.loads(out)["results"]
    assert code == 0 and res["enumeration"] is None and len(res["graph"]) == 11


@pytest.mark.parametrize("sub", ["efficient", "stable", "poa", "dynamics", "sweep", "check"])
def test_help_lists_flags(sub, capsys):
    with pytest.raises(SystemExit) as info:
        main([sub, "--help"])
    out = capsys.readouterr().out
    assert info.value.code == 0
    for flag in ("--out", "--format", "--seed", "--threads", "--epsilon", "--verbose"):
        assert flag in out


def test_usage_error_exits_one(capsys):
    with pytest.raises(SystemExit) as info:
        main(["efficient"])
    assert info.value.code == 1


def test_same_invocation_same_output(write, capsys):
    path = write(DYN)
    _, a, _ = invoke(capsys, "dynamics", path, "--threads", "1")
    _, b, _ = invoke(capsys, "dynamics", path, "--threads", "3")
    assert a == b


def test_seed_override_wins(write, capsys):
    path = write(DYN)
    _, a, _ = invoke(capsys, "dynamics", path)
    _, b, _ = invoke(capsys, "dynamics", path, "--seed", "99")
    assert json.loads(b)["scenario"]["params"]["seed"] == 99
    assert json.loads(a)["results"] != json.loads(b)["results"]


def test_echo_reproduces_report(write, capsys, tmp_path):
    _, first, _ = invoke(capsys, "dynamics", write(DYN), "--seed", "5", "--epsilon", "1e-10")
    echo = json.loads(first)["scenario"]
    _, second, _ = invoke(capsys, "dynamics", write(echo, "echo.json"))
    assert first == second


def test_trace(write, capsys, tmp_path):
    trace = tmp_path / "trace.jsonl"
    code, out, _ = invoke(capsys, "dynamics", write(DYN), "--trace", str(trace))
    lines = [json.loads(x) for x in trace.read_text().splitlines()]
    assert code == 0
    assert len(lines) == json.loads(out)["results"]["rounds_played"]
    assert [r["round"] for r in lines] == list(range(1, len(lines) + 1))
    assert all(isinstance(r["q"], float) for r in lines)


def test_sweep_csv(write, capsys, tmp_path):
    doc = {**DYN, "analysis": "sweep", "params": {"rounds": 5, "replications": 2, "grid": [[0, 1.2], [1, 0.3]]}}
    table = tmp_path / "sweep.csv"
    code, out, _ = invoke(capsys, "sweep", write(doc), "--csv", str(table))
    rows = list(csv.DictReader(table.open()))
    assert code == 0
    assert [r["heterogeneity"] for r in rows] == ["0.0", "1.0"]
    assert len(json.loads(out)["results"]["rows"]) == 2


def test_check(write, capsys, tmp_path):
    graph = tmp_path / "g.txt"
    graph.write_text("0 1\n0 2\n0 3\n")
    code, out, _ = invoke(capsys, "check", write(STAR), "--graph", str(graph))
    res = json.loads(out)["results"]
    assert code == 0
    assert res["efficiency"]["efficient"] and res["pairwise_stable"]


def test_check_bad_graph(write, capsys, tmp_path):
    graph = tmp_path / "g.txt"
    graph.write_text("0 7\n")
    code, _, err = invoke(capsys, "check", write(STAR), "--graph", str(graph))
    assert code == 1 and "out of range" in err


@pytest.mark.parametrize("fmt, expected", [("edgelist", "0 1\n0 2\n0 3\n"), ("json", '{"n":4,"edges":[[0,1],[0,2],[0,3]]}\n')])
def test_format_export(write, capsys, tmp_path, fmt, expected):
    report = tmp_path / "report.json"
    code, out, _ = invoke(capsys, "efficient", write(STAR), "--format", fmt, "--out", str(report))
    assert code == 0 and out == expected
    assert json.loads(report.read_text())["analysis"] == "efficient"


def test_format_without_graph(write, capsys):
    code, _, err = invoke(capsys, "poa", write(STAR), "--format", "dot")
    assert code == 1 and "no graph" in err


def test_timings_only_on_stderr(write, capsys):
    code, out, err = invoke(capsys, "efficient", write(STAR), "-v")
    assert "timing" in err and "timing" not in out


def test_thread_env_fallback(write, capsys, monkeypatch):
    monkeypatch.setenv("NETFORM_THREADS", "2")
    code, _, err = invoke(capsys, "efficient", write(STAR), "-v")
    assert code == 0 and "threads=2" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "netform", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for sub in ("efficient", "stable", "poa", "dynamics", "sweep", "check"):
        assert sub in proc.stdout


def test_parser_requires_subcommand():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])
