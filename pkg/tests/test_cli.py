import csv
import io
import json
import subprocess
import sys

import pytest

from fairdecomp.cli import main


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def grid_file(tmp_path, capsys):
    path = tmp_path / "g.json"
    assert run(["gen", "--kind", "grid", "--w", 8, "--h", 8, "--out", path], capsys)[0] == 0
    return path


@pytest.fixture
def ce_file(tmp_path, capsys):
    path = tmp_path / "ce.json"
    assert run(["gen", "--kind", "counterexample", "--d", 2, "--out", path], capsys)[0] == 0
    return path


def test_estimate_one_row_per_edge(grid_file, tmp_path, capsys):
    out = tmp_path / "stats.csv"
    code, _, _ = run(["estimate", "--graph", grid_file, "--algo", "randwts", "--R", 5, "--pairs", "edges",
                      "--trials", 100, "--seed", 7, "--out", out], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 2 * 8 * 7
    assert all(r["trials"] == "100" for r in rows)


def test_counterexample_row_has_zero_hits(ce_file, capsys):
    code, out, _ = run(["estimate", "--graph", ce_file, "--algo", "kpr", "--R", 5, "--roots", "adversarial",
                        "--trials", 2000], capsys)
    assert code == 0
    first = next(csv.DictReader(io.StringIO(out)))
    assert (first["u"], first["v"], first["hits"]) == ("3", "4", "0")


def test_oracle_prints_seven_eighths(capsys):
    code, out, _ = run(["oracle", "--n", 2, "--R", 2, "--phases", 3], capsys)
    assert code == 0
    assert out.splitlines()[1] == "0,1,0.875,7/8"


def test_missing_file_exit_1(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    code, _, err = run(["estimate", "--graph", missing, "--R", 3], capsys)
    assert code == 1 and str(missing) in err


def test_usage_errors_exit_2_without_writing(grid_file, tmp_path, capsys):
    out = tmp_path / "o.json"
    cases = [
        ["decompose", "--graph", grid_file, "--R", 0, "--out", out],
        ["decompose", "--graph", grid_file, "--R", 3, "--algo", "nope", "--out", out],
        ["decompose", "--graph", grid_file, "--R", 3, "--format", "xml", "--out", out],
        ["estimate", "--graph", grid_file, "--R", 3, "--pairs", "1-x", "--out", out],
        ["estimate", "--graph", grid_file, "--R", 3, "--trials", 0, "--out", out],
        ["repro", "bogus", "--graph", grid_file, "--out", out],
        ["gen", "--kind", "grid", "--w", 3, "--out", out],
        ["oracle", "--n", 30, "--R", 2, "--out", out],
        ["decompose", "--graph", grid_file, "--R", 3, "--algo", "grid_axis", "--grid", 3, 3, "--out", out],
        ["bogus"],
    ]
    for argv in cases:
        code, _, err = run(argv, capsys)
        assert code == 2, argv
        assert err
        assert not out.exists(), argv


def test_adversarial_needs_marks(grid_file, capsys):
    code, _, err = run(["decompose", "--graph", grid_file, "--R", 3, "--roots", "adversarial"], capsys)
    assert code == 1 and "marks" in err


def test_bad_graph_file_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1 2\n")
    code, _, err = run(["decompose", "--graph", bad, "--R", 3], capsys)
    assert code == 1 and "line 1" in err


def test_byte_identical_and_worker_independent(grid_file, tmp_path, capsys):
    outs = []
    for i, workers in enumerate((1, 1, 3)):
        out = tmp_path / f"s{i}.csv"
        argv = ["estimate", "--graph", grid_file, "--algo", "two_cuts", "--R", 4, "--trials", 40,
                "--seed", 3, "--workers", workers, "--out", out]
        assert run(argv, capsys)[0] == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_seed_env_fallback(grid_file, monkeypatch, capsys):
    monkeypatch.setenv("FAIRDECOMP_SEED", "9")
    a = run(["decompose", "--graph", grid_file, "--R", 3], capsys)[1]
    b = run(["decompose", "--graph", grid_file, "--R", 3, "--seed", 9], capsys)[1]
    assert a == b and json.loads(a)["seed"] == 9
    monkeypatch.setenv("FAIRDECOMP_SEED", "x")
    assert run(["decompose", "--graph", grid_file, "--R", 3], capsys)[0] == 2


def test_edge_list_round_trip(tmp_path, capsys):
    path = tmp_path / "p.txt"
    assert run(["gen", "--kind", "path", "--n", 5, "--format", "edge_list", "--out", path], capsys)[0] == 0
    assert path.read_text().startswith("# n=5\n0 1\n")
    code, out, _ = run(["decompose", "--graph", path, "--R", 1], capsys)
    assert code == 0 and len(json.loads(out)["clusters"]) == 5


def test_summarize_and_repro(grid_file, tmp_path, capsys):
    code, out, _ = run(["summarize", "--graph", grid_file, "--algo", "randwts", "--R", 3, "--trials", 10], capsys)
    assert code == 0 and json.loads(out)["within_bound"] is True

    code, out, _ = run(["repro", "gaussian", "--graph", grid_file, "--runs", 30], capsys)
    bundle = json.loads(out)
    assert code == 0 and bundle["R"] == 5
    for name in ("kpr", "randwts"):
        assert sum(b["count"] for b in bundle[name]["histogram"]["bins"]) == 2 * 8 * 7

    code, out, _ = run(["repro", "numclusters", "--graph", grid_file, "--runs", 12], capsys)
    assert code == 0 and json.loads(out)["n_over_R"] == 64 / 5

    code, out, _ = run(["repro", "maxdiam", "--graph", grid_file, "--runs", 12], capsys)
    res = json.loads(out)
    assert res["within_bound"] and res["max_diameter_over_R"]["max"] <= res["bound_over_R"]


def test_embed(grid_file, tmp_path, capsys):
    out, rep = tmp_path / "pts.json", tmp_path / "rep.json"
    code, _, _ = run(["embed", "--graph", grid_file, "--kind", "euclidean", "--out", out, "--report", rep], capsys)
    assert code == 0
    assert json.loads(rep.read_text())["min_ratio"] >= 1.0
    assert len(json.loads(out.read_text())["points"]) == 64
    code, _, err = run(["embed", "--graph", grid_file, "--kind", "l1", "--grid", 8, 8, "--m", 4,
                        "--format", "csv"], capsys)
    assert code == 0 and "max_ratio" in err


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "fairdecomp", "oracle", "--n", "3", "--R", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("u,v,p,exact")
    proc = subprocess.run([sys.executable, "-m", "fairdecomp", "estimate"], capture_output=True, text=True)
    assert proc.returncode == 2 and "required" in proc.stderr
