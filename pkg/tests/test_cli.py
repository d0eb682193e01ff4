from __future__ import annotations

import json
import shutil
import subprocess

import pytest

from tdl.cli import run

TRIPLE = "directed 3\n1 2\n1 3\n2 1\n2 3\n3 1\n3 2\n"


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def triple_file(tmp_path):
    p = tmp_path / "triple.edges"
    p.write_text(TRIPLE)
    return p


def test_census_triple(capsys, triple_file):
    code, out, _ = call(capsys, "census", "--in", str(triple_file), "--k", "2")
    data = json.loads(out)
    assert code == 0 and data["t"] == 8 and data["round"] == 2 and data["violations"] == []


def test_census_positional_and_records(capsys, triple_file):
    code, out, _ = call(capsys, "census", str(triple_file), "--records")
    assert code == 0 and len(json.loads(out)["records"]) == 8


def test_bounds_csv(capsys):
    code, out, _ = call(capsys, "bounds", "--model", "k-out", "--k", "2", "--alpha", "0.3", "--csv")
    header, row = out.strip().splitlines()
    assert code == 0 and header.startswith("model,k,alpha")
    assert row.split(",")[4] == "0.925"


def test_construct_then_census(capsys, tmp_path):
    g = tmp_path / "g.edges"
    code, out, _ = call(capsys, "construct", "--model", "k-out", "--n", "30", "--k", "2", "--t", "16", "--out", str(g))
    assert code == 0 and json.loads(out)["census_t"] == 16
    code, out, _ = call(capsys, "census", "--in", str(g), "--k", "2")
    assert code == 0 and json.loads(out)["t"] == 16


def test_construct_alpha_rounds_half_up(capsys, caplog):
    code, out, _ = call(capsys, "construct", "--model", "general", "--n", "40", "--k", "2", "--alpha", "0.4875")
    data = json.loads(out)
    assert code == 0 and data["target"]["t"] == 20 and data["census_t"] == 20
    assert "rounded half-up" in caplog.text


def test_construct_refusal_exit_2(capsys):
    code, _, err = call(capsys, "construct", "--model", "k-out", "--n", "30", "--k", "2", "--t", "17")
    assert code == 2 and "16 and 24" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["construct", "--model", "k-out", "--n", "30", "--k", "2"],
        ["bounds", "--model", "k-out", "--k", "2"],
        ["sample", "--model", "k-out", "--n", "3", "--k", "5"],
        ["census", "/nonexistent/file.edges"],
        ["nosuchcommand"],
    ],
)
def test_usage_errors_exit_1(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 1 and err


def test_parse_error_exit_1(capsys, tmp_path):
    p = tmp_path / "bad.edges"
    p.write_text("undirected 3\n1 1\n")
    code, _, err = call(capsys, "census", str(p))
    assert code == 1 and "line 2" in err and "self-loop" in err


def test_lemma_violation_exit_3(capsys, monkeypatch, triple_file):
    # the caps are theorems, so force a violation to exercise the exit path
    import tdl.cli as cli

    monkeypatch.setattr(cli, "product_vi_holds", lambda r, k: False)
    code, out, err = call(capsys, "census", str(triple_file), "--k", "2")
    assert code == 3 and "LEMMA VIOLATION" in err
    assert json.loads(out)["violations"]


def test_census_regular_clean(capsys, tmp_path):
    p = tmp_path / "k4.edges"
    p.write_text("undirected 4\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n")
    code, out, _ = call(capsys, "census", str(p), "--model", "k-regular", "--k", "3")
    assert code == 0 and json.loads(out)["t"] == 4


def test_sample_stdout_and_repeatable(capsys):
    argv = ["sample", "--model", "k-regular", "--n", "20", "--k", "3", "--seed", "9"]
    _, first, _ = call(capsys, *argv)
    _, second, _ = call(capsys, *argv)
    assert first == second and first.startswith("undirected 20\n")


@pytest.mark.parametrize(
    "argv",
    [
        ["histogram", "--model", "k-out", "--n", "30", "--k", "2", "--mode", "mc", "--samples", "600", "--seed", "5"],
        ["poisson", "--model", "k-regular", "--n", "50", "--k", "3", "--samples", "500", "--ladder", "50,80"],
        ["coagulation", "--model", "k-out", "--n", "30", "--k", "3", "--mode", "mc", "--samples", "50", "--seed", "1"],
        ["check-lemmas", "--model", "k-out", "--n", "30", "--k", "3", "--samples", "100", "--seed", "2"],
    ],
)
def test_byte_identical_reruns(capsys, argv):
    code, first, _ = call(capsys, *argv)
    _, second, _ = call(capsys, *argv)
    assert code == 0 and first == second


def test_out_file_and_csv(capsys, tmp_path):
    target = tmp_path / "h.csv"
    code, out, _ = call(capsys, "histogram", "--model", "k-out", "--n", "4", "--k", "2", "--csv", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text().splitlines() == ["t,count", "0,3", "6,24", "8,18", "9,24", "10,12"]


def test_count_and_enumerate(capsys, tmp_path):
    code, out, _ = call(capsys, "count", "--model", "k-regular", "--n", "6", "--k", "2")
    assert code == 0 and json.loads(out)["count"] == 70
    dest = tmp_path / "all.edges"
    code, out, _ = call(capsys, "enumerate", "--model", "k-out", "--n", "4", "--k", "2", "--out", str(dest))
    assert code == 0 and json.loads(out)["graphs"] == 81
    assert dest.read_text().count("directed 4") == 81


def test_count_refused_exit_2(capsys):
    code, _, err = call(capsys, "count", "--model", "k-regular", "--n", "30", "--k", "3", "--cap", "1000")
    assert code == 2 and "exact count unavailable" in err


def test_sandwich(capsys):
    code, out, _ = call(capsys, "sandwich", "--model", "k-out", "--k", "2", "--n-list", "4,5", "--alpha", "8/5")
    rows = json.loads(out)["rows"]
    assert code == 0 and [r["class_size"] for r in rows] == [24, 2220]


@pytest.mark.skipif(shutil.which("tdl") is None, reason="console script not installed")
def test_console_script(tmp_path):
    p = tmp_path / "t.edges"
    p.write_text(TRIPLE)
    res = subprocess.run(["tdl", "census", str(p), "--k", "2"], capture_output=True, text=True, check=False)
    assert res.returncode == 0 and json.loads(res.stdout)["t"] == 8
