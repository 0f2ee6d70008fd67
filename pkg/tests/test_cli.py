import json
import os

import pytest

from permvc.cli import SCHEMA_VERSION, main

from conftest import run_cli


def call(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def call_json(capsys, *argv):
    code, out, err = call(capsys, *argv, "--json")
    data = json.loads(out)
    assert data["schemaVersion"] == SCHEMA_VERSION
    return code, data


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def test_ack_examples(capsys):
    assert call(capsys, "ack", "alpha", "--m", 8) == (0, "2\n", "")
    assert call(capsys, "ack", "alphad", "--d", 2, "--m", 8)[1] == "3\n"
    assert call(capsys, "ack", "R", "--s", 5, "--d", 3)[1] == "25\n"
    assert call(capsys, "ack", "D", "--s", 4, "--d", 3)[1] == "27\n"
    code, data = call_json(capsys, "ack", "derived", "--kind", "gamma", "--args", "k=3,n=8")
    assert data["value"] == 1248 and data["cPrime"] == "1" and "placeholder" in data["provenance"]
    code, data = call_json(capsys, "ack", "derived", "--kind", "gamma", "--args", "k=2,n=6", "--cprime", "1/5")
    assert data["value"] == "168/5"


def test_ack_verify(capsys):
    code, data = call_json(capsys, "ack", "verify", "--m-max", 300)
    assert code == 0 and data["alphaMismatchCount"] == 0 and data["d3ClosedFormFailures"] == []


def test_ds_matrix_grid(capsys):
    code, out, _ = call(capsys, "patterns", "ds-matrix", "--s", 4)
    assert code == 0 and out == "4 2\n01\n10\n01\n10\n"


def test_contains_and_exit_codes(capsys, files):
    host = files("h.txt", "2 2\n11\n11\n")
    ident = files("i.txt", "2 2\n10\n01\n")
    j2 = files("j.txt", "2 2\n01\n10\n")
    code, data = call_json(capsys, "patterns", "contains", "--host", host, "--pattern", j2)
    assert code == 0 and data["witness"] == {"rows": [1, 2], "cols": [1, 2]}
    code, out, _ = call(capsys, "patterns", "contains", "--host", ident, "--pattern", j2)
    assert code == 1 and out == "absent\n"
    assert call(capsys, "patterns", "contains", "--host", host, "--pattern", "DS3")[0] == 1


def test_formation_commands(capsys, files):
    host = files("h.txt", "4 2\n11\n11\n11\n11\n")
    code, data = call_json(capsys, "patterns", "formation", "--matrix", host, "--r", 2, "--s", 2, "--mode", "fat", "--B", 2)
    assert code == 0
    assert data["witness"]["columns"] == [1, 2] and data["witness"]["partition"] == [[1, 2], [3, 4]]
    assert len(data["witness"]["cells"]) == 8
    code, data = call_json(capsys, "patterns", "formation", "--matrix", host, "--s", 4, "--widest")
    assert data["witness"]["columns"] == [1, 2]
    assert call(capsys, "patterns", "formation", "--matrix", host, "--s", 2)[0] == 2
    ident = files("i.txt", "3 3\n100\n010\n001\n")
    assert call(capsys, "patterns", "split", "--matrix", ident, "--r", 1, "--s", 2)[0] == 1
    assert call(capsys, "patterns", "split", "--matrix", host, "--r", 1, "--s", 2)[0] == 0


def test_sequence_commands(capsys, files):
    m = files("m.txt", "2 3\n101\n010\n")
    assert call(capsys, "patterns", "mst", "--matrix", m)[1] == "1 3 | 2\n"
    s = files("s.txt", "1 2 1 3\n")
    code, data = call_json(capsys, "patterns", "sparsify", "--sequence", s, "--r", 3)
    assert data["sequence"] == [1, 3] and data["removed"] == 2
    ab = files("ab.txt", "a b a b a\n")
    assert call(capsys, "patterns", "is-ds", "--sequence", ab, "--s", 3)[1] == "false\n"
    seq = files("c.txt", "c a | c\n")
    assert call(capsys, "construct", "smt", "--sequence", seq)[1] == "2 2\n11\n10\n"


def test_vcdim_commands(capsys, files, tmp_path):
    fam = files("f.txt", "2 2\n1 2\n2 1\n")
    assert call(capsys, "vcdim", "compute", "--family", fam)[1] == "2\n"
    assert call(capsys, "vcdim", "shattered", "--family", fam, "--positions", "1,2")[1] == "true\n"
    assert call(capsys, "vcdim", "shattered", "--family", fam, "--positions", "1,3")[0] == 2
    full = files("a.txt", "3 3\n011\n111\n111\n")
    code, data = call_json(capsys, "vcdim", "fullness", "--matrix", full)
    assert data["value"] == 2


def test_compress_command(capsys, tmp_path):
    code, out, _ = call(capsys, "vcdim", "synthetic", "--seed", 0)
    fam = tmp_path / "fam.txt"
    fam.write_text(out)
    trace, fig = tmp_path / "t.json", tmp_path / "t.png"
    code, data = call_json(capsys, "vcdim", "compress", "--family", fam, "--k", 2, "--gamma", "7/4",
                           "--trace", trace, "--figure", fig)
    assert code == 0
    assert json.loads(trace.read_text())["phases"] == data["phases"]
    assert all(ph["withinBound"] for ph in data["phases"])
    assert fig.stat().st_size > 1000
    all4 = tmp_path / "all.txt"
    all4.write_text("6 3\n1 2 3\n1 3 2\n2 1 3\n2 3 1\n3 1 2\n3 2 1\n")
    assert call(capsys, "vcdim", "compress", "--family", all4, "--k", 2)[0] == 2


def test_construct_commands(capsys, files):
    assert call(capsys, "construct", "j2", "--perm", "2,1")[1] == "4 4\n0001\n0010\n0100\n1000\n"
    code, data = call_json(capsys, "construct", "flatten", "--perm", "1,2", "--drop", 4)
    assert data["count"] == 4
    code, data = call_json(capsys, "construct", "phi", "--l", 2)
    assert data["count"] == 2 and sorted(len(s) for s in data["sets"]) == [1, 2]
    assert call(capsys, "construct", "phi", "--l", 5)[0] == 2
    j2 = files("j.txt", "2 2\n01\n10\n")
    assert call(capsys, "construct", "tile", "--matrix", j2, "--n", 4)[1] == "4 4\n0100\n1000\n0001\n0010\n"
    ones = files("o.txt", "2 2\n11\n11\n")
    assert call(capsys, "construct", "family", "--matrix", ones)[1] == "2 2\n1 2\n2 1\n"
    code, data = call_json(capsys, "construct", "gends3", "--n", 4, "--mult", 2)
    assert code == 0 and sorted(x for b in data["blocks"] for x in b) == [1, 1, 2, 2, 3, 3, 4, 4]
    code, data = call_json(capsys, "construct", "gends3", "--n", 3, "--mult", 3)
    assert code == 1 and data["reason"] == "infeasible"


def test_oracle_commands(capsys):
    code, data = call_json(capsys, "oracle", "p", "--k", 2, "--n", 3)
    assert code == 0 and data["value"] == 8 and data["witness"]["grid"]
    code, data = call_json(capsys, "oracle", "mex", "--pattern", "DS3", "--n", 3, "--method", "exhaustive")
    assert data["value"] == 7
    code, data = call_json(capsys, "oracle", "r", "--k", 2, "--n", 3)
    assert data["value"] == 5 and data["exactly_k"] == 5
    assert call(capsys, "oracle", "lambda", "--s", 2, "--n", 3)[1].startswith("5\n")
    code, data = call_json(capsys, "oracle", "delta", "--r", 2, "--s", 3, "--k", 3, "--m", 4)
    assert data["value"] == "infinite"
    code, data = call_json(capsys, "oracle", "seq", "--kind", "F", "--r", 2, "--s", 3, "--size", 2)
    assert data["value"] == 5
    assert call(capsys, "oracle", "mex", "--pattern", "DS3", "--n", 9)[0] == 2
    code, data = call_json(capsys, "oracle", "p", "--k", 2, "--n", 6, "--node-limit", 20)
    assert data["exact"] is False


def test_hunt_exit_codes(capsys):
    code, data = call_json(capsys, "oracle", "hunt", "--lemma", "todslargeeven", "--param", 2, "--budget", 200)
    assert code == 0 and data["violationCount"] == 0
    code, data = call_json(capsys, "oracle", "hunt", "--lemma", "todslargeodd", "--param", 1, "--budget", 300)
    assert code == 1 and data["violationCount"] > 0


def test_usage_errors_are_one_line(capsys, files):
    bad = files("bad.txt", "2 2\n01\n2 \n")
    for argv in (["bogus"], ["ack", "alpha"], ["ack", "alpha", "--m", "x"], ["patterns", "mst", "--matrix", "/nonexistent"],
                 ["patterns", "mst", "--matrix", bad], ["ack", "derived", "--kind", "beta", "--args", "s=3"],
                 ["ack", "alphad", "--d", "0", "--m", "3"]):
        code, out, err = call(capsys, *argv)
        assert code == 2, argv
        assert out == "" and err.count("\n") == 1 and "error" in err


def test_workers_default_from_environment(monkeypatch, capsys):
    from permvc import cli

    seen = {}
    real = cli.oracle.brute_p

    def spy(k, n, budget):
        seen["workers"] = budget.workers
        return real(k, n, budget)

    monkeypatch.setattr(cli.oracle, "brute_p", spy)
    monkeypatch.setenv("PERMVC_DEFAULT_WORKERS", "3")
    call(capsys, "oracle", "p", "--k", 2, "--n", 3)
    assert seen["workers"] == 3
    call(capsys, "oracle", "p", "--k", 2, "--n", 3, "--workers", 2)
    assert seen["workers"] == 2


def test_report_writes_csv_and_png(capsys, tmp_path):
    out = tmp_path / "rep"
    code, data = call_json(capsys, "report", "--out", out, "--parts", "alpha,compression", "--seeds", 3)
    assert code == 0 and data["command"] == "report"
    for part in ("alpha", "compression"):
        assert (out / f"{part}.csv").read_text().count("\n") > 2
        assert (out / f"{part}.png").read_bytes()[:4] == b"\x89PNG"


def test_entry_point_subprocess():
    code, out, err = run_cli("ack", "alpha", "--m", 8)
    assert (code, out) == (0, "2\n")
    code, out, err = run_cli("patterns", "mst", "--matrix", "-", stdin="2 2\n11\n01\n")
    assert (code, out) == (0, "1 2 | 2\n")
