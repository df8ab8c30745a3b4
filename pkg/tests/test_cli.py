import json

import pytest

from loosecycle.cli import main
from loosecycle.hgraph import read_khg


@pytest.fixture
def files(tmp_path):
    def gen(name, *args):
        path = tmp_path / name
        assert main(["gen", *args, "--out", str(path)]) == 0
        return str(path)
    return tmp_path, gen


def test_gen_and_degree(files, capsys):
    tmp, gen = files
    path = gen("e12.khg", "--kind", "extremal", "--n", "12")
    assert len(read_khg(path)) == 165
    assert main(["degree", "--input", path, "--s", "3"]) == 0
    assert capsys.readouterr().out.strip() == "1"
    assert main(["degree", "--input", path, "--set", "1,2,3"]) == 0
    assert capsys.readouterr().out.strip() == "1"


def test_gen_random_json(files):
    tmp, gen = files
    path = gen("r.json", "--kind", "random", "--n", "9", "--delta", "1", "--format", "json")
    assert len(json.loads(open(path).read())["edges"]) == 126


def test_solve_exit_codes(files, capsys):
    tmp, gen = files
    c = gen("c12.khg", "--kind", "complete", "--n", "12")
    e = gen("e12.khg", "--kind", "extremal", "--n", "12")
    assert main(["solve", "--input", c, "--ell", "1"]) == 0
    assert capsys.readouterr().out.startswith("cycle 1 ")
    assert main(["solve", "--input", e, "--ell", "1"]) == 1
    assert main(["solve", "--input", e, "--ell", "1", "--budget-nodes", "3"]) == 2


def test_absorb(files, capsys):
    tmp, gen = files
    c = gen("c13.khg", "--kind", "complete", "--n", "13")
    assert main(["absorb", "--input", c, "--ell", "1", "--target", "0,1,2"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert len(rec["P"]) == 10 and rec["S"] == [0, 1, 2]


def test_connect(files, capsys):
    tmp, gen = files
    c = gen("c20.khg", "--kind", "complete", "--n", "20")
    (tmp / "pairs").write_text("0;1\n2;3\n")
    (tmp / "res").write_text(" ".join(map(str, range(4, 20))))
    assert main(["connect", "--input", c, "--ell", "1", "--pairs", str(tmp / "pairs"),
                 "--reservoir", str(tmp / "res")]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 2 and out[0].startswith("path 1 0 ")
    (tmp / "bad").write_text("0 1\n")
    assert main(["connect", "--input", c, "--ell", "1", "--pairs", str(tmp / "bad"),
                 "--reservoir", str(tmp / "res")]) == 1
    assert "line 1:" in capsys.readouterr().err


def test_tile_and_validate(files, capsys):
    tmp, gen = files
    c = gen("c8.khg", "--kind", "complete", "--n", "8")
    out = tmp / "t.tiling"
    assert main(["tile", "--input", c, "--ell", "1", "--beta", "1/16", "--improve", "1",
                 "--out", str(out)]) == 0
    assert main(["validate", str(out), "--input", c]) == 0
    assert ": ok" in capsys.readouterr().out
    assert main(["tile", "--input", c, "--ell", "1", "--extremality", "1/100"]) == 1
    e = gen("e12.khg", "--kind", "extremal", "--n", "12")
    assert main(["tile", "--input", e, "--ell", "1", "--beta", "1/4", "--extremality", "1/5"]) == 0


def test_regular(files, capsys):
    tmp, gen = files
    c = gen("c16.khg", "--kind", "complete", "--n", "16")
    part = tmp / "p.part"
    part.write_text("8 2\n" + "\n".join(f"{2 * i} {2 * i + 1}" for i in range(8)) + "\n")
    out = tmp / "r.khg"
    assert main(["regular", "--input", c, "--partition", str(part), "--out", str(out)]) == 0
    assert len(read_khg(out)) == 70
    assert main(["regular", "--input", c, "--partition", str(part), "--d", "1/10",
                 "--inherit", "9/10", "--epsilon", "1/100"]) == 1
    assert main(["validate", str(part), "--input", c]) == 0


def test_pipeline_cli(files, capsys):
    tmp, gen = files
    c = gen("c15.khg", "--kind", "complete", "--n", "15")
    assert main(["pipeline", "--input", c, "--ell", "1"]) == 0
    assert capsys.readouterr().out.startswith("cycle 1 ")
    e = gen("e12.khg", "--kind", "extremal", "--n", "12")
    assert main(["pipeline", "--input", e, "--ell", "1", "--format", "json"]) == 3
    rec = json.loads(capsys.readouterr().out)
    assert rec["status"] == "extremal" and rec["witness"]["extremal"] == "yes"


def test_sweep_cli(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert main(["sweep", "--n", "9", "--delta", "0,1", "--seeds", "0-2", "--out", str(out),
                     "--summary", str(tmp_path / "s.csv")]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().startswith("n,k,ell,delta_fraction,seed,hamiltonian,nodes,millis\n")


def test_validate_reports_failures(files, capsys):
    tmp, gen = files
    c = gen("c12.khg", "--kind", "complete", "--n", "12")
    e = gen("e12.khg", "--kind", "extremal", "--n", "12")
    walk = tmp / "w.walk"
    walk.write_text("cycle 1 " + " ".join(map(str, range(12))) + "\n")
    assert main(["validate", str(walk), "--input", c]) == 0
    assert main(["validate", str(walk), "--input", e]) == 1
    assert "FAIL line 1:" in capsys.readouterr().out
    bad = tmp / "bad.khg"
    bad.write_text("4 6\n0 1 2\n")
    assert main(["validate", str(bad)]) == 1
    assert "line 2:" in capsys.readouterr().out


def test_bad_input_is_an_error(tmp_path, capsys):
    bad = tmp_path / "bad.khg"
    bad.write_text("4 6\n0 1 2 9\n")
    assert main(["degree", "--input", str(bad)]) == 1
    assert "error: line 2:" in capsys.readouterr().err
