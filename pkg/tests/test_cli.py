import json

import pytest

from gridcube import cli

K1 = {"kind": "matrix", "blocks": [[["1", "-1/2"], ["1", "0"]], [["-1/2", "1"]]]}
MDP1 = {
    "kind": "mdp",
    "gamma": "1/2",
    "states": [{"actions": [{"reward": "1", "probs": ["1"]}, {"reward": "2", "probs": ["1"]}]}],
}
GLCP1 = {"kind": "glcp", "M": {"blocks": [[["1/2"], ["1/2"]]]}, "q": ["-1", "-2"]}


def write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def read(path):
    with open(path) as fh:
        return json.load(fh)


def test_classify(tmp_path, capsys):
    f = write(tmp_path, "k1.json", K1)
    out = str(tmp_path / "report.json")
    assert cli.main(["classify", f, "--out", out]) == 0
    text = capsys.readouterr().out
    assert "K: yes" in text
    assert read(out)["is_k"] is True


def test_witness_cmd(tmp_path):
    f = write(tmp_path, "k1.json", K1)
    out = str(tmp_path / "wit.json")
    assert cli.main(["witness", f, "--out", out]) == 0
    wit = read(out)
    assert wit["kind"] == "witness" and wit["gamma"] == "1/2"


def test_witness_negative(tmp_path, capsys):
    f = write(tmp_path, "m.json", {"blocks": [[["1", "-2"]], [["-2", "1"]]]})
    assert cli.main(["witness", f]) == 1
    assert "not hidden K" in capsys.readouterr().out


def test_solve_and_verify(tmp_path):
    f = write(tmp_path, "mdp1.json", MDP1)
    out = str(tmp_path / "sol.json")
    assert cli.main(["solve", f, "--oracle", "--out", out]) == 0
    sol = read(out)
    assert sol["values"] == ["4"]
    assert cli.main(["verify", f, out]) == 0
    bad = write(tmp_path, "bad.json", {"kind": "mdp-solution", "values": ["2"]})
    assert cli.main(["verify", f, bad]) == 1


def test_solve_glcp_rules(tmp_path):
    f = write(tmp_path, "glcp1.json", GLCP1)
    out = str(tmp_path / "sol.json")
    assert cli.main(["solve", f, "--rule", "most-negative", "--out", out]) == 0
    assert read(out)["z"] == ["4"]
    assert cli.main(["solve", f, "--method", "brute", "--out", out]) == 0
    assert read(out)["z"] == ["4"]


def test_reduce_recover_roundtrip(tmp_path):
    f = write(tmp_path, "glcp1.json", GLCP1)
    reduced = str(tmp_path / "plcp.json")
    trace = str(tmp_path / "trace.json")
    sol = str(tmp_path / "sol.json")
    rec = str(tmp_path / "rec.json")
    assert cli.main(["reduce", f, "--target", "plcp", "--out", reduced, "--trace", trace]) == 0
    assert cli.main(["solve", reduced, "--out", sol]) == 0
    assert cli.main(["recover", trace, sol, "--out", rec]) == 0
    assert read(rec)["z"] == ["4"]


def test_reduce_cube_lp_with_witness_out(tmp_path):
    lp = {"kind": "gridlp", "M": {"blocks": [[["1/2"], ["1/2"]]]}, "p": ["1"], "q": ["-1", "-2"]}
    f = write(tmp_path, "lp.json", lp)
    reduced = str(tmp_path / "cube.json")
    trace = str(tmp_path / "trace.json")
    wit = str(tmp_path / "wit.json")
    rc = cli.main(
        ["reduce", f, "--target", "cube-lp", "--out", reduced, "--trace", trace, "--witness-out", wit]
    )
    assert rc == 0
    assert read(wit)["kind"] == "witness"
    assert read(reduced)["kind"] == "gridlp"


def test_uso_cmd(tmp_path, capsys):
    f = write(tmp_path, "glcp1.json", GLCP1)
    out = str(tmp_path / "uso.json")
    dot = str(tmp_path / "uso.dot")
    assert cli.main(["uso", f, "--check", "--dot", dot, "--out", out]) == 0
    assert "unique-sink: yes" in capsys.readouterr().out
    assert read(out)["b"] == [3]
    assert open(dot).read().startswith("digraph")


def test_exit_code_precondition(tmp_path):
    f = write(tmp_path, "mdp1.json", MDP1)
    assert cli.main(["reduce", f, "--target", "plcp"]) == 2


def test_exit_code_degeneracy(tmp_path):
    f = write(tmp_path, "bad.json", {"kind": "glcp", "M": {"blocks": [[["1"]]]}, "q": ["0"]})
    assert cli.main(["uso", f]) == 3


def test_exit_code_cap(tmp_path, monkeypatch):
    monkeypatch.setenv("GRIDCUBE_CAP", "1")
    f = write(tmp_path, "glcp1.json", GLCP1)
    assert cli.main(["uso", f]) == 4


def test_exit_code_missing_file(tmp_path):
    assert cli.main(["classify", str(tmp_path / "missing.json")]) == 2


def test_solution_file_round_trip(tmp_path):
    f = write(tmp_path, "glcp1.json", GLCP1)
    out1 = str(tmp_path / "a.json")
    out2 = str(tmp_path / "b.json")
    assert cli.main(["solve", f, "--out", out1]) == 0
    assert cli.main(["solve", f, "--out", out2]) == 0
    assert read(out1) == read(out2)  # deterministic output


def test_kind_sniffing_without_tag(tmp_path):
    bare = {"M": {"blocks": [[["1/2"], ["1/2"]]]}, "q": ["-1", "-2"]}
    f = write(tmp_path, "bare.json", bare)
    out = str(tmp_path / "sol.json")
    assert cli.main(["solve", f, "--out", out]) == 0
    assert read(out)["z"] == ["4"]
