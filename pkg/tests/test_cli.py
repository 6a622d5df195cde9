import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from shearerlab import cli
from shearerlab.graphs import BipartiteGraph
from shearerlab.qlll import SubspaceInstance, verify_span

CHAIN = '{"m":2,"n":3,"edges":[[1,1],[1,2],[2,2],[2,3]]}'
STAR = '{"m":2,"n":3,"edges":[[1,1],[1,2],[2,1],[2,3]]}'


def run(capsys, *argv):
    status = cli.main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def ok(capsys, *argv):
    status, out, err = run(capsys, *argv)
    assert status == 0, err
    return json.loads(out)


@pytest.fixture
def c4_file(tmp_path):
    path = tmp_path / "c4.json"
    path.write_text(json.dumps(BipartiteGraph.cycle(4).to_json()))
    return str(path)


def test_shearer_from_file(capsys, c4_file):
    out = ok(capsys, "shearer", "--graph", c4_file, "--r", "1/3,1/3,1/4,1/4")
    assert {k: out[k] for k in ("in_bound", "witness", "value")} == {
        "in_bound": False, "witness": [1, 2, 3, 4], "value": "0/1",
    }


def test_tau(capsys):
    assert ok(capsys, "tau", "--d", "2", "--l", "1", "--p", "3/5", "--q", "1/10") == "3/80"


def test_lattice_table_formats(capsys):
    rows = ok(capsys, "lattice-table")
    assert [r["lower_bound_on_gap"] for r in rows] == ["5.944e-08", "1.214e-07", "6.199e-08", "9.579e-10"]
    status, out, _ = run(capsys, "lattice-table", "--format", "text")
    assert status == 0 and len(out.strip().splitlines()) == 4


def test_numeric_commands(capsys):
    th = ok(capsys, "threshold", "--graph", "cycle:4", "--tol", "1e-9")
    assert abs(float(F(th["value"])) - 0.2928932188) < 1e-8
    assert ok(capsys, "scale", "--graph", "path:2", "--r", "1/4,1/4")["value"] == "2/1"
    assert ok(capsys, "indpoly", "--graph", "cycle:4", "--r", "0.3,0.3,0.2,0.2")["value"] == "3/25"
    assert ok(capsys, "gap-formula", "--variant", "radius", "--l", "3", "--P", "1/2")["value"] == "1/200"
    tb = ok(capsys, "gap-formula", "--variant", "transfer-bound", "--p", "1/3", "--q1", "1/30", "--layers", "")
    assert tb["value"] == "1/30"


def test_tree_commands(capsys):
    out = ok(capsys, "tree-bound", "--graph", CHAIN, "--r", "1/4,1/4", "--root", "1", "--scale")
    assert out["feasible"] and out["q"]["1"] == "1/3" and out["scale"]["value"] == "2/1"
    out = ok(capsys, "tree-dim", "--graph", STAR, "--r", "1/2,1/2", "--root", "1", "--dims", '{"1": 3}')
    assert out["feasible"] and out["q"]["1"] == 2
    out = ok(capsys, "regular-tree", "--t", "3", "--k", "2", "--depth", "3")
    assert out["threshold"]["value"] == "1/8" and out["truncation"]["agree"]


def test_transfer_and_graph_commands(capsys):
    out = ok(capsys, "transfer", "--graph", "complete:3", "--p", "0.4,0.4,0.4", "--i", "1", "--j", "2", "--q", "0.1")
    assert out["p"] == ["11/20", "3/10", "2/5"] and out["beyond"]
    out = ok(capsys, "gap-decision", "--graph", "cycle:5")
    assert out["verdict"] == "gapful"
    out = ok(capsys, "reduce", "--graph", CHAIN)
    assert out["graph"]["edges"] == []
    out = ok(capsys, "extremal", "--graph", "path:2", "--p", "1/4,1/3")
    assert out["avoid_all"] == out["ind_poly"] == "5/12"


def test_events_check(capsys, tmp_path):
    system = {
        "variables": [{"domain": 2, "masses": ["1/2", "1/2"]}] * 2,
        "events": [{"vbl": [1], "assignments": [[1]]}, {"vbl": [1, 2], "assignments": [[0, 1]]}],
    }
    path = tmp_path / "sys.json"
    path.write_text(json.dumps(system))
    out = ok(capsys, "events-check", "--system", str(path), "--plan", "1,2")
    assert out["cutting"]["union_preserved"] is True
    assert ok(capsys, "events-check", "--lemmas", "2")["lemmas_ok"]


def test_construct_verify_pad(capsys, tmp_path):
    dest = tmp_path / "inst.json"
    out = ok(capsys, "construct", "--graph", "cycle:4", "--r", "1/3,1/3,1/4,1/4",
             "--mode", "span", "--seed", "7", "--out", str(dest))
    assert out["report"]["kernel_relative_dim"] == "0/1"
    rep = ok(capsys, "verify", "--instance", str(dest), "--mode", "exact")
    assert rep["kernel_relative_dim"] == "0/1"
    dims = ",".join(str(2 * d) for d in out["dims"])
    padded = tmp_path / "padded.json"
    ok(capsys, "pad", "--instance", str(dest), "--dims", dims, "--out", str(padded))
    inst = SubspaceInstance.from_json(json.loads(padded.read_text()))
    assert verify_span(inst).kernel_relative_dim == 0


def test_construct_is_deterministic(capsys):
    argv = ("construct", "--graph", "cycle:4", "--r", "0.3,0.3,0.2,0.2", "--mode", "boundary", "--seed", "3")
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv)[1]
    assert first == second and json.loads(first)["report"]["kernel_relative_dim"] == "3/25"


@pytest.mark.parametrize("argv, status, code", [
    (("construct", "--graph", "cycle:4", "--r", "1/3,1/3,1/4,1/4", "--mode", "span"), 2, "usage"),
    (("bogus",), 2, "usage"),
    (("shearer", "--graph", '{"m": 4', "--r", "1"), 2, "malformed_input"),
    (("shearer", "--graph", "/no/such/file.json", "--r", "1"), 2, "usage"),
    (("reduce", "--graph", "cycle:4", "--op", "delete_r_leaf", "--args", "1"), 1, "GraphError"),
    (("construct", "--graph", "cycle:4", "--r", "0.3,0.3,0.2,0.2", "--mode", "span", "--seed", "1"),
     1, "ConstructionError"),
    (("indpoly", "--graph", "cycle:4", "--r", "1/2,1/2"), 1, "ShearerError"),
])
def test_error_codes(capsys, argv, status, code):
    got, out, err = run(capsys, *argv)
    assert got == status and out == ""
    assert json.loads(err.strip().splitlines()[-1])["error"]["code"] == code


def test_cap_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("LLL_MAX_SUBSETS", "3")
    status, _, err = run(capsys, "shearer", "--graph", "cycle:4", "--r", "0.1,0.1,0.1,0.1")
    assert status == 1 and json.loads(err)["error"]["code"] == "cap_exceeded"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "shearerlab", "tau", "--d", "2", "--l", "1",
                           "--p", "0.6", "--q", "0.1"], capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout) == "3/80"
