import io
import json
import subprocess
import sys

import pytest

from conftest import FIXTURES
from speedroute.cli import run

SWAP = str(FIXTURES / "toy-swap.json")
LINE = str(FIXTURES / "toy-line.json")
MO = str(FIXTURES / "toy-mo.json")


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_exact_solve_writes_route(tmp_path):
    path = tmp_path / "route.json"
    code, out, _ = call("solve", "--algo", "exact", SWAP, "--out", str(path))
    assert code == 0
    doc = json.loads(path.read_text())
    assert doc["totals"]["time"] == "5"
    assert doc["stats"]["states_expanded"] > 0
    assert "seed: 0" in out


def test_validate_reports_route_ending_off_end(tmp_path):
    bad = tmp_path / "bad-route.json"
    bad.write_text(json.dumps({"steps": ["alpha-A", "A-B"]}))
    code, out, _ = call("validate", LINE, str(bad))
    assert code == 1
    assert "violation [end]" in out


def test_validate_accepts_good_route(tmp_path):
    good = tmp_path / "route.json"
    call("solve", "--algo", "exact", LINE, "--out", str(good))
    assert call("validate", LINE, str(good))[0] == 0


@pytest.mark.parametrize("algo", ["ga", "aco"])
def test_seeded_solve_is_byte_identical(tmp_path, algo):
    args = ["solve", "--algo", algo, "--seed", "7", "--population", "12", "--generations", "8", "--iterations", "5"]
    for name in ("a", "b"):
        code, out, _ = call(*args, SWAP, "--out", str(tmp_path / f"{name}.json"), "--log", str(tmp_path / f"{name}.csv"))
        assert code == 0 and "seed: 7" in out
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_pareto_csv(tmp_path):
    path = tmp_path / "front.csv"
    assert call("pareto", MO, "--population", "12", "--generations", "5", "--out", str(path))[0] == 0
    assert path.read_text().splitlines() == ["time,difficulty,route_id", "5,9,route-0", "7,2,route-1"]


def test_oracle_and_expand(tmp_path):
    code, out, _ = call("oracle", "--mode", "full", str(FIXTURES / "toy-gain.json"))
    assert code == 0 and "time 3.5" in out
    path = tmp_path / "counts.json"
    code, out, _ = call("expand", LINE, "--up-to", "2", "--out", str(path))
    assert code == 0
    assert [c["count"] for c in json.loads(path.read_text())["states"]] == [4, 4, 4]


def test_banned_tags_and_difficulty_cap():
    code, out, _ = call("solve", "--algo", "exact", MO, "--banned-tags", "glitch")
    assert code == 0 and "time 7" in out
    code, out, _ = call("solve", "--algo", "exact", MO, "--difficulty-cap", "3")
    assert "time 7" in out


def test_gen_then_solve(tmp_path):
    model = tmp_path / "m.json"
    args = ["gen", "--family", "resource-gated", "--nodes", "7", "--required", "3", "--seed", "4", "--out"]
    assert call(*args, str(model))[0] == 0
    first = model.read_bytes()
    call(*args, str(model))
    assert model.read_bytes() == first
    assert call("solve", "--algo", "exact", "--repeat-cap", "0", str(model))[0] == 0


def test_gen_to_stdout_keeps_document_clean():
    code, out, err = call("gen", "--family", "checkpoint-tsp", "--nodes", "3")
    assert code == 0 and json.loads(out)["start"] == "cp0"
    assert "seed: 0" in err


def test_stages(tmp_path):
    st = tmp_path / "stages.json"
    call("gen", "--family", "stage-save", "--nodes", "4", "--seed", "2", "--out", str(st))
    out_path = tmp_path / "order.json"
    code, out, _ = call("stages", str(st), "--out", str(out_path))
    assert code == 0
    assert len(json.loads(out_path.read_text())["order"]) == 4


def test_export_dot(tmp_path):
    path = tmp_path / "g.dot"
    assert call("export-dot", SWAP, "--out", str(path))[0] == 0
    assert path.read_text().startswith("digraph")


def test_exit_codes(tmp_path):
    assert call("solve", "--bogus", SWAP)[0] == 2
    assert call()[0] == 2
    assert call("gen", "--family", "checkpoint-tsp", "--nodes", "1")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema": "speedroute-model/1", "nodes": [{"id": "a"}], "edges": [], "start": "zz", "ends": ["a"]}))
    code, _, err = call("solve", str(bad))
    assert code == 2 and "zz" in err
    infeasible = tmp_path / "inf.json"
    infeasible.write_text(
        json.dumps({"schema": "speedroute-model/1", "nodes": [{"id": "a"}, {"id": "b"}], "edges": [], "start": "a", "ends": ["b"]})
    )
    code, _, err = call("solve", "--algo", "exact", str(infeasible))
    assert code == 1 and "infeasible" in err


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "speedroute.cli", "solve", "--algo", "exact", SWAP],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "time 5" in proc.stdout
