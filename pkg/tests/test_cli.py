from __future__ import annotations

import json
import subprocess
import sys

import pytest

from conftest import CUBE, FIGURE2
from reflexguard.boxes import polyhedron_from_boxes
from reflexguard.cli import run_cli
from reflexguard.model import format_orp, parse_orp


@pytest.fixture
def orp(tmp_path):
    def write(boxes, name="in.orp"):
        path = tmp_path / name
        path.write_text(format_orp(polyhedron_from_boxes(boxes)))
        return str(path)
    return write


def run_json(argv, capsys):
    code = run_cli(argv)
    return code, json.loads(capsys.readouterr().out)


def test_validate_ok(orp, capsys):
    code, doc = run_json(["validate", "--in", orp(CUBE)], capsys)
    assert code == 0 and doc == {"ok": True, "violations": []}


def test_validate_reports_syntax_error(tmp_path, capsys):
    bad = tmp_path / "bad.orp"
    bad.write_text("ORP 1\nvertices two\n")
    code, doc = run_json(["validate", "--in", str(bad)], capsys)
    assert code == 1 and doc["violations"][0]["code"] == "syntax"


def test_stats_on_figure2(orp, capsys):
    code, doc = run_json(["stats", "--in", orp(FIGURE2)], capsys)
    assert code == 0
    assert (doc["n"], doc["m"], doc["r"], doc["b"], doc["g"]) == (15, 23, 2, 0, 0)
    assert doc["gEuler"] == doc["gGraph"] == 0
    assert doc["boundR"] == 2 and doc["boundM"] == 2
    assert doc["contactCounts"] == {"primitive_d": 0, "primitive_i": 0, "collar": 0, "other": 1}
    assert all(v in (True, None) for v in doc["inequalities"].values())


def test_guard_on_cube_is_convex(orp, capsys):
    code, doc = run_json(["guard", "--in", orp(CUBE)], capsys)
    assert code == 0 and doc["status"] == "Convex" and doc["guards"] == []
    assert doc["certificate"]["count"] == 0


def test_guard_then_verify_on_comb(tmp_path, capsys):
    comb = str(tmp_path / "comb.orp")
    guards = str(tmp_path / "guards.json")
    report = str(tmp_path / "report.json")
    assert run_cli(["generate", "--family", "comb", "--k", "4", "--out", comb]) == 0
    assert run_cli(["guard", "--in", comb, "--out", guards]) == 0
    doc = json.loads(open(guards).read())
    assert len(doc["guards"]) == 4 and all(g["axis"] == "Y" for g in doc["guards"])
    assert run_cli(["verify", "--in", comb, "--guards", guards, "--report", report]) == 0
    assert capsys.readouterr().out.startswith("PASS")
    assert json.loads(open(report).read())["pass"] is True


def test_verify_fails_with_a_missing_guard(tmp_path, capsys):
    comb = str(tmp_path / "comb.orp")
    guards = tmp_path / "guards.json"
    run_cli(["generate", "--family", "comb", "--k", "3", "--out", comb])
    run_cli(["guard", "--in", comb, "--out", str(guards)])
    doc = json.loads(guards.read_text())
    doc["guards"].pop()
    guards.write_text(json.dumps(doc))
    capsys.readouterr()
    assert run_cli(["verify", "--in", comb, "--guards", str(guards)]) == 1
    assert capsys.readouterr().out.startswith("FAIL")


def test_decompose_dump(orp, tmp_path):
    out = tmp_path / "bricks.json"
    assert run_cli(["decompose", "--in", orp(FIGURE2), "--dump-bricks", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert sorted(map(tuple, (tuple(map(tuple, b)) for b in doc["bricks"]))) == sorted(FIGURE2)
    (c,) = doc["contacts"]
    assert c["class"] == "other" and len(c["reflexEdges"]) == 2


def test_generate_writes_parseable_orp(capsys):
    assert run_cli(["generate", "--family", "stack", "--seed", "5", "--n", "7"]) == 0
    p = parse_orp(capsys.readouterr().out)
    assert p.n > 8


def test_generate_extrude_polygon(capsys):
    assert run_cli(["generate", "--family", "extrude", "--polygon", "0,0;2,0;2,1;1,1;1,2;0,2"]) == 0
    assert parse_orp(capsys.readouterr().out).n == 12


def test_missing_file_is_invalid_input(capsys):
    assert run_cli(["stats", "--in", "/nonexistent/x.orp"]) == 1


def test_invalid_solid_is_rejected(tmp_path):
    path = tmp_path / "open.orp"
    text = format_orp(polyhedron_from_boxes(CUBE))
    lines = text.splitlines()
    # drop the last face: the surface is no longer closed
    i = max(k for k, ln in enumerate(lines) if ln.startswith("face "))
    faces = next(k for k, ln in enumerate(lines) if ln.startswith("faces"))
    lines[faces] = "faces 5"
    path.write_text("\n".join(lines[:i]) + "\n")
    assert run_cli(["guard", "--in", str(path)]) == 1


@pytest.mark.parametrize("argv", [[], ["guard"], ["guard", "--in", "x", "--mode", "ajar"], ["generate", "--family", "blob"]])
def test_usage_errors(argv, capsys):
    assert run_cli(argv) == 2


def test_bad_generator_arguments_are_usage_errors(capsys):
    assert run_cli(["generate", "--family", "comb", "--k", "1"]) == 2


def test_module_entry_point(orp):
    res = subprocess.run([sys.executable, "-m", "reflexguard", "stats", "--in", orp(CUBE)], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["r"] == 0
