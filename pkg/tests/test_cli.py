import json
import shutil
import subprocess
import sys

import pytest

from conftest import DATA
from tautkit.cli import EXIT_INTERNAL, EXIT_NO, EXIT_USAGE, EXIT_YES, run
from tautkit.fpg import build_fpg, parse_layout, parse_treedec, validate_layout
from tautkit.triangulation import load_triangulation


@pytest.fixture
def data_dir(tmp_path, monkeypatch):
    for name in ("fig8.tri", "solid_torus_1tet.tri", "unsat.m1in3", "broken.tri"):
        shutil.copy(DATA / name, tmp_path / name)
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("TAUTKIT_SEED", raising=False)
    return tmp_path


@pytest.mark.parametrize("method", ["brute", "cutwidth", "treewidth"])
def test_solve_figure_eight(data_dir, capsys, method):
    assert run(["taut", "solve", "fig8.tri", "--method", method, "--witness"]) == EXIT_YES
    lines = capsys.readouterr().out.split()
    assert lines[0] == "yes" and len(lines[1]) == 2


def test_json_report_matches_golden(data_dir, capsys):
    assert run(["taut", "solve", "fig8.tri", "--json", "--witness"]) == EXIT_YES
    report = json.loads(capsys.readouterr().out)
    assert set(report["timings"]) == {"load_seconds", "solve_seconds"}
    del report["timings"]
    golden = json.loads((DATA / "fig8_solve.golden.json").read_text())
    assert report == golden


def test_reduce_then_solve_unsat(data_dir, capsys):
    assert run(["reduce", "unsat.m1in3", "-o", "x.tri", "--provenance", "p.json"]) == 0
    assert load_triangulation("x.tri").tet_count == 67 * 4 - 19 * 4
    assert len(json.loads((data_dir / "p.json").read_text())["tets"]) == 192
    assert run(["taut", "solve", "x.tri", "--method", "treewidth"]) == EXIT_NO
    assert run(["sat", "solve", "unsat.m1in3"]) == EXIT_NO
    out = capsys.readouterr().out
    assert "no" in out.split() and "unsatisfiable" in out


def test_sat_solve_witness(data_dir, capsys):
    (data_dir / "one.m1in3").write_text("p m1in3 3 1\n1 2 3\n")
    assert run(["sat", "solve", "one.m1in3", "--witness"]) == EXIT_YES
    assert capsys.readouterr().out.split() == ["satisfiable", "1"]


def test_reduce_reports_dropped_variables(data_dir, capsys):
    (data_dir / "gap.m1in3").write_text("p m1in3 4 1\n1 2 4\n")
    assert run(["reduce", "gap.m1in3", "-o", "g.tri"]) == 0
    assert "3" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["tri", "validate", "broken.tri"],
    ["tri", "validate", "missing.tri"],
    ["taut", "solve", "solid_torus_1tet.tri"],
    ["frobnicate"],
    ["taut", "solve", "fig8.tri", "--method", "magic"],
    [],
])
def test_usage_errors(data_dir, argv):
    assert run(argv) == EXIT_USAGE


def test_error_message_has_location(data_dir, capsys):
    run(["tri", "validate", "broken.tri"])
    assert "line" in capsys.readouterr().err


def test_skeleton_and_enumerate(data_dir, capsys):
    assert run(["tri", "validate", "fig8.tri"]) == 0
    assert run(["tri", "skeleton", "fig8.tri", "--json"]) == 0
    out = capsys.readouterr().out
    report = json.loads(out[out.index("{"):])
    assert len(report["edges"]) == 2
    assert run(["taut", "enumerate", "fig8.tri"]) == 0
    assert capsys.readouterr().out.split() == ["00", "11", "22"]
    assert run(["taut", "enumerate", "fig8.tri", "--json", "--limit", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["count"] == 1
    assert run(["taut", "enumerate", "fig8.tri", "--verbose"]) == 0
    assert "00  marks e0=2 e1=2" in capsys.readouterr().out


def test_gadget_and_fpg_exports(data_dir, capsys):
    for kind, size in (("variable", 2), ("fork", 21), ("clause", 4)):
        assert run(["gadget", kind, "-o", f"{kind}.tri"]) == 0
        assert load_triangulation(f"{kind}.tri").tet_count == size
    assert run(["fpg", "export", "fig8.tri", "--dot"]) == 0
    assert capsys.readouterr().out.count("0 -- 1;") == 4
    assert run(["fpg", "export", "fig8.tri", "--layout", "-o", "f.layout"]) == 0
    g = build_fpg(load_triangulation("fig8.tri"))
    order = parse_layout((data_dir / "f.layout").read_text())
    assert validate_layout(g, order).width == 4
    assert run(["fpg", "export", "fig8.tri", "--treedec", "-o", "f.td"]) == 0
    parse_treedec((data_dir / "f.td").read_text())
    assert run(["taut", "solve", "fig8.tri", "--method", "cutwidth", "--layout", "f.layout"]) == 0
    assert run(["taut", "solve", "fig8.tri", "--treedec", "f.td", "--stats"]) == 0


def test_bench_scaling(data_dir, capsys):
    assert run(["bench", "scaling", "--lengths", "1,2", "--method", "cutwidth",
                "--repeats", "2"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("length,") and len(lines) == 3


def test_seed_env(data_dir, monkeypatch, capsys):
    monkeypatch.setenv("TAUTKIT_SEED", "17")
    assert run(["taut", "solve", "fig8.tri", "--method", "cutwidth"]) == EXIT_YES
    monkeypatch.setenv("TAUTKIT_SEED", "seventeen")
    assert run(["taut", "solve", "fig8.tri", "--method", "cutwidth"]) == EXIT_USAGE


def test_internal_errors_exit_three(data_dir, monkeypatch):
    from tautkit import cli
    from tautkit.dp import DpInvariantError

    def boom(*args, **kwargs):
        raise DpInvariantError("forced")
    monkeypatch.setattr(cli, "solve_treewidth", boom)
    assert run(["taut", "solve", "fig8.tri"]) == EXIT_INTERNAL


def test_console_entry_point(data_dir):
    done = subprocess.run([sys.executable, "-m", "tautkit", "taut", "solve", "fig8.tri",
                           "--method", "brute"], capture_output=True, text=True)
    assert done.returncode == EXIT_YES
    assert done.stdout.strip() == "yes"
