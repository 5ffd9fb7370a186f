import csv
import json

import pytest

from latticebench.cli import CSV_COLUMNS, main

MINIMAL = {
    "cell": {"height": 100.0, "width": 100.0, "depth": 100.0, "thickness": 4.0},
    "constraints": [{"nodes": {"ids": [1, 2, 3, 4, 5, 6, 7, 8]}, "fix": "all"}],
    "loads": [{"nodes": {"ids": [13]}, "force": [0.0, 0.0, -100.0]}],
}


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload, indent=2))
    return str(path)


@pytest.fixture
def demo_config(tmp_path):
    return write_config(tmp_path, MINIMAL)


def small_compare_config():
    cfg = json.loads(json.dumps(MINIMAL))
    cfg["cell"] = {"height": 10.0, "width": 10.0, "depth": 10.0, "thickness": 1.0}
    del cfg["constraints"], cfg["loads"]
    cfg["compare"] = {
        "region": {"width": 20.0, "depth": 20.0},
        "height": 10.0,
        "force": 10.0,
        "directions": ["Z", "Y"],
        "patterns": [
            {"type": "lattice", "name": "pyramidal"},
            {"type": "cross", "pitch": 10.0, "wall": 0.5},
        ],
    }
    return cfg


def test_generate_summarizes_and_exports(tmp_path, demo_config, capsys):
    stl = tmp_path / "cell.stl"
    assert main(["generate", demo_config, "--stl", str(stl)]) == 0
    out = capsys.readouterr().out
    assert "13 nodes" in out and "20 struts" in out
    assert stl.stat().st_size == 84 + 600 * 20


def test_solve_reports_max_displacement_and_node(demo_config, capsys):
    assert main(["solve", demo_config]) == 0
    out = capsys.readouterr().out
    assert "max displacement" in out
    assert "node 13" in out
    assert "reactions" in out


def test_solve_output_is_deterministic(demo_config, capsys):
    assert main(["solve", demo_config]) == 0
    first = capsys.readouterr().out
    assert main(["solve", demo_config]) == 0
    second = capsys.readouterr().out
    assert first == second


def test_size_prints_thickness_and_trace(tmp_path, capsys):
    cfg = json.loads(json.dumps(MINIMAL))
    cfg["sizing"] = {"max_displacement": 0.05, "bounds": [2.0, 20.0],
                     "tolerance": 0.01}
    path = write_config(tmp_path, cfg)
    assert main(["size", path]) == 0
    out = capsys.readouterr().out
    assert "sized thickness" in out
    assert "->" in out  # the (thickness -> displacement) trace


def test_compare_writes_exact_csv_columns(tmp_path, capsys):
    path = write_config(tmp_path, small_compare_config())
    report = tmp_path / "report.csv"
    assert main(["compare", path, "--out", str(report)]) == 0
    out = capsys.readouterr().out
    assert "note:" in out  # region-proxy limitation in the report footer
    with open(report, newline="") as handle:
        rows = list(csv.reader(handle))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 1 + 2 * 2  # two directions x two patterns
    by_key = {(r[0], r[1]): r for r in rows[1:]}
    assert by_key[("Z", "pyramidal")][6] == ""  # reference: empty improvement
    assert by_key[("Z", "cross")][6] != ""
    # full-precision values round-trip through float()
    for row in rows[1:]:
        for cell in row[2:6]:
            assert float(cell) == float(repr(float(cell)))


def test_compare_is_byte_deterministic(tmp_path, capsys):
    path = write_config(tmp_path, small_compare_config())
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    assert main(["compare", path, "--out", str(out_a)]) == 0
    first = capsys.readouterr().out
    assert main(["compare", path, "--out", str(out_b)]) == 0
    second = capsys.readouterr().out
    assert out_a.read_bytes() == out_b.read_bytes()
    assert first.replace("a.csv", "") == second.replace("b.csv", "")


def test_single_pattern_compare_has_one_row(tmp_path):
    cfg = small_compare_config()
    cfg["compare"]["patterns"] = [{"type": "lattice", "name": "pyramidal"}]
    cfg["compare"]["directions"] = ["Z"]
    path = write_config(tmp_path, cfg)
    report = tmp_path / "single.csv"
    assert main(["compare", path, "--out", str(report)]) == 0
    with open(report, newline="") as handle:
        rows = list(csv.reader(handle))
    assert len(rows) == 2
    assert rows[1][6] == ""


def test_check_prints_printability_report(tmp_path, capsys):
    cfg = json.loads(json.dumps(MINIMAL))
    cfg["printability"] = {"overhang_limit": 45.0, "bridge_max": 100.0}
    path = write_config(tmp_path, cfg)
    assert main(["check", path]) == 0
    out = capsys.readouterr().out
    assert "self-supporting: 8" in out
    assert "bridge: 12" in out
    assert "printability: PASS" in out


def test_check_fails_nonzero_at_default_bridge_limit(demo_config, capsys):
    assert main(["check", demo_config]) != 0
    assert "printability: FAIL" in capsys.readouterr().out


def test_export_requires_an_output_flag(demo_config, capsys):
    assert main(["export", demo_config]) == 2
    assert "--stl" in capsys.readouterr().err


def test_export_round_trip(tmp_path, demo_config):
    obj = tmp_path / "cell.obj"
    js = tmp_path / "cell.json"
    assert main(["export", demo_config, "--obj", str(obj), "--json", str(js)]) == 0
    from latticebench import read_network_json, read_obj_wireframe

    vertices, segments = read_obj_wireframe(obj)
    assert len(vertices) == 13 and len(segments) == 20
    assert len(read_network_json(js).nodes) == 13


# ---------------------------------------------------------------------------
# Exit codes
# ---------------------------------------------------------------------------

def test_config_error_exit_code(tmp_path, capsys):
    bad = json.loads(json.dumps(MINIMAL))
    bad["cell"]["thickness"] = -1.0
    path = write_config(tmp_path, bad)
    assert main(["solve", path]) == 2
    assert "cell.thickness" in capsys.readouterr().err


def test_mechanism_error_exit_code(tmp_path, capsys):
    floppy = json.loads(json.dumps(MINIMAL))
    floppy["constraints"] = [{"nodes": {"ids": [13]}, "fix": ["ux", "uy", "uz"]}]
    floppy["loads"] = [{"nodes": {"ids": [1]}, "force": [0.0, 0.0, -100.0]}]
    path = write_config(tmp_path, floppy)
    assert main(["solve", path]) == 4
    assert "solve error" in capsys.readouterr().err


def test_sizing_infeasible_exit_code(tmp_path, capsys):
    cfg = json.loads(json.dumps(MINIMAL))
    cfg["sizing"] = {"max_displacement": 1e-9, "bounds": [2.0, 20.0]}
    path = write_config(tmp_path, cfg)
    assert main(["size", path]) == 5
    assert "sizing error" in capsys.readouterr().err


def test_geometry_error_exit_code(tmp_path, capsys):
    cfg = json.loads(json.dumps(MINIMAL))
    cfg["cell"]["node_offset"] = 5000.0  # beyond the slant edge
    path = write_config(tmp_path, cfg)
    assert main(["solve", path]) == 2  # collected during config validation
    assert "node_offset" in capsys.readouterr().err


def test_missing_config_file_is_an_io_error(capsys):
    assert main(["solve", "/nonexistent/config.json"]) == 6
