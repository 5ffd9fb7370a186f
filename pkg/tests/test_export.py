import json
import math
import struct

import numpy as np
import pytest

from latticebench import (
    BeamNetwork,
    GeometryError,
    LatticeNode,
    Strut,
    build_unit_cell,
    export_network_json,
    export_obj_wireframe,
    export_stl_solid,
    read_network_json,
    read_obj_wireframe,
    read_stl,
    serialize_stl,
)


def one_strut_network():
    return BeamNetwork([LatticeNode(1, [0.0, 0.0, 0.0]),
                        LatticeNode(2, [0.0, 0.0, 100.0])],
                       [Strut(1, 2, 4.0)])


# ---------------------------------------------------------------------------
# STL
# ---------------------------------------------------------------------------

def test_one_strut_stl_is_exactly_684_bytes(tmp_path):
    path = tmp_path / "one.stl"
    size = export_stl_solid(one_strut_network(), path)
    assert size == 684
    data = path.read_bytes()
    assert len(data) == 684
    (count,) = struct.unpack_from("<I", data, 80)
    assert count == 12


def test_stl_triangle_count_and_finiteness(tmp_path, cube_params):
    network = build_unit_cell(cube_params)
    path = tmp_path / "cell.stl"
    export_stl_solid(network, path)
    # independent reader: struct-level parse
    triangles = read_stl(path)
    assert len(triangles) == 12 * len(network.struts)
    for normal, vertices in triangles:
        assert np.all(np.isfinite(normal)) and np.all(np.isfinite(vertices))
        assert np.linalg.norm(normal) == pytest.approx(1.0, abs=1e-5)


def test_stl_stored_normals_match_vertex_winding(tmp_path):
    path = tmp_path / "one.stl"
    export_stl_solid(one_strut_network(), path)
    for normal, (p0, p1, p2) in read_stl(path):
        computed = np.cross(p1 - p0, p2 - p0)
        computed /= np.linalg.norm(computed)
        assert np.allclose(computed, normal, atol=1e-5)


def test_stl_prism_encloses_the_strut(tmp_path):
    path = tmp_path / "one.stl"
    export_stl_solid(one_strut_network(), path)
    points = np.concatenate([v for _, v in read_stl(path)])
    lo, hi = points.min(axis=0), points.max(axis=0)
    assert np.allclose(lo, [-2, -2, 0], atol=1e-5)
    assert np.allclose(hi, [2, 2, 100], atol=1e-5)


def test_stl_round_trip_is_byte_identical(tmp_path):
    path = tmp_path / "cell.stl"
    network = build_unit_cell(
        __import__("latticebench").UnitCellParams(100.0, 100.0, 100.0, 4.0))
    export_stl_solid(network, path)
    original = path.read_bytes()
    assert serialize_stl(read_stl(original)) == original


def test_degenerate_strut_is_rejected(tmp_path):
    broken = BeamNetwork([LatticeNode(1, [0, 0, 0]), LatticeNode(2, [0, 0, 0])],
                         [Strut(1, 2, 4.0)])
    with pytest.raises(GeometryError):
        export_stl_solid(broken, tmp_path / "broken.stl")
    assert not (tmp_path / "broken.stl").exists()


def test_empty_network_stl_is_header_only(tmp_path):
    path = tmp_path / "empty.stl"
    size = export_stl_solid(BeamNetwork(), path)
    assert size == 84
    assert read_stl(path) == []


# ---------------------------------------------------------------------------
# OBJ wireframe
# ---------------------------------------------------------------------------

def test_unit_cell_wireframe_has_13_vertices(tmp_path, cube_params):
    network = build_unit_cell(cube_params)
    path = tmp_path / "cell.obj"
    export_obj_wireframe(network, path)
    vertices, segments = read_obj_wireframe(path)
    assert len(vertices) == 13
    assert len(segments) == len(network.struts)
    assert all(1 <= a <= 13 and 1 <= b <= 13 for a, b in segments)


def test_obj_round_trip_is_lossless(tmp_path, cube_params):
    network = build_unit_cell(cube_params)
    path = tmp_path / "cell.obj"
    export_obj_wireframe(network, path)
    vertices, segments = read_obj_wireframe(path)
    order = {node.id: i for i, node in enumerate(network.nodes)}
    for node in network.nodes:
        assert vertices[order[node.id]] == tuple(node.position)  # bit-exact
    for strut, (a, b) in zip(network.struts, segments):
        assert (order[strut.node_a] + 1, order[strut.node_b] + 1) == (a, b)


def test_empty_network_obj_is_header_only(tmp_path):
    path = tmp_path / "empty.obj"
    export_obj_wireframe(BeamNetwork(), path)
    text = path.read_text()
    assert text.startswith("#")
    assert "\nv" not in text and "\nl" not in text


# ---------------------------------------------------------------------------
# JSON network dump
# ---------------------------------------------------------------------------

def test_json_round_trip_is_lossless(tmp_path, cube_params):
    network = build_unit_cell(cube_params)
    path = tmp_path / "cell.json"
    export_network_json(network, path)
    loaded = read_network_json(path)
    assert loaded.provenance == network.provenance
    assert [n.id for n in loaded.nodes] == [n.id for n in network.nodes]
    assert np.array_equal(loaded.positions(), network.positions())  # bit-exact
    assert loaded.struts == network.struts


def test_json_preserves_awkward_floats(tmp_path):
    value = math.sqrt(2) * 1e-7 + 12.3456789012345678
    network = BeamNetwork([LatticeNode(1, [value, -value, 0.1]),
                           LatticeNode(2, [0, 0, 100])],
                          [Strut(1, 2, math.pi)])
    path = tmp_path / "odd.json"
    export_network_json(network, path)
    loaded = read_network_json(path)
    assert loaded.nodes[0].position[0] == value
    assert loaded.struts[0].side == math.pi


def test_empty_network_json(tmp_path):
    path = tmp_path / "empty.json"
    export_network_json(BeamNetwork(), path)
    loaded = read_network_json(path)
    assert loaded.nodes == [] and loaded.struts == []


def test_json_rejects_foreign_payload(tmp_path):
    path = tmp_path / "foreign.json"
    path.write_text(json.dumps({"format": "something-else"}))
    from latticebench import ExportError

    with pytest.raises(ExportError):
        read_network_json(path)


# ---------------------------------------------------------------------------
# Determinism
# ---------------------------------------------------------------------------

def test_exports_are_deterministic(tmp_path, cube_params):
    network = build_unit_cell(cube_params)
    pairs = []
    for tag in ("a", "b"):
        stl = tmp_path / f"{tag}.stl"
        obj = tmp_path / f"{tag}.obj"
        js = tmp_path / f"{tag}.json"
        export_stl_solid(network, stl)
        export_obj_wireframe(network, obj)
        export_network_json(network, js)
        pairs.append((stl.read_bytes(), obj.read_bytes(), js.read_bytes()))
    assert pairs[0] == pairs[1]
