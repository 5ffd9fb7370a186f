"""Mesh and network emission: binary STL solids, OBJ-style wireframes and a
JSON network dump, each paired with its own reader for round-tripping.

STL layout: 80-byte header, little-endian uint32 triangle count, then 50
bytes per triangle (3 float32 normal, 3x3 float32 vertices, uint16 attribute
set to 0). Every strut becomes a square prism of side equal to its section,
oriented by the strut's local rotation frame, 12 triangles with outward
normals. Prisms are emitted independently (no boolean union); slicers union
overlapping closed shells.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .errors import ExportError, GeometryError
from .geometry import BeamNetwork, LatticeNode, Strut
from .solver import element_rotation

STL_HEADER = b"latticebench solid strut export (units: mm)".ljust(80, b"\0")
_TRIANGLE_STRUCT = struct.Struct("<12fH")
FLOAT_FORMAT = ".17g"  # enough digits to round-trip doubles exactly


def _strut_prism_triangles(network: BeamNetwork, strut: Strut):
    """12 outward-oriented triangles covering one square prism."""
    index = network.node_index()
    a = network.nodes[index[strut.node_a]].position
    b = network.nodes[index[strut.node_b]].position
    rotation = element_rotation(a, b)
    axis, side_y, side_z = rotation
    half = strut.side / 2.0
    corners = [half * (side_y + side_z), half * (-side_y + side_z),
               half * (-side_y - side_z), half * (side_y - side_z)]
    ring_a = [a + c for c in corners]
    ring_b = [b + c for c in corners]

    quads = [(ring_b[0], ring_b[1], ring_b[2], ring_b[3], axis),      # end cap at b
             (ring_a[0], ring_a[3], ring_a[2], ring_a[1], -axis)]     # end cap at a
    for i in range(4):
        j = (i + 1) % 4
        outward = corners[i] + corners[j]
        outward = outward / np.linalg.norm(outward)
        quads.append((ring_a[i], ring_b[i], ring_b[j], ring_a[j], outward))

    triangles = []
    for p0, p1, p2, p3, outward in quads:
        for tri in ((p0, p1, p2), (p0, p2, p3)):
            normal = np.cross(tri[1] - tri[0], tri[2] - tri[0])
            normal = normal / np.linalg.norm(normal)
            if normal @ outward < 0:
                tri = (tri[0], tri[2], tri[1])
                normal = -normal
            triangles.append((normal, tri))
    return triangles


def serialize_stl(triangles) -> bytes:
    chunks = [STL_HEADER, struct.pack("<I", len(triangles))]
    for normal, (p0, p1, p2) in triangles:
        values = [float(v) for v in (*normal, *p0, *p1, *p2)]
        chunks.append(_TRIANGLE_STRUCT.pack(*values, 0))
    return b"".join(chunks)


def export_stl_solid(network: BeamNetwork, path) -> int:
    """Write the network as a binary STL of square prisms; returns the byte
    count (84 + 600 per strut)."""
    for k, strut in enumerate(network.struts):
        if network.strut_length(strut) <= 0:
            raise GeometryError(
                f"strut {k} ({strut.node_a}-{strut.node_b}) is degenerate "
                "(zero length); refusing to emit it")
    triangles = []
    for strut in network.struts:
        triangles.extend(_strut_prism_triangles(network, strut))
    data = serialize_stl(triangles)
    try:
        with open(path, "wb") as handle:
            handle.write(data)
    except OSError as exc:
        raise ExportError(f"cannot write STL to {path}: {exc}") from None
    return len(data)


def read_stl(source) -> list[tuple[np.ndarray, np.ndarray]]:
    """Parse a binary STL (path or bytes) into (normal, 3x3 vertices) pairs."""
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    else:
        with open(source, "rb") as handle:
            data = handle.read()
    if len(data) < 84:
        raise ExportError("binary STL requires at least 84 bytes")
    (count,) = struct.unpack_from("<I", data, 80)
    expected = 84 + 50 * count
    if len(data) != expected:
        raise ExportError(
            f"STL length {len(data)} does not match triangle count {count} "
            f"(expected {expected})")
    triangles = []
    for i in range(count):
        values = _TRIANGLE_STRUCT.unpack_from(data, 84 + 50 * i)
        floats = np.array(values[:12], dtype=np.float32)
        triangles.append((floats[:3].astype(float),
                          floats[3:].reshape(3, 3).astype(float)))
    return triangles


def export_obj_wireframe(network: BeamNetwork, path) -> int:
    """Vertex + line-segment wireframe with 1-based indices."""
    lines = ["# latticebench wireframe (units: mm)"]
    index = {}
    for i, node in enumerate(network.nodes):
        index[node.id] = i + 1
        x, y, z = node.position
        lines.append(f"v {x:{FLOAT_FORMAT}} {y:{FLOAT_FORMAT}} {z:{FLOAT_FORMAT}}")
    for strut in network.struts:
        lines.append(f"l {index[strut.node_a]} {index[strut.node_b]}")
    text = "\n".join(lines) + "\n"
    try:
        with open(path, "w", encoding="ascii", newline="\n") as handle:
            handle.write(text)
    except OSError as exc:
        raise ExportError(f"cannot write OBJ to {path}: {exc}") from None
    return len(text.encode("ascii"))


def read_obj_wireframe(path) -> tuple[list[tuple[float, float, float]],
                                      list[tuple[int, int]]]:
    """Read back a wireframe: vertex coordinates and 1-based segment indices."""
    vertices = []
    segments = []
    with open(path, "r", encoding="ascii") as handle:
        for line in handle:
            parts = line.split()
            if not parts or parts[0] == "#":
                continue
            if parts[0] == "v":
                vertices.append(tuple(float(v) for v in parts[1:4]))
            elif parts[0] == "l":
                segments.append((int(parts[1]), int(parts[2])))
    return vertices, segments


def network_to_dict(network: BeamNetwork) -> dict:
    return {
        "format": "beam-network",
        "provenance": network.provenance,
        "nodes": [{"id": node.id, "position": [float(v) for v in node.position]}
                  for node in network.nodes],
        "struts": [{"a": s.node_a, "b": s.node_b, "side": s.side}
                   for s in network.struts],
    }


def export_network_json(network: BeamNetwork, path) -> int:
    """Structured full-precision dump of nodes, struts and provenance."""
    text = json.dumps(network_to_dict(network), indent=2) + "\n"
    try:
        with open(path, "w", encoding="ascii", newline="\n") as handle:
            handle.write(text)
    except OSError as exc:
        raise ExportError(f"cannot write JSON to {path}: {exc}") from None
    return len(text.encode("ascii"))


def read_network_json(path) -> BeamNetwork:
    with open(path, "r", encoding="ascii") as handle:
        data = json.load(handle)
    if data.get("format") != "beam-network":
        raise ExportError(f"{path} is not a beam-network dump")
    nodes = [LatticeNode(item["id"], np.array(item["position"], dtype=float))
             for item in data["nodes"]]
    struts = [Strut(item["a"], item["b"], float(item["side"]))
              for item in data["struts"]]
    return BeamNetwork(nodes, struts, provenance=data.get("provenance", "unit-cell"))
