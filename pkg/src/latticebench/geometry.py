"""Parametric lattice geometry.

Builds the pyramidal unit cell from its bounding-box parameters, tiles it into
arrays with node merging, generates cross and hexagonal reference patterns as
beam networks, computes network mass and runs a support-free printability
heuristic.

Conventions
-----------
* Units are millimetres for lengths and kilograms for mass (densities in
  kg/mm^3).
* The unit cell has its apex node at the origin and its square top ring at
  ``z = height``. Node ids 1..8 walk the top ring (corners at odd ids,
  edge midpoints at even ids, starting from ``(+width/2, -depth/2)``),
  ids 9..12 are the interior nodes near the top corners and id 13 is the apex.
* Reference patterns are beam-network proxies of extruded 2.5D walls: every
  wall becomes a square-section strut of side equal to the wall thickness.
  This is an approximation intended for like-for-like pattern ranking, not a
  shell model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    DisconnectedNetworkError,
    GeometryError,
    ParameterError,
    PatternRegionError,
)

MERGE_TOL = 1e-6
"""Node coincidence threshold in mm: far below manufacturable resolution,
far above double-precision noise."""

CLIP_SLACK = 1e-9
"""Relative inflation of clip boxes so segments lying exactly on a region
boundary survive clipping."""

APEX_ID = 13
CORNER_IDS = (1, 3, 5, 7)
MIDPOINT_IDS = (2, 4, 6, 8)
INTERIOR_IDS = (9, 10, 11, 12)

# Slant edge owning each interior node (interior id -> top corner id).
_INTERIOR_CORNER = {9: 3, 10: 1, 11: 7, 12: 5}


# ---------------------------------------------------------------------------
# Parameters and core data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UnitCellParams:
    """Geometric parameters of the pyramidal unit cell.

    The cell occupies a ``width x depth x height`` bounding box (optionally
    rescaled by the aspect ratios). ``node_offset`` is the distance from each
    top corner to its interior node, measured along the slant edge in
    ``on_edge`` placement or used in the angle formula in ``angled``
    placement.

    Placement modes for the interior nodes:

    * ``"on_edge"`` (default): the node sits exactly on the corner-to-apex
      slant edge at arc distance ``node_offset`` from the corner.
      ``node_angle`` is not needed; a derived value (the apex angle between
      opposite slant edges) is reported by :attr:`offset_angle`.
    * ``"angled"``: the node is displaced from the corner by
      ``node_offset * sin(node_angle / 2)`` inward along both horizontal axes
      and by ``node_offset * cos(node_angle / 2)`` downward. ``node_angle``
      must be supplied. The horizontal offsets always point toward the cell's
      vertical axis.
    """

    height: float                     # bounding box z extent [mm]
    width: float                      # bounding box x extent [mm]
    depth: float                      # bounding box y extent [mm]
    thickness: float                  # strut cross-section side [mm]
    node_offset: float | None = None  # interior node distance from corner [mm]
    node_angle: float | None = None   # placement angle [rad], "angled" mode
    aspect_x: float = 1.0
    aspect_y: float = 1.0
    aspect_z: float = 1.0
    placement: str = "on_edge"        # "on_edge" | "angled"
    section: str = "square"
    brace_ring: bool = True           # ring 9-10-11-12-9 joining interior nodes

    def __post_init__(self):
        problems = []
        for name in ("height", "width", "depth", "thickness"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                problems.append(f"{name} must be finite and > 0, got {value!r}")
        for name in ("aspect_x", "aspect_y", "aspect_z"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                problems.append(f"{name} must be finite and > 0, got {value!r}")
        if self.placement not in ("on_edge", "angled"):
            problems.append(
                f"placement must be 'on_edge' or 'angled', got {self.placement!r}")
        if self.section != "square":
            problems.append(f"section must be 'square', got {self.section!r}")
        if self.node_angle is not None and not 0.0 < self.node_angle < math.pi:
            problems.append(
                f"node_angle must lie in (0, pi) rad, got {self.node_angle!r}")
        if self.placement == "angled" and self.node_angle is None:
            problems.append("node_angle is required in 'angled' placement")
        if problems:
            raise ParameterError("; ".join(problems))
        if self.thickness >= min(self.cell_width, self.cell_depth, self.cell_height) / 2:
            raise ParameterError(
                "thickness must be smaller than half the smallest cell "
                f"dimension ({min(self.cell_width, self.cell_depth, self.cell_height) / 2:g} mm), "
                f"got {self.thickness:g} mm")
        if self.node_offset is not None:
            if not 0.0 < self.node_offset < self.slant_length:
                raise GeometryError(
                    f"node_offset must lie strictly between 0 and the slant edge "
                    f"length {self.slant_length:.6g} mm, got {self.node_offset!r}")

    @property
    def cell_width(self) -> float:
        return self.width * self.aspect_x

    @property
    def cell_depth(self) -> float:
        return self.depth * self.aspect_y

    @property
    def cell_height(self) -> float:
        return self.height * self.aspect_z

    @property
    def slant_length(self) -> float:
        """Length of a corner-to-apex slant edge."""
        return math.sqrt((self.cell_width / 2) ** 2
                         + (self.cell_depth / 2) ** 2
                         + self.cell_height ** 2)

    @property
    def offset_distance(self) -> float:
        """Interior-node offset, defaulting to 10% of the slant edge length."""
        if self.node_offset is not None:
            return self.node_offset
        return 0.1 * self.slant_length

    @property
    def offset_angle(self) -> float:
        """Placement angle; in ``on_edge`` mode the apex angle between two
        opposite slant edges, derived from the cell proportions."""
        if self.node_angle is not None:
            return self.node_angle
        return 2.0 * math.acos(self.cell_height / self.slant_length)


@dataclass(eq=False)
class LatticeNode:
    id: int
    position: np.ndarray

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float).reshape(3)


@dataclass(frozen=True)
class Strut:
    node_a: int
    node_b: int
    side: float  # square cross-section side [mm]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


@dataclass(eq=False)
class BeamNetwork:
    """Nodes plus square-section struts; the common geometry currency.

    ``provenance`` records what produced the network
    (``unit-cell``, ``tiled``, ``cross`` or ``hexagonal``).
    """

    nodes: list[LatticeNode] = field(default_factory=list)
    struts: list[Strut] = field(default_factory=list)
    provenance: str = "unit-cell"

    def node_index(self) -> dict[int, int]:
        return {node.id: i for i, node in enumerate(self.nodes)}

    def positions(self) -> np.ndarray:
        if not self.nodes:
            return np.zeros((0, 3))
        return np.vstack([node.position for node in self.nodes])

    def position_of(self, node_id: int) -> np.ndarray:
        return self.nodes[self.node_index()[node_id]].position

    def strut_vector(self, strut: Strut) -> np.ndarray:
        index = self.node_index()
        return (self.nodes[index[strut.node_b]].position
                - self.nodes[index[strut.node_a]].position)

    def strut_length(self, strut: Strut) -> float:
        return float(np.linalg.norm(self.strut_vector(strut)))

    def lengths(self) -> np.ndarray:
        return np.array([self.strut_length(s) for s in self.struts])

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        pos = self.positions()
        return pos.min(axis=0), pos.max(axis=0)

    def is_connected(self) -> bool:
        """Union-find connectivity; isolated nodes count as disconnection."""
        n = len(self.nodes)
        if n <= 1:
            return True
        index = self.node_index()
        uf = _UnionFind(n)
        for strut in self.struts:
            uf.union(index[strut.node_a], index[strut.node_b])
        root = uf.find(0)
        return all(uf.find(i) == root for i in range(1, n))

    def validate(self, tol: float = MERGE_TOL) -> None:
        """Raise :class:`GeometryError` on malformed geometry."""
        ids = [node.id for node in self.nodes]
        if len(set(ids)) != len(ids):
            raise GeometryError("node ids are not unique")
        pos = self.positions()
        if pos.size and not np.all(np.isfinite(pos)):
            raise GeometryError("node positions contain non-finite values")
        index = self.node_index()
        seen_pairs = set()
        for k, strut in enumerate(self.struts):
            if strut.node_a == strut.node_b:
                raise GeometryError(f"strut {k} connects node {strut.node_a} to itself")
            if strut.node_a not in index or strut.node_b not in index:
                raise GeometryError(
                    f"strut {k} references missing node "
                    f"{strut.node_a if strut.node_a not in index else strut.node_b}")
            if self.strut_length(strut) <= tol:
                raise GeometryError(
                    f"strut {k} ({strut.node_a}-{strut.node_b}) is shorter than "
                    f"the merge tolerance {tol:g} mm")
            pair = (min(strut.node_a, strut.node_b), max(strut.node_a, strut.node_b))
            if pair in seen_pairs:
                raise GeometryError(f"duplicate strut between nodes {pair[0]} and {pair[1]}")
            seen_pairs.add(pair)
        if len(self.nodes) > 1:
            pairs = cKDTree(pos).query_pairs(r=tol)
            if pairs:
                i, j = sorted(pairs)[0]
                raise GeometryError(
                    f"nodes {self.nodes[i].id} and {self.nodes[j].id} are closer "
                    f"than the merge tolerance {tol:g} mm")


# ---------------------------------------------------------------------------
# Unit cell
# ---------------------------------------------------------------------------

def unit_cell_edges(brace_ring: bool = True) -> list[tuple[int, int]]:
    """Default strut connectivity of the pyramidal cell.

    Top perimeter ring 1-2-...-8-1, four slant edges corner->apex each split
    at its interior node, and (optionally) the brace ring 9-10-11-12-9 that
    ties the interior nodes together.
    """
    ring = [(i, i % 8 + 1) for i in range(1, 9)]
    slants = []
    for interior, corner in sorted(_INTERIOR_CORNER.items()):
        slants.append((corner, interior))
        slants.append((interior, APEX_ID))
    edges = ring + slants
    if brace_ring:
        edges += [(9, 10), (10, 11), (11, 12), (12, 9)]
    return edges


def _unit_cell_positions(params: UnitCellParams) -> dict[int, np.ndarray]:
    w = params.cell_width / 2
    d = params.cell_depth / 2
    h = params.cell_height
    pos = {
        1: np.array([+w, -d, h]),
        2: np.array([0.0, -d, h]),
        3: np.array([-w, -d, h]),
        4: np.array([-w, 0.0, h]),
        5: np.array([-w, +d, h]),
        6: np.array([0.0, +d, h]),
        7: np.array([+w, +d, h]),
        8: np.array([+w, 0.0, h]),
        APEX_ID: np.zeros(3),
    }
    offset = params.offset_distance
    if params.placement == "on_edge":
        # Corner-to-apex edge passes through the origin, so walking a distance
        # `offset` toward the apex is a pure scaling of the corner position.
        scale = 1.0 - offset / params.slant_length
        for interior, corner in _INTERIOR_CORNER.items():
            pos[interior] = pos[corner] * scale
    else:
        half = params.offset_angle / 2
        s = offset * math.sin(half)
        c = offset * math.cos(half)
        for interior, corner in _INTERIOR_CORNER.items():
            cx, cy, _ = pos[corner]
            pos[interior] = np.array([cx - math.copysign(s, cx),
                                      cy - math.copysign(s, cy),
                                      h - c])
    return pos


def build_unit_cell(params: UnitCellParams,
                    edges: Sequence[tuple[int, int]] | None = None) -> BeamNetwork:
    """Generate the 13-node pyramidal unit cell.

    ``edges`` overrides the default connectivity (useful for experimenting
    with alternative strut layouts); it must reference node ids 1..13.
    """
    positions = _unit_cell_positions(params)
    if edges is None:
        edges = unit_cell_edges(params.brace_ring)
    nodes = [LatticeNode(i, positions[i]) for i in sorted(positions)]
    struts = [Strut(a, b, params.thickness) for a, b in edges]
    network = BeamNetwork(nodes, struts, provenance="unit-cell")
    network.validate()
    if not network.is_connected():
        raise DisconnectedNetworkError("unit cell connectivity is not connected")
    return network


# ---------------------------------------------------------------------------
# Tiling and node merging
# ---------------------------------------------------------------------------

def _merge_raw(positions: np.ndarray,
               struts: Iterable[tuple[int, int, float]],
               provenance: str,
               tol: float = MERGE_TOL) -> BeamNetwork:
    """Merge coincident points and deduplicate struts.

    ``struts`` reference row indices of ``positions``. Coincident points
    (distance <= tol) collapse onto the first occurrence; surviving points are
    re-numbered 1..M in first-occurrence order, which keeps the result
    deterministic.
    """
    n = len(positions)
    uf = _UnionFind(n)
    if n > 1:
        for i, j in cKDTree(positions).query_pairs(r=tol):
            uf.union(i, j)
    new_id: dict[int, int] = {}
    nodes: list[LatticeNode] = []
    for i in range(n):
        root = uf.find(i)
        if root not in new_id:
            new_id[root] = len(nodes) + 1
            nodes.append(LatticeNode(new_id[root], positions[root]))
    merged: list[Strut] = []
    seen: set[tuple[int, int]] = set()
    for ia, ib, side in struts:
        a = new_id[uf.find(ia)]
        b = new_id[uf.find(ib)]
        if a == b:
            continue  # strut collapsed by the merge
        pair = (min(a, b), max(a, b))
        if pair in seen:
            continue
        seen.add(pair)
        merged.append(Strut(a, b, side))
    return BeamNetwork(nodes, merged, provenance=provenance)


def merge_network(network: BeamNetwork, tol: float = MERGE_TOL) -> BeamNetwork:
    """Re-run node merging / strut deduplication on an existing network."""
    index = network.node_index()
    struts = [(index[s.node_a], index[s.node_b], s.side) for s in network.struts]
    return _merge_raw(network.positions(), struts, network.provenance, tol)


def tile(params: UnitCellParams, nx: int, ny: int, nz: int) -> BeamNetwork:
    """Tile the unit cell on a grid with pitches (cell width, depth, height).

    Coincident nodes on shared faces are merged and duplicated struts removed,
    so the array behaves as one superposed structure.

    Cells stacked vertically share no nodes by construction: the apex of an
    elevated cell lands at the center of the ring opening below it. Each
    elevated cell therefore gets four apex-seat ties from its apex to the ring
    edge midpoints of the cell underneath, which keeps stacked arrays
    connected (and gives the apex something to rest on when printed).
    """
    for name, count in (("nx", nx), ("ny", ny), ("nz", nz)):
        if not isinstance(count, (int, np.integer)) or count < 1:
            raise ParameterError(f"{name} must be an integer >= 1, got {count!r}")
    base = build_unit_cell(params)
    if nx == ny == nz == 1:
        return base
    pitch = np.array([params.cell_width, params.cell_depth, params.cell_height])
    base_pos = base.positions()
    index = base.node_index()
    base_struts = [(index[s.node_a], index[s.node_b]) for s in base.struts]
    seat_offsets = [np.array([params.cell_width / 2, 0.0, 0.0]),
                    np.array([-params.cell_width / 2, 0.0, 0.0]),
                    np.array([0.0, params.cell_depth / 2, 0.0]),
                    np.array([0.0, -params.cell_depth / 2, 0.0])]
    positions = []
    struts = []
    offset_count = 0
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                shift = pitch * np.array([i, j, k], dtype=float)
                positions.append(base_pos + shift)
                struts.extend((ia + offset_count, ib + offset_count, params.thickness)
                              for ia, ib in base_struts)
                offset_count += len(base.nodes)
                if k > 0:
                    # apex-seat ties into the ring plane below
                    apex = shift  # the cell-local apex sits at the origin
                    for seat in seat_offsets:
                        struts.append((offset_count - len(base.nodes) + index[APEX_ID],
                                       offset_count, params.thickness))
                        positions.append((apex + seat).reshape(1, 3))
                        offset_count += 1
    network = _merge_raw(np.vstack(positions), struts, provenance="tiled")
    network.validate()
    if not network.is_connected():
        raise DisconnectedNetworkError("tiled lattice is not connected")
    return network


# ---------------------------------------------------------------------------
# Reference patterns (cross, hexagonal)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangular footprint in the xy plane."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ParameterError("region must have positive width and depth")

    @classmethod
    def from_size(cls, width: float, depth: float,
                  origin: tuple[float, float] = (0.0, 0.0)) -> "Region":
        return cls(origin[0], origin[1], origin[0] + width, origin[1] + depth)

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def depth(self) -> float:
        return self.y_max - self.y_min

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))


def _clip_segment(p0: np.ndarray, p1: np.ndarray,
                  region: Region) -> tuple[np.ndarray, np.ndarray] | None:
    """Liang-Barsky clip of a 2D segment against the region.

    Segments running parallel to a boundary are rejected only when they lie
    more than a relative slack outside it, so edges sitting exactly on the
    boundary (up to float noise) survive.
    """
    slack = CLIP_SLACK * max(region.width, region.depth)
    lo = (region.x_min, region.y_min)
    hi = (region.x_max, region.y_max)
    d = p1 - p0
    t0, t1 = 0.0, 1.0
    for axis in range(2):
        for p, q in ((-d[axis], p0[axis] - lo[axis]), (d[axis], hi[axis] - p0[axis])):
            if p == 0.0:
                if q < -slack:
                    return None
                continue
            r = q / p
            if p < 0.0:
                if r > t1:
                    return None
                t0 = max(t0, r)
            else:
                if r < t0:
                    return None
                t1 = min(t1, r)
    if t1 - t0 <= 0.0:
        return None
    a = p0 + t0 * d
    b = p0 + t1 * d
    if np.linalg.norm(b - a) <= MERGE_TOL:
        return None
    return a, b


def _cross_layer_segments(region: Region, pitch: float) -> list[tuple[np.ndarray, np.ndarray]]:
    """Two families of +-45 degree lines with perpendicular spacing ``pitch``,
    anchored so one line of each family passes through the region center,
    clipped to the region and split at cross-family intersections."""
    cx, cy = region.center
    center = np.array([cx, cy])
    reach = math.hypot(region.width, region.depth)
    families = []
    for direction, normal in (((1.0, 1.0), (1.0, -1.0)), ((1.0, -1.0), (1.0, 1.0))):
        d = np.array(direction) / math.sqrt(2.0)
        n = np.array(normal) / math.sqrt(2.0)
        segs = []
        kmax = int(math.ceil(reach / (2 * pitch))) + 1
        for k in range(-kmax, kmax + 1):
            anchor = center + k * pitch * n
            clipped = _clip_segment(anchor - reach * d, anchor + reach * d, region)
            if clipped is not None:
                segs.append(clipped)
        families.append(segs)
    return _split_at_intersections(families[0], families[1])


def _split_at_intersections(segs_a, segs_b) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split every segment of each family at its crossings with the other
    family, so crossings become shared nodes and the layer stays connected."""
    cut_params: list[list[float]] = [[0.0, 1.0] for _ in segs_a]
    cut_params_b: list[list[float]] = [[0.0, 1.0] for _ in segs_b]
    for i, (p, p2) in enumerate(segs_a):
        r = p2 - p
        for j, (q, q2) in enumerate(segs_b):
            s = q2 - q
            denom = r[0] * s[1] - r[1] * s[0]
            if abs(denom) < 1e-12:
                continue
            qp = q - p
            t = (qp[0] * s[1] - qp[1] * s[0]) / denom
            u = (qp[0] * r[1] - qp[1] * r[0]) / denom
            if -1e-12 <= t <= 1 + 1e-12 and -1e-12 <= u <= 1 + 1e-12:
                cut_params[i].append(min(max(t, 0.0), 1.0))
                cut_params_b[j].append(min(max(u, 0.0), 1.0))
    pieces = []
    for (p, p2), ts in zip(list(segs_a) + list(segs_b), cut_params + cut_params_b):
        d = p2 - p
        length = np.linalg.norm(d)
        ts = sorted(set(ts))
        for t0, t1 in zip(ts[:-1], ts[1:]):
            if (t1 - t0) * length > MERGE_TOL:
                pieces.append((p + t0 * d, p + t1 * d))
    return pieces


def _hex_layer_segments(region: Region, cell_size: float) -> list[tuple[np.ndarray, np.ndarray]]:
    """Flat-top regular hexagon tessellation (side = cell_size) anchored with
    one hexagon centered in the region, edges clipped to the region."""
    s = cell_size
    cx, cy = region.center
    col_pitch = 1.5 * s
    row_pitch = math.sqrt(3.0) * s
    i_min = int(math.floor((region.x_min - cx - 2 * s) / col_pitch))
    i_max = int(math.ceil((region.x_max - cx + 2 * s) / col_pitch))
    j_min = int(math.floor((region.y_min - cy - 2 * s) / row_pitch))
    j_max = int(math.ceil((region.y_max - cy + 2 * s) / row_pitch))
    corners = [np.array([s * math.cos(k * math.pi / 3), s * math.sin(k * math.pi / 3)])
               for k in range(6)]
    segs = []
    for i in range(i_min, i_max + 1):
        for j in range(j_min, j_max + 1):
            center = np.array([cx + i * col_pitch,
                               cy + j * row_pitch + (row_pitch / 2 if i % 2 else 0.0)])
            for k in range(6):
                clipped = _clip_segment(center + corners[k],
                                        center + corners[(k + 1) % 6], region)
                if clipped is not None:
                    segs.append(clipped)
    return segs


def _extrude_layers(segments, wall: float, height: float, spacing: float,
                    provenance: str) -> BeamNetwork:
    """Stack copies of a 2D segment layer along z and join the stacked layer
    nodes with vertical struts. Layer spacing is as close to ``spacing`` as an
    integer level count allows."""
    if not segments:
        raise PatternRegionError("no pattern segments fall inside the region")
    n_gaps = max(1, int(round(height / spacing)))
    levels = np.linspace(0.0, height, n_gaps + 1)
    # Unique 2D endpoints carry the verticals between consecutive levels.
    endpoints = np.array([p for seg in segments for p in seg])
    uf = _UnionFind(len(endpoints))
    for i, j in cKDTree(endpoints).query_pairs(r=MERGE_TOL):
        uf.union(i, j)
    anchor_points = [endpoints[i] for i in range(len(endpoints)) if uf.find(i) == i]

    positions = []
    struts = []

    def add_point(xy, z) -> int:
        positions.append((xy[0], xy[1], z))
        return len(positions) - 1

    for z in levels:
        for a, b in segments:
            struts.append((add_point(a, z), add_point(b, z), wall))
    for xy in anchor_points:
        for z0, z1 in zip(levels[:-1], levels[1:]):
            struts.append((add_point(xy, z0), add_point(xy, z1), wall))
    network = _merge_raw(np.asarray(positions, dtype=float), struts, provenance)
    network.validate()
    if not network.is_connected():
        raise DisconnectedNetworkError(
            f"{provenance} pattern came out disconnected; widen the region or "
            "reduce the pitch")
    return network


def generate_cross_pattern(region: Region, pitch: float, wall: float,
                           height: float) -> BeamNetwork:
    """Diagonal (+-45 degree) grid infill proxy, extruded into stacked layers
    joined by verticals. ``pitch`` is the perpendicular spacing between
    neighboring parallel lines; crossings are split into shared nodes."""
    if not pitch > wall > 0:
        raise ParameterError(f"need pitch > wall > 0, got pitch={pitch!r} wall={wall!r}")
    if height <= 0:
        raise ParameterError(f"height must be > 0, got {height!r}")
    if region.width < pitch * (1 - 1e-9) or region.depth < pitch * (1 - 1e-9):
        raise PatternRegionError(
            f"region {region.width:g} x {region.depth:g} mm is smaller than one "
            f"pitch ({pitch:g} mm)")
    return _extrude_layers(_cross_layer_segments(region, pitch), wall, height,
                           spacing=pitch, provenance="cross")


def generate_hexagonal_pattern(region: Region, cell_size: float, wall: float,
                               height: float) -> BeamNetwork:
    """Honeycomb infill proxy: regular flat-top hexagons of side ``cell_size``
    clipped to the region, extruded like the cross pattern."""
    if not cell_size > wall > 0:
        raise ParameterError(
            f"need cell_size > wall > 0, got cell_size={cell_size!r} wall={wall!r}")
    if height <= 0:
        raise ParameterError(f"height must be > 0, got {height!r}")
    if (region.width < 2 * cell_size * (1 - 1e-9)
            or region.depth < math.sqrt(3.0) * cell_size * (1 - 1e-9)):
        raise PatternRegionError(
            f"region {region.width:g} x {region.depth:g} mm cannot host one "
            f"hexagon of side {cell_size:g} mm")
    return _extrude_layers(_hex_layer_segments(region, cell_size), wall, height,
                           spacing=cell_size, provenance="hexagonal")


# ---------------------------------------------------------------------------
# Mass and printability
# ---------------------------------------------------------------------------

def network_mass(network: BeamNetwork, density: float) -> float:
    """Total mass: sum of side^2 * length * density over all struts [kg]."""
    if density <= 0:
        raise ParameterError(f"density must be > 0, got {density!r}")
    return float(sum(s.side ** 2 * network.strut_length(s) * density
                     for s in network.struts))


@dataclass(frozen=True)
class PrintabilityReport:
    """Per-strut print classification under a given build direction.

    ``classifications`` parallels ``network.struts``; values are
    ``"self-supporting"``, ``"bridge"`` or ``"unsupported"``. The check passes
    iff nothing is unsupported.
    """

    classifications: tuple[str, ...]
    angles_deg: tuple[float, ...]
    passed: bool
    build_direction: tuple[float, float, float]

    def counts(self) -> dict[str, int]:
        out = {"self-supporting": 0, "bridge": 0, "unsupported": 0}
        for c in self.classifications:
            out[c] += 1
        return out

    @property
    def unsupported(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.classifications)
                     if c == "unsupported")


def printability_check(network: BeamNetwork,
                       build_direction=(0.0, 0.0, 1.0),
                       overhang_limit: float = 45.0,
                       bridge_max: float = 20.0) -> PrintabilityReport:
    """Classify every strut as self-supporting, bridge or unsupported.

    A strut whose angle to the build plane reaches ``overhang_limit`` degrees
    is self-supporting, as is any strut lying in the build-plate plane.
    Shallower struts count as bridges when they are at most ``bridge_max``
    long and both endpoints are supported: on the plate, at the top of a chain
    of self-supporting struts rooted on the plate, or linked to such a node
    through other bridge-length shallow struts.

    This is a heuristic screen for material-extrusion printing, not a process
    simulation.
    """
    direction = np.asarray(build_direction, dtype=float).reshape(3)
    norm = np.linalg.norm(direction)
    if not (np.isfinite(norm) and norm > 0):
        raise ParameterError("build direction must be a finite nonzero vector")
    direction = direction / norm
    if not 0.0 < overhang_limit <= 90.0:
        raise ParameterError(
            f"overhang limit must lie in (0, 90] degrees, got {overhang_limit!r}")
    if bridge_max <= 0:
        raise ParameterError(f"bridge_max must be > 0, got {bridge_max!r}")

    if not network.struts:
        return PrintabilityReport((), (), True, tuple(direction))

    index = network.node_index()
    positions = network.positions()
    heights = positions @ direction
    plate_tol = 1e-6
    plate = heights <= heights.min() + plate_tol

    n = len(network.nodes)
    angles = []
    endpoints = []
    lengths = []
    for strut in network.struts:
        ia, ib = index[strut.node_a], index[strut.node_b]
        vec = positions[ib] - positions[ia]
        length = float(np.linalg.norm(vec))
        sin_angle = min(1.0, abs(float(vec @ direction)) / length)
        angles.append(math.degrees(math.asin(sin_angle)))
        endpoints.append((ia, ib))
        lengths.append(length)

    steep = [angle >= overhang_limit - 1e-9 for angle in angles]
    short = [length <= bridge_max * (1 + 1e-12) for length in lengths]

    # Anchored nodes: on the plate, or reached from the plate by climbing
    # self-supporting struts.
    anchored = list(plate)
    changed = True
    while changed:
        changed = False
        for k, (ia, ib) in enumerate(endpoints):
            if not steep[k]:
                continue
            lo, hi = (ia, ib) if heights[ia] <= heights[ib] else (ib, ia)
            if anchored[lo] and not anchored[hi]:
                anchored[hi] = True
                changed = True

    # Bridge-length shallow struts propagate endpoint support sideways.
    uf = _UnionFind(n)
    for k, (ia, ib) in enumerate(endpoints):
        if not steep[k] and short[k]:
            uf.union(ia, ib)
    anchored_roots = {uf.find(i) for i in range(n) if anchored[i]}

    def supported(i: int) -> bool:
        return anchored[i] or uf.find(i) in anchored_roots

    classes = []
    for k, (ia, ib) in enumerate(endpoints):
        if steep[k]:
            classes.append("self-supporting")
        elif plate[ia] and plate[ib]:
            classes.append("self-supporting")  # rests on the build plate
        elif short[k] and supported(ia) and supported(ib):
            classes.append("bridge")
        else:
            classes.append("unsupported")

    return PrintabilityReport(tuple(classes), tuple(angles),
                              "unsupported" not in classes, tuple(direction))
