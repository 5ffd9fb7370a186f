"""Workbench configuration: JSON parsing, validation and model building.

Configs are JSON with fixed units (mm, N, MPa, N*mm, kg). Validation collects
every problem it finds instead of stopping at the first one. Node selectors
choose nodes either by id (``{"ids": [1, 2]}``) or by coordinate predicate
(``{"where": {"z": 100.0}}``, ``{"where": {"x": "min"}}``); predicates on
several axes are ANDed. Coordinate matches use the node-merge tolerance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError
from .geometry import (
    MERGE_TOL,
    BeamNetwork,
    Region,
    UnitCellParams,
    build_unit_cell,
    generate_cross_pattern,
    generate_hexagonal_pattern,
    tile,
)
from .sizing import SizingSpec
from .solver import PETG, Material, StructuralModel

REQUIRED_TOP_KEYS = ("cell",)
TOP_KEYS = ("cell", "tiling", "material", "constraints", "loads",
            "printability", "sizing", "compare")

_CELL_KEYS = ("height", "width", "depth", "thickness", "node_offset",
              "node_angle", "aspect_x", "aspect_y", "aspect_z", "placement",
              "section", "brace_ring")
_CELL_REQUIRED = ("height", "width", "depth", "thickness")


@dataclass(frozen=True)
class NodeSelector:
    ids: tuple[int, ...] | None = None
    where: Mapping[str, object] | None = None
    label: str = "selector"

    def resolve(self, network: BeamNetwork) -> list[int]:
        if self.ids is not None:
            index = network.node_index()
            missing = [i for i in self.ids if i not in index]
            if missing:
                raise ConfigError(
                    f"{self.label}: unresolved node id(s) {missing} "
                    f"(network has nodes {min(index)}..{max(index)})")
            return list(self.ids)
        axes = {"x": 0, "y": 1, "z": 2}
        positions = network.positions()
        mask = np.ones(len(positions), dtype=bool)
        for axis, target in self.where.items():
            column = positions[:, axes[axis]]
            if target == "min":
                value = column.min()
            elif target == "max":
                value = column.max()
            else:
                value = float(target)
            mask &= np.abs(column - value) <= MERGE_TOL
        ids = [network.nodes[i].id for i in np.flatnonzero(mask)]
        if not ids:
            raise ConfigError(f"{self.label}: no node matches {dict(self.where)}")
        return ids


@dataclass(frozen=True)
class ConstraintSpec:
    nodes: NodeSelector
    fix: object  # "all" or list of dof names


@dataclass(frozen=True)
class LoadSpec:
    nodes: NodeSelector
    force: tuple[float, float, float]
    moment: tuple[float, float, float]

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.force + self.moment, dtype=float)


@dataclass(frozen=True)
class PrintabilitySpec:
    overhang_limit: float = 45.0
    bridge_max: float = 20.0
    build_direction: tuple[float, float, float] = (0.0, 0.0, 1.0)


@dataclass(frozen=True)
class SizingBlock:
    max_displacement: float
    bounds: tuple[float, float]
    tolerance: float = 1e-3


@dataclass(frozen=True)
class PatternSpec:
    kind: str           # "lattice" | "cross" | "hexagonal"
    name: str
    options: Mapping[str, float]


@dataclass(frozen=True)
class CompareBlock:
    region: Region
    height: float
    force: float
    patterns: tuple[PatternSpec, ...]
    directions: tuple[str, ...] = ("X", "Y", "Z")


@dataclass
class WorkbenchConfig:
    cell: UnitCellParams
    tiling: tuple[int, int, int] = (1, 1, 1)
    material: Material = PETG
    constraints: list[ConstraintSpec] = field(default_factory=list)
    loads: list[LoadSpec] = field(default_factory=list)
    printability: PrintabilitySpec = PrintabilitySpec()
    sizing: SizingBlock | None = None
    compare: CompareBlock | None = None


class _Collector:
    def __init__(self):
        self.problems: list[str] = []

    def add(self, message: str) -> None:
        self.problems.append(message)

    def number(self, data: Mapping, key: str, path: str, *, required=False,
               default=None, positive=False):
        if key not in data:
            if required:
                self.add(f"{path}.{key}: required key is missing")
            return default
        value = data[key]
        if not isinstance(value, (int, float)) or isinstance(value, bool) \
                or not math.isfinite(float(value)):
            self.add(f"{path}.{key}: expected a finite number, got {value!r}")
            return default
        value = float(value)
        if positive and value <= 0:
            self.add(f"{path}.{key}: must be > 0, got {value:g}")
            return default
        return value

    def unknown(self, data: Mapping, allowed: Sequence[str], path: str) -> None:
        for key in data:
            if key not in allowed:
                self.add(f"{path}.{key}: unknown key" if path else f"{key}: unknown key")


def _parse_selector(data, path: str, collect: _Collector) -> NodeSelector | None:
    if not isinstance(data, Mapping):
        collect.add(f"{path}: expected an object with 'ids' or 'where'")
        return None
    collect.unknown(data, ("ids", "where"), path)
    if ("ids" in data) == ("where" in data):
        collect.add(f"{path}: exactly one of 'ids' or 'where' is required")
        return None
    if "ids" in data:
        ids = data["ids"]
        if (not isinstance(ids, list) or not ids
                or not all(isinstance(i, int) and not isinstance(i, bool) for i in ids)):
            collect.add(f"{path}.ids: expected a non-empty list of integers")
            return None
        return NodeSelector(ids=tuple(ids), label=path)
    where = data["where"]
    if not isinstance(where, Mapping) or not where:
        collect.add(f"{path}.where: expected a non-empty object of axis predicates")
        return None
    for axis, value in where.items():
        if axis not in ("x", "y", "z"):
            collect.add(f"{path}.where.{axis}: unknown axis (use x, y or z)")
            return None
        if not (value in ("min", "max") or isinstance(value, (int, float))):
            collect.add(f"{path}.where.{axis}: expected a number, 'min' or 'max'")
            return None
    return NodeSelector(where=dict(where), label=path)


def _parse_cell(data, collect: _Collector) -> UnitCellParams | None:
    if not isinstance(data, Mapping):
        collect.add("cell: expected an object")
        return None
    collect.unknown(data, _CELL_KEYS, "cell")
    values = {}
    for key in _CELL_REQUIRED:
        values[key] = collect.number(data, key, "cell", required=True, positive=True)
    for key in ("node_offset", "node_angle"):
        if key in data:
            values[key] = collect.number(data, key, "cell", positive=True)
    for key in ("aspect_x", "aspect_y", "aspect_z"):
        if key in data:
            values[key] = collect.number(data, key, "cell", positive=True)
    if "placement" in data:
        values["placement"] = data["placement"]
    if "section" in data:
        values["section"] = data["section"]
    if "brace_ring" in data:
        if not isinstance(data["brace_ring"], bool):
            collect.add("cell.brace_ring: expected true or false")
        else:
            values["brace_ring"] = data["brace_ring"]
    if any(values.get(key) is None for key in _CELL_REQUIRED):
        return None
    try:
        return UnitCellParams(**values)
    except Exception as exc:
        collect.add(f"cell: {exc}")
        return None


def _parse_material(data, collect: _Collector) -> Material:
    if not isinstance(data, Mapping):
        collect.add("material: expected an object")
        return PETG
    collect.unknown(data, ("elastic_modulus", "poisson_ratio", "density"), "material")
    e = collect.number(data, "elastic_modulus", "material", required=True, positive=True)
    nu = collect.number(data, "poisson_ratio", "material", required=True)
    rho = collect.number(data, "density", "material", default=PETG.density, positive=True)
    if nu is not None and not -1.0 < nu < 0.5:
        collect.add(f"material.poisson_ratio: must lie in (-1, 0.5), got {nu:g}")
        nu = None
    if e is None or nu is None or rho is None:
        return PETG
    return Material(e, nu, rho)


def _parse_vector(data, key: str, path: str, collect: _Collector,
                  default=(0.0, 0.0, 0.0)):
    if key not in data:
        return tuple(default)
    value = data[key]
    if (not isinstance(value, list) or len(value) != 3
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                       for v in value)):
        collect.add(f"{path}.{key}: expected a list of 3 numbers")
        return tuple(default)
    return tuple(float(v) for v in value)


def _parse_constraints(data, collect: _Collector) -> list[ConstraintSpec]:
    if not isinstance(data, list):
        collect.add("constraints: expected a list")
        return []
    out = []
    for i, item in enumerate(data):
        path = f"constraints[{i}]"
        if not isinstance(item, Mapping):
            collect.add(f"{path}: expected an object")
            continue
        collect.unknown(item, ("nodes", "fix"), path)
        selector = _parse_selector(item.get("nodes"), f"{path}.nodes", collect)
        fix = item.get("fix", "all")
        from .solver import DOF_NAMES
        if fix != "all" and (not isinstance(fix, list)
                             or not all(f in DOF_NAMES for f in fix)):
            collect.add(f"{path}.fix: expected 'all' or a list of dof names "
                        f"{DOF_NAMES}")
            continue
        if selector is not None:
            out.append(ConstraintSpec(selector, "all" if fix == "all" else tuple(fix)))
    return out


def _parse_loads(data, collect: _Collector) -> list[LoadSpec]:
    if not isinstance(data, list):
        collect.add("loads: expected a list")
        return []
    out = []
    for i, item in enumerate(data):
        path = f"loads[{i}]"
        if not isinstance(item, Mapping):
            collect.add(f"{path}: expected an object")
            continue
        collect.unknown(item, ("nodes", "force", "moment"), path)
        selector = _parse_selector(item.get("nodes"), f"{path}.nodes", collect)
        force = _parse_vector(item, "force", path, collect)
        moment = _parse_vector(item, "moment", path, collect)
        if force == (0.0, 0.0, 0.0) and moment == (0.0, 0.0, 0.0):
            collect.add(f"{path}: force and moment are both zero")
        if selector is not None:
            out.append(LoadSpec(selector, force, moment))
    return out


def _parse_printability(data, collect: _Collector) -> PrintabilitySpec:
    if not isinstance(data, Mapping):
        collect.add("printability: expected an object")
        return PrintabilitySpec()
    collect.unknown(data, ("overhang_limit", "bridge_max", "build_direction"),
                    "printability")
    limit = collect.number(data, "overhang_limit", "printability", default=45.0,
                           positive=True)
    bridge = collect.number(data, "bridge_max", "printability", default=20.0,
                            positive=True)
    direction = _parse_vector(data, "build_direction", "printability", collect,
                              default=(0.0, 0.0, 1.0))
    if limit is not None and limit > 90.0:
        collect.add(f"printability.overhang_limit: must be <= 90, got {limit:g}")
        limit = 45.0
    return PrintabilitySpec(limit or 45.0, bridge or 20.0, direction)


def _parse_sizing(data, collect: _Collector) -> SizingBlock | None:
    if not isinstance(data, Mapping):
        collect.add("sizing: expected an object")
        return None
    collect.unknown(data, ("max_displacement", "bounds", "tolerance"), "sizing")
    limit = collect.number(data, "max_displacement", "sizing", required=True,
                           positive=True)
    tol = collect.number(data, "tolerance", "sizing", default=1e-3, positive=True)
    bounds = data.get("bounds")
    if (not isinstance(bounds, list) or len(bounds) != 2
            or not all(isinstance(b, (int, float)) and not isinstance(b, bool)
                       for b in bounds)):
        collect.add("sizing.bounds: expected [lower, upper] thickness in mm")
        return None
    lo, hi = float(bounds[0]), float(bounds[1])
    if not 0 < lo < hi:
        collect.add(f"sizing.bounds: need 0 < lower < upper, got [{lo:g}, {hi:g}]")
        return None
    if limit is None or tol is None:
        return None
    return SizingBlock(limit, (lo, hi), tol)


_PATTERN_OPTION_KEYS = {
    "lattice": (),
    "cross": ("pitch", "wall"),
    "hexagonal": ("cell_size", "wall"),
}


def _parse_compare(data, collect: _Collector) -> CompareBlock | None:
    if not isinstance(data, Mapping):
        collect.add("compare: expected an object")
        return None
    collect.unknown(data, ("region", "height", "force", "directions", "patterns"),
                    "compare")
    region_data = data.get("region")
    region = None
    if not isinstance(region_data, Mapping):
        collect.add("compare.region: expected an object with width and depth")
    else:
        collect.unknown(region_data, ("width", "depth"), "compare.region")
        width = collect.number(region_data, "width", "compare.region",
                               required=True, positive=True)
        depth = collect.number(region_data, "depth", "compare.region",
                               required=True, positive=True)
        if width and depth:
            region = Region.from_size(width, depth)
    height = collect.number(data, "height", "compare", required=True, positive=True)
    force = collect.number(data, "force", "compare", default=100.0, positive=True)
    directions = data.get("directions", ["X", "Y", "Z"])
    if (not isinstance(directions, list) or not directions
            or not all(d in ("X", "Y", "Z") for d in directions)):
        collect.add("compare.directions: expected a non-empty list drawn from X, Y, Z")
        directions = ["X", "Y", "Z"]
    patterns_data = data.get("patterns")
    patterns: list[PatternSpec] = []
    if not isinstance(patterns_data, list) or not patterns_data:
        collect.add("compare.patterns: expected a non-empty list of pattern objects")
    else:
        for i, item in enumerate(patterns_data):
            path = f"compare.patterns[{i}]"
            if not isinstance(item, Mapping):
                collect.add(f"{path}: expected an object")
                continue
            kind = item.get("type")
            if kind not in _PATTERN_OPTION_KEYS:
                collect.add(f"{path}.type: expected one of "
                            f"{sorted(_PATTERN_OPTION_KEYS)}, got {kind!r}")
                continue
            collect.unknown(item, ("type", "name") + _PATTERN_OPTION_KEYS[kind], path)
            options = {}
            for key in _PATTERN_OPTION_KEYS[kind]:
                value = collect.number(item, key, path, required=True, positive=True)
                if value is not None:
                    options[key] = value
            name = item.get("name", kind)
            patterns.append(PatternSpec(kind, str(name), options))
    if region is None or height is None or force is None or not patterns:
        return None
    return CompareBlock(region, height, force, tuple(patterns), tuple(directions))


def load_config(text: str) -> WorkbenchConfig:
    """Parse and validate configuration JSON; raises :class:`ConfigError`
    carrying every problem found."""
    collect = _Collector()
    if not text or not text.strip():
        raise ConfigError(
            "config is empty; required keys: " + ", ".join(
                f"{k} (with {', '.join(_CELL_REQUIRED)})" for k in REQUIRED_TOP_KEYS))
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(data, Mapping):
        raise ConfigError("config root must be a JSON object")

    collect.unknown(data, TOP_KEYS, "")
    for key in REQUIRED_TOP_KEYS:
        if key not in data:
            collect.add(f"{key}: required key is missing")

    cell = _parse_cell(data["cell"], collect) if "cell" in data else None

    tiling = (1, 1, 1)
    if "tiling" in data:
        block = data["tiling"]
        if not isinstance(block, Mapping):
            collect.add("tiling: expected an object with nx, ny, nz")
        else:
            collect.unknown(block, ("nx", "ny", "nz"), "tiling")
            counts = []
            for key in ("nx", "ny", "nz"):
                value = block.get(key, 1)
                if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                    collect.add(f"tiling.{key}: expected an integer >= 1, got {value!r}")
                    value = 1
                counts.append(value)
            tiling = tuple(counts)

    material = _parse_material(data["material"], collect) if "material" in data else PETG
    constraints = _parse_constraints(data["constraints"], collect) \
        if "constraints" in data else []
    loads = _parse_loads(data["loads"], collect) if "loads" in data else []
    printability = _parse_printability(data["printability"], collect) \
        if "printability" in data else PrintabilitySpec()
    sizing = _parse_sizing(data["sizing"], collect) if "sizing" in data else None
    compare = _parse_compare(data["compare"], collect) if "compare" in data else None

    if collect.problems:
        raise ConfigError(collect.problems)
    return WorkbenchConfig(cell, tiling, material, constraints, loads,
                           printability, sizing, compare)


def load_config_file(path) -> WorkbenchConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return load_config(handle.read())


# ---------------------------------------------------------------------------
# Builders: config -> geometry / models
# ---------------------------------------------------------------------------

def build_network(config: WorkbenchConfig,
                  cell: UnitCellParams | None = None) -> BeamNetwork:
    params = cell if cell is not None else config.cell
    nx, ny, nz = config.tiling
    if nx == ny == nz == 1:
        return build_unit_cell(params)
    return tile(params, nx, ny, nz)


def build_model(config: WorkbenchConfig,
                network: BeamNetwork | None = None) -> StructuralModel:
    """Structural model with the config's supports and a ``"default"`` load
    case; raises :class:`ConfigError` when a verb-critical block is absent or
    a selector resolves to nothing."""
    if network is None:
        network = build_network(config)
    if not config.constraints:
        raise ConfigError("constraints: at least one support is required to solve")
    if not config.loads:
        raise ConfigError("loads: at least one load is required to solve")
    constraint_map = {}
    for spec in config.constraints:
        for node_id in spec.nodes.resolve(network):
            constraint_map[node_id] = spec.fix
    case: dict[int, np.ndarray] = {}
    for spec in config.loads:
        for node_id in spec.nodes.resolve(network):
            case[node_id] = case.get(node_id, np.zeros(6)) + spec.vector
    return StructuralModel.build(network, config.material,
                                 constraints=constraint_map,
                                 load_cases={"default": case})


def build_sizing_spec(config: WorkbenchConfig) -> SizingSpec:
    if config.sizing is None:
        raise ConfigError("sizing: block is required for the size command")

    def factory(thickness: float) -> StructuralModel:
        params = replace(config.cell, thickness=thickness)
        return build_model(config, build_network(config, params))

    return SizingSpec(build_model=factory, load_case="default",
                      max_displacement=config.sizing.max_displacement,
                      thickness_bounds=config.sizing.bounds,
                      tolerance=config.sizing.tolerance)


_AXES = {"X": 0, "Y": 1, "Z": 2}


def _face_nodes(network: BeamNetwork, axis: int, which: str) -> list[int]:
    positions = network.positions()
    column = positions[:, axis]
    value = column.min() if which == "min" else column.max()
    return [network.nodes[i].id
            for i in np.flatnonzero(np.abs(column - value) <= MERGE_TOL)]


def comparison_fixed_nodes(network: BeamNetwork, direction: str) -> list[int]:
    """Default comparison supports: fully fix the face at the low end of the
    load axis."""
    return _face_nodes(network, _AXES[direction], "min")


def comparison_loads(network: BeamNetwork, direction: str,
                     total_force: float) -> dict[int, np.ndarray]:
    """Default comparison loading: share the total force among the nodes of
    the face at the high end of the axis, pushing along the negative axis."""
    axis = _AXES[direction]
    nodes = _face_nodes(network, axis, "max")
    vec = np.zeros(6)
    vec[axis] = -total_force / len(nodes)
    return {node_id: vec.copy() for node_id in nodes}


def build_comparison_patterns(config: WorkbenchConfig) -> list[tuple[str, BeamNetwork]]:
    """Generate the networks for the compare verb's pattern list.

    The lattice pattern fills the region with as many whole cells as fit (at
    least one per axis); the fill-region footprint is a proxy for the target
    volume, not a trimmed conformal lattice.
    """
    if config.compare is None:
        raise ConfigError("compare: block is required for the compare command")
    block = config.compare
    out = []
    for spec in block.patterns:
        if spec.kind == "lattice":
            params = config.cell
            nx = max(1, int(block.region.width // params.cell_width))
            ny = max(1, int(block.region.depth // params.cell_depth))
            nz = max(1, int(block.height // params.cell_height))
            network = tile(params, nx, ny, nz) if nx * ny * nz > 1 \
                else build_unit_cell(params)
        elif spec.kind == "cross":
            network = generate_cross_pattern(block.region, spec.options["pitch"],
                                             spec.options["wall"], block.height)
        else:
            network = generate_hexagonal_pattern(block.region,
                                                 spec.options["cell_size"],
                                                 spec.options["wall"], block.height)
        out.append((spec.name, network))
    return out


def demo_config_text() -> str:
    """Canonical demo scenario: 100 mm cubic cell, 4 mm struts, PETG, top ring
    fully fixed, 100 N pressing down on the apex."""
    return json.dumps({
        "cell": {"height": 100.0, "width": 100.0, "depth": 100.0, "thickness": 4.0},
        "material": {"elastic_modulus": 2800.0, "poisson_ratio": 0.33,
                     "density": 1.27e-6},
        "constraints": [{"nodes": {"ids": [1, 2, 3, 4, 5, 6, 7, 8]}, "fix": "all"}],
        "loads": [{"nodes": {"ids": [13]}, "force": [0.0, 0.0, -100.0]}],
    }, indent=2)
