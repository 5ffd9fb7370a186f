"""Command-line workbench: generate / solve / size / compare / check / export.

Outputs are deterministic: the same config and flags produce byte-identical
reports and meshes. Human-readable numbers use 4 significant digits; CSV and
JSON keep full precision. Each error family maps to its own exit code.
"""

from __future__ import annotations

import argparse
import csv
import sys

from .config import (
    WorkbenchConfig,
    build_comparison_patterns,
    build_model,
    build_network,
    build_sizing_spec,
    comparison_fixed_nodes,
    comparison_loads,
    load_config_file,
)
from .errors import (
    ConfigError,
    DisconnectedNetworkError,
    ExportError,
    GeometryError,
    MechanismError,
    ParameterError,
    SizingInfeasibleError,
)
from .export import export_network_json, export_obj_wireframe, export_stl_solid
from .geometry import network_mass, printability_check
from .sizing import compare_patterns, size_thickness
from .solver import solve_static

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_GEOMETRY = 3
EXIT_SOLVE = 4
EXIT_SIZING = 5
EXIT_EXPORT = 6

CSV_COLUMNS = ("direction", "geometry", "max_displacement_mm", "max_stress_MPa",
               "mass_kg", "efficiency_mm_per_kg", "improvement_pct")

REGION_PROXY_NOTE = ("note: the fill region stands in for the part's interior "
                     "volume and patterns are beam-network proxies of extruded "
                     "walls; results rank patterns, they are not shell stresses.")


def _fmt(value: float) -> str:
    return f"{value:.4g}"


def _write_exports(network, args) -> None:
    if getattr(args, "stl", None):
        size = export_stl_solid(network, args.stl)
        print(f"wrote {args.stl} ({size} bytes)")
    if getattr(args, "obj", None):
        size = export_obj_wireframe(network, args.obj)
        print(f"wrote {args.obj} ({size} bytes)")
    if getattr(args, "json", None):
        size = export_network_json(network, args.json)
        print(f"wrote {args.json} ({size} bytes)")


def _cmd_generate(config: WorkbenchConfig, args) -> int:
    network = build_network(config)
    lo, hi = network.bounding_box()
    mass = network_mass(network, config.material.density)
    print(f"{network.provenance} network: {len(network.nodes)} nodes, "
          f"{len(network.struts)} struts")
    print(f"bounding box: {_fmt(hi[0] - lo[0])} x {_fmt(hi[1] - lo[1])} x "
          f"{_fmt(hi[2] - lo[2])} mm")
    print(f"mass: {_fmt(mass)} kg")
    _write_exports(network, args)
    return EXIT_OK


def _cmd_export(config: WorkbenchConfig, args) -> int:
    if not (args.stl or args.obj or args.json):
        raise ConfigError("export: at least one of --stl/--obj/--json is required")
    network = build_network(config)
    _write_exports(network, args)
    return EXIT_OK


def _cmd_solve(config: WorkbenchConfig, args) -> int:
    model = build_model(config)
    result = solve_static(model, "default")
    print(f"max displacement: {_fmt(result.max_displacement)} mm at node "
          f"{result.max_displacement_node}")
    print(f"max stress estimate: {_fmt(float(result.element_stresses.max()))} MPa")
    print(f"strain energy: {_fmt(result.strain_energy)} N*mm")
    print("reactions (N, N*mm):")
    for node_id in sorted(result.reactions):
        fx, fy, fz, mx, my, mz = result.reactions[node_id]
        print(f"  node {node_id}: F=({_fmt(fx)}, {_fmt(fy)}, {_fmt(fz)}) "
              f"M=({_fmt(mx)}, {_fmt(my)}, {_fmt(mz)})")
    return EXIT_OK


def _cmd_size(config: WorkbenchConfig, args) -> int:
    spec = build_sizing_spec(config)
    result = size_thickness(spec)
    status = "already feasible at the lower bound" if result.already_feasible \
        else f"{result.iterations} bisection steps"
    print(f"sized thickness: {_fmt(result.thickness)} mm ({status})")
    print("evaluations (thickness mm -> max displacement mm):")
    for thickness, displacement in result.trace:
        print(f"  {_fmt(thickness)} -> {_fmt(displacement)}")
    return EXIT_OK


def _cmd_compare(config: WorkbenchConfig, args) -> int:
    if config.compare is None:
        raise ConfigError("compare: block is required for the compare command")
    patterns = build_comparison_patterns(config)
    total_force = config.compare.force

    def loads(network, direction):
        return comparison_loads(network, direction, total_force)

    reports = compare_patterns(patterns, config.material, comparison_fixed_nodes,
                               loads, directions=config.compare.directions)
    with open(args.out, "w", encoding="ascii", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for report in reports:
            for record in report.records:
                writer.writerow([
                    report.direction, record.pattern,
                    repr(record.max_displacement), repr(record.max_stress),
                    repr(record.mass), repr(record.efficiency),
                    "" if record.improvement is None else repr(record.improvement),
                ])
    failures = 0
    for report in reports:
        if report.error is not None:
            failures += 1
            print(f"direction {report.direction}: FAILED ({report.error})")
            continue
        print(f"direction {report.direction} (reference: {report.reference}):")
        for record in report.records:
            rel = "-" if record.improvement is None else _fmt(record.improvement) + " %"
            print(f"  {record.pattern}: disp {_fmt(record.max_displacement)} mm, "
                  f"mass {_fmt(record.mass)} kg, efficiency "
                  f"{_fmt(record.efficiency)} mm/kg, improvement {rel}")
    print(f"wrote {args.out}")
    print(REGION_PROXY_NOTE)
    return EXIT_SOLVE if failures else EXIT_OK


def _cmd_check(config: WorkbenchConfig, args) -> int:
    network = build_network(config)
    spec = config.printability
    report = printability_check(network, spec.build_direction,
                                spec.overhang_limit, spec.bridge_max)
    counts = report.counts()
    print(f"printability (build direction {spec.build_direction}, overhang limit "
          f"{_fmt(spec.overhang_limit)} deg, bridge max {_fmt(spec.bridge_max)} mm):")
    for label in ("self-supporting", "bridge", "unsupported"):
        print(f"  {label}: {counts[label]}")
    for k in report.unsupported:
        strut = network.struts[k]
        print(f"  unsupported strut {k}: nodes {strut.node_a}-{strut.node_b}, "
              f"angle {_fmt(report.angles_deg[k])} deg, length "
              f"{_fmt(network.strut_length(strut))} mm")
    print(f"printability: {'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_GEOMETRY


_COMMANDS = {
    "generate": _cmd_generate,
    "solve": _cmd_solve,
    "size": _cmd_size,
    "compare": _cmd_compare,
    "check": _cmd_check,
    "export": _cmd_export,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latticebench",
        description="Parametric lattice workbench: generate cells and patterns, "
                    "solve beam statics, size strut thickness, compare patterns "
                    "and export meshes.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("generate", "build the configured network and print a summary"),
            ("solve", "solve the configured load case and report displacements"),
            ("size", "find the smallest thickness meeting the displacement limit"),
            ("compare", "rank configured patterns by structural efficiency"),
            ("check", "run the support-free printability check"),
            ("export", "write mesh/network files for the configured network")):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("config", help="path to the JSON config")
        if name in ("generate", "export"):
            cmd.add_argument("--stl", help="write a binary STL solid here")
            cmd.add_argument("--obj", help="write an OBJ wireframe here")
            cmd.add_argument("--json", help="write a JSON network dump here")
        if name == "compare":
            cmd.add_argument("--out", default="comparison.csv",
                             help="CSV report path (default: comparison.csv)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config_file(args.config)
        return _COMMANDS[args.command](config, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MechanismError, DisconnectedNetworkError) as exc:
        print(f"solve error: {exc}", file=sys.stderr)
        return EXIT_SOLVE
    except SizingInfeasibleError as exc:
        print(f"sizing error: {exc}", file=sys.stderr)
        return EXIT_SIZING
    except (ParameterError, GeometryError) as exc:
        print(f"geometry error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except ExportError as exc:
        print(f"export error: {exc}", file=sys.stderr)
        return EXIT_EXPORT
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_EXPORT


if __name__ == "__main__":
    sys.exit(main())
