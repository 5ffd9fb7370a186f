"""Displacement-constrained thickness sizing and pattern comparison metrics.

Structural efficiency is the ratio of maximum displacement to mass (mm/kg);
improvement is the relative difference of efficiencies against a reference
pattern in percent. Thickness sizing bisects on the strut side until the
maximum displacement stays within the requested limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .errors import ParameterError, SizingInfeasibleError
from .geometry import BeamNetwork, network_mass
from .solver import Material, StructuralModel, solve_static


def structural_efficiency(max_displacement: float, mass: float) -> float:
    """Maximum displacement divided by mass [mm/kg]."""
    if mass <= 0:
        raise ParameterError(f"mass must be > 0, got {mass!r}")
    return max_displacement / mass


def improvement(reference_efficiency: float, other_efficiency: float) -> float:
    """Relative efficiency difference versus the reference, in percent."""
    if reference_efficiency <= 0:
        raise ParameterError(
            f"reference efficiency must be > 0, got {reference_efficiency!r}")
    return (reference_efficiency - other_efficiency) / reference_efficiency * 100.0


def efficiency_consistent(max_displacement: float, mass: float,
                          printed_efficiency: float, rel_tol: float = 1e-3) -> bool:
    """Whether a reported efficiency actually equals displacement/mass.

    Used to flag inconsistent rows in third-party result tables before
    trusting their numbers.
    """
    recomputed = structural_efficiency(max_displacement, mass)
    return abs(recomputed - printed_efficiency) <= rel_tol * abs(printed_efficiency)


# ---------------------------------------------------------------------------
# Thickness sizing
# ---------------------------------------------------------------------------

@dataclass
class SizingSpec:
    """Inputs for displacement-constrained thickness sizing.

    ``build_model`` produces the structural model for a candidate thickness;
    geometry, supports and stored load cases are up to the caller (the
    workbench config layer builds one from cell/tiling parameters).
    """

    build_model: Callable[[float], StructuralModel]
    load_case: object                    # name or node->6-vector mapping
    max_displacement: float              # [mm]
    thickness_bounds: tuple[float, float]  # [mm]
    tolerance: float = 1e-3              # bracket width at convergence [mm]

    def __post_init__(self):
        lo, hi = self.thickness_bounds
        if not 0 < lo < hi:
            raise ParameterError(
                f"thickness bounds must satisfy 0 < lo < hi, got {self.thickness_bounds!r}")
        if self.max_displacement <= 0:
            raise ParameterError(
                f"max_displacement must be > 0, got {self.max_displacement!r}")
        if self.tolerance <= 0:
            raise ParameterError(f"tolerance must be > 0, got {self.tolerance!r}")


@dataclass(frozen=True)
class SizingResult:
    thickness: float
    trace: tuple[tuple[float, float], ...]  # every (thickness, displacement) tried
    already_feasible: bool
    iterations: int                         # bisection midpoint evaluations


def size_thickness(spec: SizingSpec) -> SizingResult:
    """Smallest thickness within the bounds whose max displacement stays
    within the limit, found by bisection (max displacement decreases
    monotonically with thickness at fixed geometry and loads).

    Raises :class:`SizingInfeasibleError` when even the upper bound deflects
    too much; returns the lower bound flagged ``already_feasible`` when it is
    already stiff enough.
    """
    lo, hi = spec.thickness_bounds
    trace: list[tuple[float, float]] = []

    def displacement(thickness: float) -> float:
        model = spec.build_model(thickness)
        value = solve_static(model, spec.load_case).max_displacement
        trace.append((thickness, value))
        return value

    if displacement(lo) <= spec.max_displacement:
        return SizingResult(lo, tuple(trace), already_feasible=True, iterations=0)
    if displacement(hi) > spec.max_displacement:
        raise SizingInfeasibleError(
            f"even the thickest section ({hi:g} mm) deflects "
            f"{trace[-1][1]:.6g} mm > limit {spec.max_displacement:g} mm")

    iterations = 0
    while hi - lo > spec.tolerance:
        mid = 0.5 * (lo + hi)
        iterations += 1
        if displacement(mid) <= spec.max_displacement:
            hi = mid
        else:
            lo = mid
    return SizingResult(hi, tuple(trace), already_feasible=False,
                        iterations=iterations)


# ---------------------------------------------------------------------------
# Pattern comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EfficiencyRecord:
    pattern: str
    max_displacement: float      # [mm]
    max_stress: float            # [MPa], beam extreme-fiber estimate
    mass: float                  # [kg]
    efficiency: float            # [mm/kg]
    improvement: float | None    # [%] vs reference; None for the reference


@dataclass(frozen=True)
class ComparisonReport:
    direction: str                       # load direction label: X, Y or Z
    records: tuple[EfficiencyRecord, ...]
    reference: str                       # pattern name of the reference record
    error: str | None = None


def build_report(direction: str,
                 entries: Sequence[tuple[str, float, float, float]]) -> ComparisonReport:
    """Pure metric arithmetic: entries are (name, max displacement, max
    stress, mass); the first entry is the reference."""
    if not entries:
        raise ParameterError("at least one pattern entry is required")
    records = []
    reference_eff = None
    for name, disp, stress, mass in entries:
        eff = structural_efficiency(disp, mass)
        if reference_eff is None:
            reference_eff = eff
            rel = None
        else:
            rel = improvement(reference_eff, eff)
        records.append(EfficiencyRecord(name, disp, stress, mass, eff, rel))
    return ComparisonReport(direction, tuple(records), entries[0][0])


def compare_patterns(patterns: Sequence[tuple[str, BeamNetwork]],
                     material: Material,
                     fixed_nodes: Callable[[BeamNetwork, str], Sequence[int]],
                     build_loads: Callable[[BeamNetwork, str], Mapping[int, object]],
                     directions: Sequence[str] = ("X", "Y", "Z")) -> list[ComparisonReport]:
    """Solve every pattern under every load direction and rank by structural
    efficiency. The first pattern is the reference. A failing solve aborts
    that direction's report and records the cause; other directions proceed.
    """
    if not patterns:
        raise ParameterError("at least one pattern is required")
    reports = []
    for direction in directions:
        entries = []
        error = None
        for name, network in patterns:
            try:
                model = StructuralModel.build(
                    network, material,
                    fixed_nodes=fixed_nodes(network, direction))
                result = solve_static(model, build_loads(network, direction))
                mass = network_mass(network, material.density)
                stress = float(result.element_stresses.max()) if len(
                    result.element_stresses) else 0.0
                entries.append((name, result.max_displacement, stress, mass))
            except Exception as exc:
                error = f"pattern {name!r}: {exc}"
                break
        if error is not None:
            reports.append(ComparisonReport(direction, (), patterns[0][0], error))
        else:
            reports.append(build_report(direction, entries))
    return reports
