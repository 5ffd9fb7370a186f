"""latticebench: parametric lattice workbench.

Generates pyramidal unit cells and infill-style reference patterns as beam
networks, solves their statics with a 3D Euler-Bernoulli direct-stiffness
solver, sizes strut thickness against displacement limits, compares patterns
by structural efficiency and exports meshes for additive manufacturing.
"""

from .config import (
    CompareBlock,
    ConstraintSpec,
    LoadSpec,
    NodeSelector,
    PatternSpec,
    PrintabilitySpec,
    SizingBlock,
    WorkbenchConfig,
    build_comparison_patterns,
    build_model,
    build_network,
    build_sizing_spec,
    comparison_fixed_nodes,
    comparison_loads,
    demo_config_text,
    load_config,
    load_config_file,
)
from .errors import (
    ConfigError,
    DisconnectedNetworkError,
    ExportError,
    GeometryError,
    LatticeBenchError,
    MechanismError,
    ParameterError,
    PatternRegionError,
    SizingInfeasibleError,
)
from .export import (
    export_network_json,
    export_obj_wireframe,
    export_stl_solid,
    read_network_json,
    read_obj_wireframe,
    read_stl,
    serialize_stl,
)
from .geometry import (
    APEX_ID,
    CORNER_IDS,
    INTERIOR_IDS,
    MERGE_TOL,
    MIDPOINT_IDS,
    BeamNetwork,
    LatticeNode,
    PrintabilityReport,
    Region,
    Strut,
    UnitCellParams,
    build_unit_cell,
    generate_cross_pattern,
    generate_hexagonal_pattern,
    merge_network,
    network_mass,
    printability_check,
    tile,
    unit_cell_edges,
)
from .sizing import (
    ComparisonReport,
    EfficiencyRecord,
    SizingResult,
    SizingSpec,
    build_report,
    compare_patterns,
    efficiency_consistent,
    improvement,
    size_thickness,
    structural_efficiency,
)
from .solver import (
    DOF_NAMES,
    PETG,
    SQUARE_TORSION_COEFF,
    Material,
    SectionProperties,
    SlendernessWarning,
    SolveResult,
    StructuralModel,
    assemble,
    element_rotation,
    local_stiffness,
    recover_element_forces,
    rigid_body_mode_count,
    solve_static,
    transformation_matrix,
)

__version__ = "0.1.0"
