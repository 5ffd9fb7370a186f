import numpy as np
import pytest

from latticebench import (
    PETG,
    BeamNetwork,
    LatticeNode,
    Strut,
    StructuralModel,
    UnitCellParams,
)


@pytest.fixture
def cube_params():
    """100 mm cubic cell with 4 mm struts (the Table-2-style demo setup)."""
    return UnitCellParams(height=100.0, width=100.0, depth=100.0, thickness=4.0)


def make_cantilever(thickness=4.0, length=100.0, material=PETG, n_segments=1):
    """Single horizontal beam along +x, fully fixed at node 1.

    With ``n_segments`` > 1 the beam is split into collinear segments with
    shared interior nodes; the tip node id is always the last one.
    """
    xs = np.linspace(0.0, length, n_segments + 1)
    nodes = [LatticeNode(i + 1, [x, 0.0, 0.0]) for i, x in enumerate(xs)]
    struts = [Strut(i + 1, i + 2, thickness) for i in range(n_segments)]
    network = BeamNetwork(nodes, struts)
    return StructuralModel.build(network, material, fixed_nodes=[1],
                                 warn_slenderness=False)


@pytest.fixture
def cantilever():
    return make_cantilever()


def demo_model(params=None, material=PETG):
    """Unit cell with the top ring fully fixed (nodes 1..8)."""
    from latticebench import build_unit_cell

    if params is None:
        params = UnitCellParams(height=100.0, width=100.0, depth=100.0,
                                thickness=4.0)
    network = build_unit_cell(params)
    return StructuralModel.build(network, material, fixed_nodes=range(1, 9),
                                 warn_slenderness=False)


APEX_LOAD = {13: (0.0, 0.0, -100.0, 0.0, 0.0, 0.0)}
