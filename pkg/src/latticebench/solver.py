"""Direct stiffness solver for 3D Euler-Bernoulli space frames.

Each node carries six degrees of freedom (three translations, three
rotations). Element stiffness is the canonical space-frame matrix (axial
``EA/L``, bending ``12EI/L^3 / 6EI/L^2 / 4EI/L / 2EI/L`` in both planes,
torsion ``GJ/L``); element matrices are rotated into the global frame with a
block-diagonal transformation and scatter-added into the global operator,
which is then reduced by the supported degrees of freedom and factorized.

Local axes convention (element-local force signs depend on it):

* local x runs from the first node to the second;
* the reference vector is global z unless the element is within ~2.5 degrees
  of vertical (``|x . z| > 0.999``), in which case global y is used;
* the reference vector is projected perpendicular to local x and becomes the
  matching local axis (z for the global-z reference, y for the global-y
  fallback); the remaining axis completes the right-handed triad.

Shear deformation is neglected (slender struts); a warning is emitted when a
strut has length/side below 5. For nodal loads the element is exact, so
subdividing struts does not change nodal results.

Units: mm, N, MPa, N*mm, kg.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import (
    DisconnectedNetworkError,
    GeometryError,
    MechanismError,
    ParameterError,
)
from .geometry import BeamNetwork

DOF_NAMES = ("ux", "uy", "uz", "rx", "ry", "rz")
DOFS_PER_NODE = 6

DENSE_DOF_LIMIT = 600      # direct dense Cholesky below, sparse LU above
VERTICAL_DOT_LIMIT = 0.999
RIGID_MODE_RTOL = 1e-10    # eigenvalue cutoff relative to the max diagonal
RESIDUAL_RTOL = 1e-9

SQUARE_TORSION_COEFF = 0.1406
"""Saint-Venant torsion constant coefficient for a square section,
J = 0.1406 * side^4 (the polar moment would overestimate the torsional
stiffness of a square roughly twofold)."""

SLENDERNESS_WARN_RATIO = 5.0


class SlendernessWarning(UserWarning):
    """A strut is too stubby for the no-shear-deformation assumption."""


@dataclass(frozen=True)
class Material:
    """Linear elastic material; shear modulus follows from E and nu."""

    elastic_modulus: float        # E [MPa]
    poisson_ratio: float          # nu [-]
    density: float = 1.27e-6      # [kg/mm^3]

    def __post_init__(self):
        if self.elastic_modulus <= 0:
            raise ParameterError(
                f"elastic modulus must be > 0, got {self.elastic_modulus!r}")
        if not -1.0 < self.poisson_ratio < 0.5:
            raise ParameterError(
                f"poisson ratio must lie in (-1, 0.5), got {self.poisson_ratio!r}")
        if self.density <= 0:
            raise ParameterError(f"density must be > 0, got {self.density!r}")

    @property
    def shear_modulus(self) -> float:
        return self.elastic_modulus / (2.0 * (1.0 + self.poisson_ratio))


PETG = Material(elastic_modulus=2800.0, poisson_ratio=0.33, density=1.27e-6)


@dataclass(frozen=True)
class SectionProperties:
    area: float            # [mm^2]
    inertia_y: float       # [mm^4]
    inertia_z: float       # [mm^4]
    torsion_constant: float  # [mm^4]
    extreme_fiber: float   # [mm]

    def __post_init__(self):
        for name in ("area", "inertia_y", "inertia_z", "torsion_constant",
                     "extreme_fiber"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"section {name} must be > 0")

    @classmethod
    def square(cls, side: float) -> "SectionProperties":
        if side <= 0:
            raise ParameterError(f"section side must be > 0, got {side!r}")
        inertia = side ** 4 / 12.0
        return cls(area=side * side, inertia_y=inertia, inertia_z=inertia,
                   torsion_constant=SQUARE_TORSION_COEFF * side ** 4,
                   extreme_fiber=side / 2.0)


def element_rotation(pos_a, pos_b) -> np.ndarray:
    """3x3 direction-cosine matrix; rows are the local x, y, z axes in the
    global frame (see the module docstring for the axis convention)."""
    pos_a = np.asarray(pos_a, dtype=float).reshape(3)
    pos_b = np.asarray(pos_b, dtype=float).reshape(3)
    axis = pos_b - pos_a
    length = np.linalg.norm(axis)
    if not (np.isfinite(length) and length > 0):
        raise GeometryError("element endpoints coincide")
    x = axis / length
    if abs(x[2]) <= VERTICAL_DOT_LIMIT:
        ref = np.array([0.0, 0.0, 1.0])
        z = ref - (ref @ x) * x
        z /= np.linalg.norm(z)
        y = np.cross(z, x)
    else:
        ref = np.array([0.0, 1.0, 0.0])
        y = ref - (ref @ x) * x
        y /= np.linalg.norm(y)
        z = np.cross(x, y)
    return np.vstack([x, y, z])


def transformation_matrix(rotation: np.ndarray) -> np.ndarray:
    """12x12 block-diagonal transformation: four copies of the 3x3 rotation,
    mapping global nodal displacements/rotations to the element frame."""
    return np.kron(np.eye(4), rotation)


def local_stiffness(section: SectionProperties, material: Material,
                    length: float) -> np.ndarray:
    """12x12 element stiffness in local coordinates (exactly symmetric)."""
    if length <= 0:
        raise ParameterError(f"element length must be > 0, got {length!r}")
    E = material.elastic_modulus
    G = material.shear_modulus
    L = length
    k = np.zeros((12, 12))

    ax = E * section.area / L
    k[0, 0] = k[6, 6] = ax
    k[0, 6] = k[6, 0] = -ax

    tor = G * section.torsion_constant / L
    k[3, 3] = k[9, 9] = tor
    k[3, 9] = k[9, 3] = -tor

    # Bending about local z: translations along y, rotations about z.
    a = 12.0 * E * section.inertia_z / L ** 3
    b = 6.0 * E * section.inertia_z / L ** 2
    c = 4.0 * E * section.inertia_z / L
    d = 2.0 * E * section.inertia_z / L
    k[1, 1] = k[7, 7] = a
    k[1, 7] = k[7, 1] = -a
    k[1, 5] = k[5, 1] = k[1, 11] = k[11, 1] = b
    k[5, 7] = k[7, 5] = k[7, 11] = k[11, 7] = -b
    k[5, 5] = k[11, 11] = c
    k[5, 11] = k[11, 5] = d

    # Bending about local y: translations along z, rotations about y.
    a = 12.0 * E * section.inertia_y / L ** 3
    b = 6.0 * E * section.inertia_y / L ** 2
    c = 4.0 * E * section.inertia_y / L
    d = 2.0 * E * section.inertia_y / L
    k[2, 2] = k[8, 8] = a
    k[2, 8] = k[8, 2] = -a
    k[2, 4] = k[4, 2] = k[2, 10] = k[10, 2] = -b
    k[4, 8] = k[8, 4] = k[8, 10] = k[10, 8] = b
    k[4, 4] = k[10, 10] = c
    k[4, 10] = k[10, 4] = d

    return k


FULL_FIX = (True,) * DOFS_PER_NODE


def _as_mask(fix) -> tuple[bool, ...]:
    if fix == "all" or fix is True:
        return FULL_FIX
    if isinstance(fix, (tuple, list)) and len(fix) == DOFS_PER_NODE and all(
            isinstance(v, (bool, np.bool_)) for v in fix):
        return tuple(bool(v) for v in fix)
    # iterable of dof names
    mask = [False] * DOFS_PER_NODE
    for name in fix:
        if name not in DOF_NAMES:
            raise ParameterError(
                f"unknown dof name {name!r}; expected one of {DOF_NAMES}")
        mask[DOF_NAMES.index(name)] = True
    return tuple(mask)


@dataclass
class StructuralModel:
    """A beam network with material, sections, supports and load cases.

    ``sections`` parallels ``network.struts``; ``constraints`` maps node id to
    a 6-tuple of booleans (True = fixed) in ``DOF_NAMES`` order; load cases
    map node id to 6-vectors ``(fx, fy, fz, mx, my, mz)`` in N and N*mm.
    """

    network: BeamNetwork
    material: Material
    sections: list[SectionProperties]
    constraints: dict[int, tuple[bool, ...]]
    load_cases: dict[str, dict[int, np.ndarray]] = field(default_factory=dict)

    @classmethod
    def build(cls, network: BeamNetwork, material: Material,
              fixed_nodes: Iterable[int] = (),
              constraints: Mapping[int, object] | None = None,
              sections: list[SectionProperties] | None = None,
              load_cases: Mapping[str, Mapping[int, object]] | None = None,
              warn_slenderness: bool = True) -> "StructuralModel":
        """Assemble a model, deriving square sections from each strut's side.

        ``fixed_nodes`` fully fixes all six DOFs; ``constraints`` allows
        per-node masks ("all", a 6-tuple of bools, or dof-name lists).
        """
        if sections is None:
            sections = [SectionProperties.square(s.side) for s in network.struts]
        elif len(sections) != len(network.struts):
            raise ParameterError("one section per strut is required")
        index = network.node_index()
        masks: dict[int, tuple[bool, ...]] = {}
        for node_id in fixed_nodes:
            if node_id not in index:
                raise ParameterError(f"constraint references unknown node {node_id}")
            masks[node_id] = FULL_FIX
        if constraints:
            for node_id, fix in constraints.items():
                if node_id not in index:
                    raise ParameterError(f"constraint references unknown node {node_id}")
                masks[node_id] = _as_mask(fix)
        cases: dict[int, dict] = {}
        if load_cases:
            for name, case in load_cases.items():
                cases[name] = _as_load_case(network, case)
        if warn_slenderness and network.struts:
            ratio = min(network.strut_length(s) / s.side for s in network.struts)
            if ratio < SLENDERNESS_WARN_RATIO:
                warnings.warn(
                    f"shortest strut has length/side = {ratio:.2f} < "
                    f"{SLENDERNESS_WARN_RATIO:g}; shear deformation is neglected "
                    "and results will be too stiff", SlendernessWarning,
                    stacklevel=2)
        return cls(network, material, list(sections), masks, cases)


def _as_load_case(network: BeamNetwork, case: Mapping[int, object]) -> dict[int, np.ndarray]:
    index = network.node_index()
    out = {}
    for node_id, vec in case.items():
        if node_id not in index:
            raise ParameterError(f"load references unknown node {node_id}")
        arr = np.asarray(vec, dtype=float).reshape(DOFS_PER_NODE)
        out[int(node_id)] = arr
    return out


@dataclass(eq=False)
class SolveResult:
    """Static solution: kinematics, reactions and element force recovery."""

    node_ids: tuple[int, ...]
    displacements: np.ndarray              # (N, 6): mm and rad
    reactions: dict[int, np.ndarray]       # constrained node -> (6,): N, N*mm
    element_forces: np.ndarray             # (M, 12) local end forces
    element_stresses: np.ndarray           # (M,) extreme-fiber estimates [MPa]
    max_displacement: float                # translational magnitude [mm]
    max_displacement_node: int
    strain_energy: float                   # [N*mm]
    residual: float                        # ||K d - f|| / ||f||
    model: StructuralModel = field(repr=False, default=None)

    def displacement(self, node_id: int) -> np.ndarray:
        return self.displacements[self.node_ids.index(node_id)]

    def translation(self, node_id: int) -> np.ndarray:
        return self.displacement(node_id)[:3]


def _element_data(model: StructuralModel):
    network = model.network
    index = network.node_index()
    positions = network.positions()
    for strut, section in zip(network.struts, model.sections):
        ia, ib = index[strut.node_a], index[strut.node_b]
        pa, pb = positions[ia], positions[ib]
        length = float(np.linalg.norm(pb - pa))
        rotation = element_rotation(pa, pb)
        t = transformation_matrix(rotation)
        k_local = local_stiffness(section, model.material, length)
        yield ia, ib, t, k_local, section


def assemble(model: StructuralModel, *, require_connected: bool = True):
    """Global stiffness operator (6N x 6N, CSR, exactly symmetric)."""
    network = model.network
    if require_connected and not network.is_connected():
        raise DisconnectedNetworkError(
            "network is disconnected; the stiffness operator would be singular "
            "block-wise")
    ndof = DOFS_PER_NODE * len(network.nodes)
    rows, cols, data = [], [], []
    for ia, ib, t, k_local, _ in _element_data(model):
        k_global = t.T @ k_local @ t
        k_global = 0.5 * (k_global + k_global.T)  # scrub rounding asymmetry
        dofs = np.concatenate([np.arange(6) + 6 * ia, np.arange(6) + 6 * ib])
        rows.append(np.repeat(dofs, 12))
        cols.append(np.tile(dofs, 12))
        data.append(k_global.ravel())
    if not data:
        return scipy.sparse.csr_matrix((ndof, ndof))
    matrix = scipy.sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(ndof, ndof))
    return matrix.tocsr()


def _fixed_mask(model: StructuralModel) -> np.ndarray:
    index = model.network.node_index()
    mask = np.zeros(DOFS_PER_NODE * len(model.network.nodes), dtype=bool)
    for node_id, fix in model.constraints.items():
        i = index[node_id]
        mask[6 * i:6 * i + 6] = fix
    return mask


def _dof_label(model: StructuralModel, dof: int) -> str:
    node = model.network.nodes[dof // DOFS_PER_NODE].id
    return f"node {node} {DOF_NAMES[dof % DOFS_PER_NODE]}"


def _raise_mechanism(model: StructuralModel, k_free, free_dofs: np.ndarray,
                     reason: str) -> None:
    dense = k_free.toarray() if scipy.sparse.issparse(k_free) else np.asarray(k_free)
    eigvals, eigvecs = scipy.linalg.eigh(dense)
    cutoff = RIGID_MODE_RTOL * max(dense.diagonal().max(), 1.0)
    modes = []
    for i, value in enumerate(eigvals):
        if value < cutoff:
            vec = eigvecs[:, i]
            top = np.argsort(-np.abs(vec))[:3]
            modes.append(", ".join(_dof_label(model, int(free_dofs[j])) for j in top))
    if modes:
        detail = "; ".join(f"mode {i}: {m}" for i, m in enumerate(modes))
        raise MechanismError(
            f"constraints leave {len(modes)} rigid-body/mechanism mode(s): {detail}",
            modes=modes)
    raise MechanismError(f"stiffness system is singular or ill-conditioned ({reason})")


def solve_static(model: StructuralModel, load_case) -> SolveResult:
    """Solve ``K d = f`` for one load case and recover reactions, element end
    forces and stress estimates.

    ``load_case`` is either the name of a case stored on the model or a
    mapping from node id to a 6-vector of forces and moments.
    """
    if isinstance(load_case, str):
        if load_case not in model.load_cases:
            raise ParameterError(f"model has no load case named {load_case!r}")
        case = model.load_cases[load_case]
    else:
        case = _as_load_case(model.network, load_case)

    network = model.network
    n_nodes = len(network.nodes)
    ndof = DOFS_PER_NODE * n_nodes
    index = network.node_index()

    f = np.zeros(ndof)
    for node_id, vec in case.items():
        f[6 * index[node_id]:6 * index[node_id] + 6] += vec

    stiffness = assemble(model)
    fixed = _fixed_mask(model)
    if not fixed.any():
        raise MechanismError("no constrained degrees of freedom; the model floats")
    free = np.flatnonzero(~fixed)
    f_norm = np.linalg.norm(f)

    d = np.zeros(ndof)
    if free.size and f_norm > 0:
        k_free = stiffness[free][:, free]
        try:
            if free.size < DENSE_DOF_LIMIT:
                factor = scipy.linalg.cho_factor(k_free.toarray())
                solve = lambda rhs: scipy.linalg.cho_solve(factor, rhs)
            else:
                lu = scipy.sparse.linalg.splu(k_free.tocsc())
                solve = lu.solve
            d_free = solve(f[free])
            if not np.all(np.isfinite(d_free)):
                _raise_mechanism(model, k_free, free, "non-finite solution")
            # One step of iterative refinement keeps the residual contract.
            resid = f[free] - k_free @ d_free
            if np.linalg.norm(resid) > 1e-12 * f_norm:
                d_free = d_free + solve(resid)
        except (scipy.linalg.LinAlgError, RuntimeError) as exc:
            _raise_mechanism(model, k_free, free, str(exc))
        residual = np.linalg.norm(k_free @ d_free - f[free]) / f_norm
        if residual > RESIDUAL_RTOL:
            _raise_mechanism(model, k_free, free, f"residual {residual:.3e}")
        d[free] = d_free
    else:
        residual = 0.0

    k_d = stiffness @ d
    reaction_full = k_d - f
    reactions = {}
    for node_id, mask in model.constraints.items():
        i = index[node_id]
        vec = reaction_full[6 * i:6 * i + 6] * np.asarray(mask, dtype=float)
        reactions[node_id] = vec

    displacements = d.reshape(n_nodes, DOFS_PER_NODE)
    translation_norms = np.linalg.norm(displacements[:, :3], axis=1)
    worst = int(np.argmax(translation_norms))

    result = SolveResult(
        node_ids=tuple(node.id for node in network.nodes),
        displacements=displacements,
        reactions=reactions,
        element_forces=np.zeros((len(network.struts), 12)),
        element_stresses=np.zeros(len(network.struts)),
        max_displacement=float(translation_norms[worst]),
        max_displacement_node=network.nodes[worst].id,
        strain_energy=float(0.5 * d @ k_d),
        residual=float(residual),
        model=model,
    )
    forces, stresses = recover_element_forces(model, result)
    result.element_forces = forces
    result.element_stresses = stresses
    return result


def recover_element_forces(model: StructuralModel, result: SolveResult):
    """Local end-force 12-vectors ``K_local (T d)`` per element plus an
    extreme-fiber von-Mises-style stress estimate.

    The stress estimate combines axial plus worst bending normal stress with
    torsional shear; it is a beam estimate, not a solid-continuum stress
    field.
    """
    if result.model is not model:
        raise ParameterError("result was produced from a different model")
    d = result.displacements.ravel()
    forces = np.zeros((len(model.network.struts), 12))
    stresses = np.zeros(len(model.network.struts))
    for e, (ia, ib, t, k_local, section) in enumerate(_element_data(model)):
        d_elem = np.concatenate([d[6 * ia:6 * ia + 6], d[6 * ib:6 * ib + 6]])
        f_local = k_local @ (t @ d_elem)
        forces[e] = f_local
        axial = abs(f_local[6])
        torsion = max(abs(f_local[3]), abs(f_local[9]))
        bend_y = max(abs(f_local[4]), abs(f_local[10]))
        bend_z = max(abs(f_local[5]), abs(f_local[11]))
        normal = (axial / section.area
                  + max(bend_y * section.extreme_fiber / section.inertia_y,
                        bend_z * section.extreme_fiber / section.inertia_z))
        shear = torsion * section.extreme_fiber / section.torsion_constant
        stresses[e] = np.sqrt(normal ** 2 + 3.0 * shear ** 2)
    return forces, stresses


def rigid_body_mode_count(model: StructuralModel) -> int:
    """Number of near-zero stiffness eigenvalues with constraints ignored.

    A single free-floating connected body reports 6; every additional
    disconnected component adds another 6. Used as a solver self-check.
    """
    stiffness = assemble(model, require_connected=False).toarray()
    if stiffness.size == 0:
        return 0
    eigvals = scipy.linalg.eigvalsh(stiffness)
    cutoff = RIGID_MODE_RTOL * max(stiffness.diagonal().max(), 1.0)
    return int(np.count_nonzero(eigvals < cutoff))
