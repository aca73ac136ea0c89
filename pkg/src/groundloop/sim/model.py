"""Discrete reservoir model: grid geometry, petrophysics, fluids, and the
precomputed two-point transmissibilities the flux assembly uses.

Half-transmissibility of a cell behind a face: T_half = A * K * (n.d) / |d|^2
with d the vector from cell centroid to face centroid and n the outward
unit normal; the face value is the harmonic combination of its two halves.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import DegenerateGeometryError, NonphysicalStateError
from ..fields import PropertyField
from ..fluids import FluidSystem
from ..meshing import GeometrySummary, Mesh
from ..units import GRAVITY


@dataclass(frozen=True)
class SolverControls:
    """Newton and timestep-control settings.

    Scaled residual checks: per-cell |R| * dt / (phi * V * rho_ref) against
    ``cnv_tolerance`` and the global sum against ``mb_tolerance``, per
    phase. Well control equations converge to ``ctrl_tolerance`` relative
    to their target so rate targets hold to near round-off.
    """

    newton_max_iters: int = 15
    cnv_tolerance: float = 1.0e-6
    mb_tolerance: float = 1.0e-7
    initial_dt: float = 86_400.0
    min_dt: float = 1.0
    max_dt: float = 8.64e6
    cut_factor: float = 0.5
    growth_factor: float = 1.5
    max_cuts_per_step: int = 10
    ctrl_tolerance: float = 1.0e-11
    ds_max: float = 0.2

    def __post_init__(self):
        if self.cnv_tolerance <= 0 or self.mb_tolerance <= 0 or self.ctrl_tolerance <= 0:
            raise NonphysicalStateError("tolerances must be > 0")
        if not (0 < self.cut_factor < 1 < self.growth_factor):
            raise NonphysicalStateError("need 0 < cut_factor < 1 < growth_factor")
        if not (0 < self.min_dt <= self.initial_dt <= self.max_dt):
            raise NonphysicalStateError("need 0 < min_dt <= initial_dt <= max_dt")
        if self.newton_max_iters < 1 or self.max_cuts_per_step < 0:
            raise NonphysicalStateError("iteration and cut budgets must be non-negative")


@dataclass
class SimState:
    """Primary unknowns: cell pressure (Pa), water saturation, and one
    bottom-hole pressure per well."""

    pressure: np.ndarray
    saturation: np.ndarray
    bhp: np.ndarray

    def __post_init__(self):
        self.pressure = np.asarray(self.pressure, dtype=np.float64)
        self.saturation = np.asarray(self.saturation, dtype=np.float64)
        self.bhp = np.asarray(self.bhp, dtype=np.float64)

    def copy(self) -> "SimState":
        return SimState(self.pressure.copy(), self.saturation.copy(), self.bhp.copy())

    @classmethod
    def uniform(cls, n_cells: int, pressure: float, s_w: float, n_wells: int = 0) -> "SimState":
        return cls(np.full(n_cells, pressure), np.full(n_cells, s_w), np.zeros(n_wells))


@dataclass(frozen=True)
class ReservoirModel:
    mesh: Mesh
    geometry: GeometrySummary
    permeability: PropertyField
    porosity: PropertyField
    fluids: FluidSystem
    gravity: float = GRAVITY
    # interior-face arrays, precomputed by build_reservoir_model
    face_cells: np.ndarray = field(default=None)   # (nf_int, 2) owner, neighbor
    face_trans: np.ndarray = field(default=None)   # (nf_int,) m^3
    face_ddepth: np.ndarray = field(default=None)  # (nf_int,) depth_owner - depth_neighbor

    @property
    def n_cells(self) -> int:
        return self.mesh.dims.n_cells

    @property
    def pore_volumes(self) -> np.ndarray:
        return self.porosity.values * self.geometry.cell_volumes


def _half_transmissibility(geom: GeometrySummary, perm: np.ndarray,
                           cells: np.ndarray, sign: float, mask: np.ndarray) -> np.ndarray:
    d = geom.face_centroid[mask] - geom.cell_centroids[cells]
    dist2 = np.einsum("ij,ij->i", d, d)
    n_dot_d = sign * np.einsum("ij,ij->i", geom.face_normal[mask], d)
    if np.any(n_dot_d <= 0):
        raise DegenerateGeometryError("face orientation degenerate: centroid vector opposes normal")
    return geom.face_area[mask] * perm[cells] * n_dot_d / dist2


def build_reservoir_model(
    mesh: Mesh,
    geometry: GeometrySummary,
    permeability: PropertyField,
    porosity: PropertyField,
    fluids: FluidSystem,
    gravity: float = GRAVITY,
) -> ReservoirModel:
    """Precompute interior-face transmissibilities and depth differences."""
    nc = mesh.dims.n_cells
    if len(permeability.values) != nc or len(porosity.values) != nc:
        raise NonphysicalStateError("field lengths must match the cell count")
    if np.any(permeability.values <= 0):
        raise NonphysicalStateError("permeability must be strictly positive")
    if np.any((porosity.values <= 0) | (porosity.values >= 1)):
        raise NonphysicalStateError("porosity must lie in (0, 1)")

    interior = geometry.interior
    owner = geometry.face_owner[interior]
    neighbor = geometry.face_neighbor[interior]
    t_own = _half_transmissibility(geometry, permeability.values, owner, +1.0, interior)
    t_nbr = _half_transmissibility(geometry, permeability.values, neighbor, -1.0, interior)
    trans = 1.0 / (1.0 / t_own + 1.0 / t_nbr)
    ddepth = geometry.cell_centroids[owner, 2] - geometry.cell_centroids[neighbor, 2]

    return ReservoirModel(
        mesh=mesh, geometry=geometry, permeability=permeability, porosity=porosity,
        fluids=fluids, gravity=gravity,
        face_cells=np.column_stack([owner, neighbor]).astype(np.int64),
        face_trans=trans, face_ddepth=ddepth,
    )


def with_fluids(model: ReservoirModel, fluids: FluidSystem) -> ReservoirModel:
    """Same grid and transmissibilities, different fluid closure set."""
    return replace(model, fluids=fluids)
