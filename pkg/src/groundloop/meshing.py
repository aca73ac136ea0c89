"""Structured hexahedral meshes with stratigraphic deformation.

Builds axis-aligned grids (depth positive downward), applies sinusoidal
interface undulation followed by a Gaussian anticline uplift, and computes
the volumes, centroids, and face data the finite-volume discretization
needs. Deformation order is fixed: undulation first, then dome; composing
the other way is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DeformationOrderError, DegenerateGeometryError, InvalidDimsError

_PILLAR_EPS = 1e-9  # m, minimum node spacing along a pillar


@dataclass(frozen=True)
class MeshDims:
    """Logical grid size and physical extents (m). ``origin_depth`` is the
    depth of the undeformed top surface, positive downward."""

    nx: int
    ny: int
    nz: int
    lx: float
    ly: float
    lz: float
    origin_depth: float = 0.0

    def __post_init__(self):
        if min(self.nx, self.ny, self.nz) < 1:
            raise InvalidDimsError(f"cell counts must be >= 1, got {(self.nx, self.ny, self.nz)}")
        if min(self.lx, self.ly, self.lz) <= 0:
            raise InvalidDimsError(f"extents must be > 0, got {(self.lx, self.ly, self.lz)}")

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def n_nodes(self) -> int:
        return (self.nx + 1) * (self.ny + 1) * (self.nz + 1)

    @property
    def spacing(self) -> tuple[float, float, float]:
        return (self.lx / self.nx, self.ly / self.ny, self.lz / self.nz)


@dataclass(frozen=True)
class DeformationSpec:
    """Parameters of the two geometric deformations.

    ``interface_depths`` are relative depths of stratigraphic unit
    boundaries, starting at 0 and ending at the domain thickness; internal
    entries are the interfaces the undulation displaces (alternating sign,
    first one upward-positive ``+delta``).
    """

    undulation_amplitude: float = 0.0
    undulation_wavelength: float = 500.0
    dome_amplitude: float = 0.0
    dome_radius: float = 400.0
    interface_depths: tuple[float, ...] = ()

    def __post_init__(self):
        if self.undulation_wavelength <= 0 or self.dome_radius <= 0:
            raise DegenerateGeometryError("wavelength and dome radius must be > 0")
        z = self.interface_depths
        if len(z) < 2:
            raise DegenerateGeometryError("interface_depths needs at least top and bottom")
        diffs = np.diff(z)
        if z[0] != 0 or np.any(diffs <= 0):
            raise DegenerateGeometryError("interface_depths must start at 0 and be strictly increasing")
        if self.undulation_amplitude >= float(diffs.min()) / 2.0:
            raise DegenerateGeometryError(
                "undulation amplitude must stay below half the minimum interface spacing")

    @property
    def n_units(self) -> int:
        return len(self.interface_depths) - 1


def equal_interfaces(lz: float, n_units: int) -> tuple[float, ...]:
    """Relative depths splitting [0, lz] into ``n_units`` equal bands."""
    return tuple(lz * i / n_units for i in range(n_units + 1))


@dataclass(frozen=True)
class Mesh:
    """Hexahedral grid: node coordinates (x, y, depth), 8-node cell map,
    and the stratigraphic unit of each cell (fixed at construction by
    undeformed k-index bands so deformation never reassigns cells)."""

    dims: MeshDims
    node_coords: np.ndarray          # (n_nodes, 3) float64, columns x, y, depth
    cell_nodes: np.ndarray           # (n_cells, 8) int32
    layer_of_cell: np.ndarray        # (n_cells,) int32
    interface_depths: tuple[float, ...]
    deformations: tuple[str, ...] = field(default_factory=tuple)

    @property
    def n_units(self) -> int:
        return len(self.interface_depths) - 1

    def node_index(self, i: int, j: int, k: int) -> int:
        nx, ny = self.dims.nx, self.dims.ny
        return (k * (ny + 1) + j) * (nx + 1) + i

    def cell_index(self, i: int, j: int, k: int) -> int:
        nx, ny = self.dims.nx, self.dims.ny
        return (k * ny + j) * nx + i

    def _depth_grid(self) -> np.ndarray:
        d = self.dims
        return self.node_coords[:, 2].reshape(d.nz + 1, d.ny + 1, d.nx + 1)


# Local node numbering of a cell: k-plane first (shallow), then k+1 plane,
# counterclockwise in (i, j) within each plane. Faces listed with outward
# orientation in (x, y, depth) space.
_HEX_FACES = (
    (0, 3, 2, 1),  # shallow (depth = min) side
    (4, 5, 6, 7),  # deep side
    (0, 1, 5, 4),  # y-
    (1, 2, 6, 5),  # x+
    (2, 3, 7, 6),  # y+
    (3, 0, 4, 7),  # x-
)


def build_cartesian_mesh(dims: MeshDims, interface_depths: tuple[float, ...] | None = None) -> Mesh:
    """Axis-aligned hexahedral mesh with node depths origin + k*dz.

    ``interface_depths`` fixes the stratigraphic unit bands (default: one
    unit spanning the whole thickness). Units are assigned per undeformed
    cell-center depth, i.e. by k-index bands.
    """
    if interface_depths is None:
        interface_depths = (0.0, dims.lz)
    dx, dy, dz = dims.spacing
    xs = np.arange(dims.nx + 1) * dx
    ys = np.arange(dims.ny + 1) * dy
    ds = dims.origin_depth + np.arange(dims.nz + 1) * dz

    D, Y, X = np.meshgrid(ds, ys, xs, indexing="ij")
    coords = np.column_stack([X.ravel(), Y.ravel(), D.ravel()]).astype(np.float64)

    nxp, nyp = dims.nx + 1, dims.ny + 1
    i = np.arange(dims.nx)
    j = np.arange(dims.ny)
    k = np.arange(dims.nz)
    K, J, I = np.meshgrid(k, j, i, indexing="ij")
    n000 = (K * nyp + J) * nxp + I
    cell_nodes = np.stack(
        [
            n000,
            n000 + 1,
            n000 + 1 + nxp,
            n000 + nxp,
            n000 + nxp * nyp,
            n000 + nxp * nyp + 1,
            n000 + nxp * nyp + 1 + nxp,
            n000 + nxp * nyp + nxp,
        ],
        axis=-1,
    ).reshape(-1, 8).astype(np.int32)

    boundaries = np.asarray(interface_depths[1:-1], dtype=float)
    centers_rel = (K.ravel() + 0.5) * dz
    layer = np.searchsorted(boundaries, centers_rel, side="left").astype(np.int32)

    return Mesh(dims, coords, cell_nodes, layer, tuple(float(v) for v in interface_depths))


def _check_pillars(mesh: Mesh, context: str) -> None:
    depth = mesh._depth_grid()
    if np.any(np.diff(depth, axis=0) <= _PILLAR_EPS):
        raise DegenerateGeometryError(f"{context}: node depths no longer increase along a pillar")


def apply_undulation(mesh: Mesh, spec: DeformationSpec) -> Mesh:
    """Displace internal stratigraphic interfaces laterally and remap node
    depths piecewise-linearly between the reference and displaced interfaces.

    The displacement field is delta(x, y) = A * sin(2*pi*x/wl) * sin(2*pi*y/wl);
    internal interfaces take it with alternating sign (+delta, -delta, ...).
    Top and bottom surfaces are unchanged.
    """
    if mesh.deformations:
        raise DeformationOrderError(
            f"undulation must be the first deformation; mesh already has {mesh.deformations}")
    if spec.n_units != mesh.n_units:
        raise DegenerateGeometryError(
            f"deformation declares {spec.n_units} units but mesh has {mesh.n_units}")

    ref = np.asarray(spec.interface_depths, dtype=float)
    if spec.undulation_amplitude == 0.0 or len(ref) == 2:
        return replace(mesh, deformations=mesh.deformations + ("undulation",))

    x = mesh.node_coords[:, 0]
    y = mesh.node_coords[:, 1]
    two_pi_over_wl = 2.0 * np.pi / spec.undulation_wavelength
    delta = spec.undulation_amplitude * np.sin(two_pi_over_wl * x) * np.sin(two_pi_over_wl * y)

    z_rel = mesh.node_coords[:, 2] - mesh.dims.origin_depth
    signs = np.array([(-1.0) ** m for m in range(len(ref) - 2)])

    # Per-node displaced breakpoints; interpolate each node's relative depth
    # from the reference intervals to the displaced ones.
    shifted = np.broadcast_to(ref, (len(z_rel), len(ref))).copy()
    shifted[:, 1:-1] += delta[:, None] * signs[None, :]
    if np.any(np.diff(shifted, axis=1) <= 0):
        raise DegenerateGeometryError("undulated interfaces cross")

    seg = np.clip(np.searchsorted(ref, z_rel, side="right") - 1, 0, len(ref) - 2)
    lo, hi = ref[seg], ref[seg + 1]
    t = (z_rel - lo) / (hi - lo)
    rows = np.arange(len(z_rel))
    new_rel = shifted[rows, seg] * (1.0 - t) + shifted[rows, seg + 1] * t

    coords = mesh.node_coords.copy()
    coords[:, 2] = mesh.dims.origin_depth + new_rel
    out = replace(mesh, node_coords=coords, deformations=mesh.deformations + ("undulation",))
    _check_pillars(out, "undulation")
    return out


def apply_dome(mesh: Mesh, spec: DeformationSpec) -> Mesh:
    """Lift nodes into an anticline: uplift D(x, y) = A * exp(-r^2 / (2 R^2))
    about the domain center, attenuated linearly to zero at the base
    (shift = D * (1 - z_rel/Lz)), so bottom nodes never move and the crest
    uplift at the top center equals the dome amplitude exactly."""
    if "dome" in mesh.deformations:
        raise DeformationOrderError("dome deformation already applied")
    if spec.dome_amplitude == 0.0:
        return replace(mesh, deformations=mesh.deformations + ("dome",))

    d = mesh.dims
    x = mesh.node_coords[:, 0]
    y = mesh.node_coords[:, 1]
    r2 = (x - d.lx / 2.0) ** 2 + (y - d.ly / 2.0) ** 2
    uplift = spec.dome_amplitude * np.exp(-r2 / (2.0 * spec.dome_radius**2))

    z_rel = mesh.node_coords[:, 2] - d.origin_depth
    shift = uplift * (1.0 - z_rel / d.lz)

    coords = mesh.node_coords.copy()
    coords[:, 2] -= shift
    out = replace(mesh, node_coords=coords, deformations=mesh.deformations + ("dome",))
    _check_pillars(out, "dome")
    return out


@dataclass(frozen=True)
class GeometrySummary:
    """Volumes, centroids, and the face list backing the discretization.

    Interior faces carry owner and neighbor cell indices with the unit
    normal oriented owner -> neighbor; boundary faces have neighbor -1 and
    a marker naming the boundary they lie on.
    """

    cell_volumes: np.ndarray     # (nc,)
    cell_centroids: np.ndarray   # (nc, 3)
    face_owner: np.ndarray       # (nf,) int32
    face_neighbor: np.ndarray    # (nf,) int32, -1 on the boundary
    face_area: np.ndarray        # (nf,)
    face_normal: np.ndarray      # (nf, 3) unit vectors
    face_centroid: np.ndarray    # (nf, 3)
    boundary_marker: np.ndarray  # (nf,) of '', 'x-', 'x+', 'y-', 'y+', 'top', 'bottom'

    @property
    def interior(self) -> np.ndarray:
        return self.face_neighbor >= 0

    @property
    def bulk_volume(self) -> float:
        return float(self.cell_volumes.sum())


def _cell_volumes_centroids(corners: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Volume and centroid per hexahedron by decomposition into 24
    tetrahedra: each face split into 4 triangles about its centroid, each
    triangle joined to the cell centroid (node mean). Robust for mildly
    deformed cells; exact for trilinear faces."""
    ref = corners.mean(axis=1)  # (nc, 3)
    vol = np.zeros(corners.shape[0])
    first_moment = np.zeros((corners.shape[0], 3))
    for face in _HEX_FACES:
        quad = corners[:, list(face), :]      # (nc, 4, 3)
        fc = quad.mean(axis=1)                # (nc, 3)
        for m in range(4):
            a = quad[:, m, :] - ref
            b = quad[:, (m + 1) % 4, :] - ref
            c = fc - ref
            v = np.einsum("ij,ij->i", a, np.cross(b, c)) / 6.0
            vol += v
            centroid = ref + (a + b + c) / 4.0
            first_moment += v[:, None] * centroid
    if np.any(vol <= 0):
        bad = int(np.argmin(vol))
        raise DegenerateGeometryError(f"cell {bad} has non-positive volume {vol[bad]:.3e}")
    return vol, first_moment / vol[:, None]


def _quad_geometry(quads: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Area vector (half cross of diagonals), area, centroid of each quad."""
    n = 0.5 * np.cross(quads[:, 2, :] - quads[:, 0, :], quads[:, 3, :] - quads[:, 1, :])
    area = np.linalg.norm(n, axis=1)
    centroid = quads.mean(axis=1)
    return n, area, centroid


def compute_geometry(mesh: Mesh) -> GeometrySummary:
    """Enumerate faces once with owner->neighbor orientation and compute
    the volumetric quantities; raises on non-positive cell volumes."""
    d = mesh.dims
    coords = mesh.node_coords
    corners = coords[mesh.cell_nodes]  # (nc, 8, 3)

    volumes, centroids = _cell_volumes_centroids(corners)

    owners, neighbors, quads, markers = [], [], [], []

    def cells(i, j, k):
        return ((k * d.ny + j) * d.nx + i).astype(np.int32)

    # x-direction: quad = owner's x+ face, normal +x
    for axis, face_local, nrm_marker in (
        ("x", (1, 2, 6, 5), ("x-", "x+")),
        ("y", (3, 7, 6, 2), ("y-", "y+")),
        ("z", (4, 5, 6, 7), ("top", "bottom")),
    ):
        if axis == "x":
            K, J, I = np.meshgrid(np.arange(d.nz), np.arange(d.ny), np.arange(d.nx - 1), indexing="ij")
            own, nbr = cells(I, J, K).ravel(), cells(I + 1, J, K).ravel()
            Kb, Jb = np.meshgrid(np.arange(d.nz), np.arange(d.ny), indexing="ij")
            lo_cells, hi_cells = cells(np.zeros_like(Kb), Jb, Kb).ravel(), cells(np.full_like(Kb, d.nx - 1), Jb, Kb).ravel()
            lo_local, hi_local = (3, 0, 4, 7), (1, 2, 6, 5)
        elif axis == "y":
            K, J, I = np.meshgrid(np.arange(d.nz), np.arange(d.ny - 1), np.arange(d.nx), indexing="ij")
            own, nbr = cells(I, J, K).ravel(), cells(I, J + 1, K).ravel()
            Kb, Ib = np.meshgrid(np.arange(d.nz), np.arange(d.nx), indexing="ij")
            lo_cells, hi_cells = cells(Ib, np.zeros_like(Kb), Kb).ravel(), cells(Ib, np.full_like(Kb, d.ny - 1), Kb).ravel()
            lo_local, hi_local = (0, 1, 5, 4), (2, 3, 7, 6)
        else:
            K, J, I = np.meshgrid(np.arange(d.nz - 1), np.arange(d.ny), np.arange(d.nx), indexing="ij")
            own, nbr = cells(I, J, K).ravel(), cells(I, J, K + 1).ravel()
            Jb, Ib = np.meshgrid(np.arange(d.ny), np.arange(d.nx), indexing="ij")
            lo_cells, hi_cells = cells(Ib, Jb, np.zeros_like(Ib)).ravel(), cells(Ib, Jb, np.full_like(Ib, d.nz - 1)).ravel()
            lo_local, hi_local = (0, 3, 2, 1), (4, 5, 6, 7)

        if own.size:
            owners.append(own)
            neighbors.append(nbr)
            quads.append(coords[mesh.cell_nodes[own][:, list(face_local)]])
            markers.append(np.full(own.shape, "", dtype=object))
        # boundary faces: low side quad oriented outward (away from domain)
        owners.append(lo_cells)
        neighbors.append(np.full(lo_cells.shape, -1, dtype=np.int32))
        quads.append(coords[mesh.cell_nodes[lo_cells][:, list(lo_local)]])
        markers.append(np.full(lo_cells.shape, nrm_marker[0], dtype=object))
        owners.append(hi_cells)
        neighbors.append(np.full(hi_cells.shape, -1, dtype=np.int32))
        quads.append(coords[mesh.cell_nodes[hi_cells][:, list(hi_local)]])
        markers.append(np.full(hi_cells.shape, nrm_marker[1], dtype=object))

    owner = np.concatenate(owners).astype(np.int32)
    neighbor = np.concatenate(neighbors).astype(np.int32)
    quad_pts = np.concatenate(quads, axis=0)
    marker = np.concatenate(markers)

    nvec, area, fcentroid = _quad_geometry(quad_pts)
    if np.any(area <= 0):
        raise DegenerateGeometryError("zero-area face encountered")
    normal = nvec / area[:, None]

    return GeometrySummary(
        cell_volumes=volumes,
        cell_centroids=centroids,
        face_owner=owner,
        face_neighbor=neighbor,
        face_area=area,
        face_normal=normal,
        face_centroid=fcentroid,
        boundary_marker=marker,
    )


def export_grid_text(mesh: Mesh) -> str:
    """Versioned text dump of the grid: dims line, node coordinate rows,
    and per-cell unit indices. Used by the diff/UI export path."""
    d = mesh.dims
    lines = [
        "groundloop-grid v1",
        f"dims {d.nx} {d.ny} {d.nz} {d.lx!r} {d.ly!r} {d.lz!r} {d.origin_depth!r}",
        f"deformations {','.join(mesh.deformations) or '-'}",
        f"interfaces {' '.join(repr(v) for v in mesh.interface_depths)}",
        f"nodes {mesh.dims.n_nodes}",
    ]
    lines.extend(f"{x!r} {y!r} {z!r}" for x, y, z in mesh.node_coords.tolist())
    lines.append(f"layers {mesh.dims.n_cells}")
    lines.append(" ".join(str(int(v)) for v in mesh.layer_of_cell))
    return "\n".join(lines) + "\n"
