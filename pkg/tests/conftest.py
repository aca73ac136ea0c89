import sys
from pathlib import Path

import numpy as np
import pytest


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(criterion, title): acceptance-criterion test")


_ACCEPTANCE_RESULTS = {}


def pytest_runtest_makereport(item, call):
    if call.when != "call":
        return
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    criterion = marker.kwargs.get("criterion")
    title = marker.kwargs.get("title", "")
    outcome = "PASS" if call.excinfo is None else "FAIL"
    _ACCEPTANCE_RESULTS[criterion] = (outcome, title)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for criterion in sorted(_ACCEPTANCE_RESULTS):
        outcome, title = _ACCEPTANCE_RESULTS[criterion]
        terminalreporter.write_line(f"criterion {criterion:>2}: {outcome}  {title}")

sys.path.insert(0, str(Path(__file__).parent))

from groundloop.fields import PropertyField
from groundloop.fluids import DensityClosure, FluidSystem, RelPermModel
from groundloop.meshing import (DeformationSpec, MeshDims, apply_dome,
                                apply_undulation, build_cartesian_mesh,
                                compute_geometry, equal_interfaces)
from groundloop.sim import SimState, build_reservoir_model


@pytest.fixture(scope="session")
def dome_mesh():
    """20x20x6 three-unit mesh with the standard undulation + dome."""
    dims = MeshDims(20, 20, 6, 1000.0, 1000.0, 50.0, origin_depth=1000.0)
    spec = DeformationSpec(2.0, 500.0, 30.0, 400.0, equal_interfaces(50.0, 3))
    mesh = build_cartesian_mesh(dims, spec.interface_depths)
    mesh = apply_undulation(mesh, spec)
    mesh = apply_dome(mesh, spec)
    return mesh, spec


@pytest.fixture(scope="session")
def dome_geometry(dome_mesh):
    mesh, _ = dome_mesh
    return compute_geometry(mesh)


def small_model(nx=2, ny=2, nz=1, seed=7, gravity=None, residuals=(0.1, 0.1)):
    """Tiny reservoir model with mildly random fields for assembly tests."""
    rng = np.random.default_rng(seed)
    mesh = build_cartesian_mesh(MeshDims(nx, ny, nz, 20.0 * nx, 20.0 * ny, 5.0 * nz))
    geom = compute_geometry(mesh)
    nc = mesh.dims.n_cells
    perm = PropertyField("permeability", "m2", 1e-13 * rng.uniform(0.5, 2.0, nc))
    phi = PropertyField("porosity", "fraction", rng.uniform(0.2, 0.3, nc))
    fluids = FluidSystem(
        mu_w=1e-3, mu_n=5e-3,
        relperm=RelPermModel(n_w=2, n_n=2, sr_w=residuals[0], sr_n=residuals[1]),
        density=DensityClosure(reference_pressure=1e7, c_w=1e-10, c_n=1e-9),
    )
    kwargs = {} if gravity is None else {"gravity": gravity}
    model = build_reservoir_model(mesh, geom, perm, phi, fluids, **kwargs)
    return mesh, geom, model


def random_state(model, seed=11, n_wells=0):
    rng = np.random.default_rng(seed)
    nc = model.n_cells
    return SimState(
        1e7 + rng.uniform(-1e6, 1e6, nc),
        rng.uniform(0.15, 0.85, nc),
        1e7 + rng.uniform(-2e6, 2e6, n_wells),
    )
