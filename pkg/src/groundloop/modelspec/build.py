"""Configuration-to-simulation pipeline.

Builds the deformed grid, samples the petrophysical fields, derives
pore-volume-constrained injection rates, assembles wells, and runs the
simulator. The returned bundle carries everything the diff tooling
compares: the configuration, the run, and a model summary with geometry
and field statistics.
"""

from __future__ import annotations

from dataclasses import dataclass


from ..fields import (LayerStats, LognormalSpec, PropertyField, SamplingPlan,
                      pore_volume, sample_fields)
from ..fluids import DensityClosure, FluidSystem, RelPermModel
from ..hashing import content_hash
from ..meshing import (DeformationSpec, Mesh, MeshDims, apply_dome,
                       apply_undulation, build_cartesian_mesh, compute_geometry)
from ..sim import (RunResult, SimState, SolverControls, build_reservoir_model,
                   simulate)
from ..units import MILLIDARCY
from ..wells import Control, Schedule, Well, derive_injection_rates, setup_vertical_well
from .serialize import ExecutableConfig


@dataclass
class SimulationBundle:
    config: ExecutableConfig
    mesh: Mesh
    model: object                  # ReservoirModel
    wells: list[Well]
    schedule: Schedule
    controls: SolverControls
    initial: SimState
    pore_volume: float
    permeability: PropertyField
    porosity: PropertyField
    result: RunResult | None = None

    def model_summary(self) -> dict:
        """Comparison-ready digest: volumes, per-unit field statistics,
        content hashes, well placements, and the node depth field."""
        mesh = self.mesh
        geom = self.model.geometry
        n_units = mesh.n_units
        return {
            "dims": [mesh.dims.nx, mesh.dims.ny, mesh.dims.nz],
            "cell_count": mesh.dims.n_cells,
            "bulk_volume": geom.bulk_volume,
            "pore_volume": self.pore_volume,
            "cell_pore_volumes": (self.porosity.values * geom.cell_volumes).tolist(),
            "node_depths": mesh.node_coords[:, 2].tolist(),
            "field_hashes": {"permeability": self.permeability.content_hash(),
                             "porosity": self.porosity.content_hash()},
            "unit_stats": {
                "permeability": self.permeability.unit_stats(mesh.layer_of_cell, n_units),
                "porosity": self.porosity.unit_stats(mesh.layer_of_cell, n_units),
            },
            "porosity_redraws": self.porosity.redraw_count,
            "wells": {
                w.name: {"kind": w.kind, "i": w.i, "j": w.j,
                         "k_range": list(w.k_range),
                         "control": {"kind": w.control.kind, "value": w.control.value}}
                for w in self.wells
            },
        }


def _mesh_from_config(config: ExecutableConfig) -> Mesh:
    v = config.values
    m = v["mesh_dims"]
    dims = MeshDims(m["nx"], m["ny"], m["nz"], m["lx"], m["ly"], m["lz"],
                    m["origin_depth"])
    d = v["deformation_params"]
    spec = DeformationSpec(
        undulation_amplitude=d["undulation_amplitude"],
        undulation_wavelength=d["undulation_wavelength"],
        dome_amplitude=d["dome_amplitude"],
        dome_radius=d["dome_radius"],
        interface_depths=tuple(d["interface_depths"]),
    )
    mesh = build_cartesian_mesh(dims, spec.interface_depths)
    mesh = apply_undulation(mesh, spec)
    mesh = apply_dome(mesh, spec)
    return mesh


def _fluids_from_config(config: ExecutableConfig) -> FluidSystem:
    v = config.values
    rp = v["relperm_family_and_params"]
    relperm = RelPermModel(
        family=rp["family"],
        n_w=rp["exponents"]["water"], n_n=rp["exponents"]["oil"],
        sr_w=rp["residuals"]["water"], sr_n=rp["residuals"]["oil"],
        kmax_w=rp["endpoints"]["water"], kmax_n=rp["endpoints"]["oil"],
    )
    dc = v["density_closure"]
    dens = v["fluid_densities"]
    closure = DensityClosure(
        kind=dc["kind"],
        reference_pressure=dc.get("reference_pressure", 1.0e5),
        rho_ref_w=dens["water"], rho_ref_n=dens["oil"],
        c_w=dc["compressibility"]["water"], c_n=dc["compressibility"]["oil"],
    )
    visc = v["fluid_viscosities"]
    return FluidSystem(mu_w=visc["water"], mu_n=visc["oil"],
                       relperm=relperm, density=closure)


def build_simulation(config: ExecutableConfig) -> SimulationBundle:
    """Materialize a configuration: deformed grid, sampled fields, wells
    with derived rates, schedule, and solver controls, ready to simulate."""
    v = config.values
    mesh = _mesh_from_config(config)
    geometry = compute_geometry(mesh)

    perm_stats = v["permeability_stats"]
    poro_stats = v["porosity_spec"]
    stats = LayerStats(
        permeability=tuple(LognormalSpec(m / MILLIDARCY, s / MILLIDARCY)
                           for m, s in zip(perm_stats["means"], perm_stats["stds"])),
        porosity=tuple(LognormalSpec(m, s)
                       for m, s in zip(poro_stats["means"], poro_stats["stds"])),
    )
    plan = SamplingPlan(seed=v["sampling_seed"]["seed"],
                        strategy=v["sampling_strategy"]["strategy"])
    permeability, porosity = sample_fields(mesh, stats, plan)

    fluids = _fluids_from_config(config)
    gravity = v["gravity"]["magnitude"] if v["gravity"]["enabled"] else 0.0
    model = build_reservoir_model(mesh, geometry, permeability, porosity,
                                  fluids, gravity=gravity)
    pv = pore_volume(geometry, porosity)

    sched = v["schedule_horizon"]
    schedule = Schedule.uniform(sched["total_time"], sched["n_report_steps"])

    layout = v["well_layout"]
    target = v["injection_target"]
    n_inj = len(layout["injector_placement"])
    if "pore_volumes" in target:
        rate = derive_injection_rates(target["pore_volumes"] * pv,
                                      schedule.total_time, n_inj)
    else:
        rate = target["explicit_rate"]

    completion = v["well_completion_range"]

    def k_range(group):
        kr = completion[group]
        return None if kr == "full" else (kr[0], kr[1])

    wells: list[Well] = []
    for idx, (i, j) in enumerate(layout["injector_placement"]):
        wells.append(setup_vertical_well(
            mesh, geometry, permeability.values, f"I{idx + 1}", i, j,
            "injector", Control("rate", rate), k_range=k_range("injectors"),
            radius=layout["radius"], skin=layout["skin"]))
    for idx, (i, j) in enumerate(v["producer_coordinates"]["coords"]):
        wells.append(setup_vertical_well(
            mesh, geometry, permeability.values, f"P{idx + 1}", i, j,
            "producer", Control("bhp", layout["producer_bhp"]),
            k_range=k_range("producers"),
            radius=layout["radius"], skin=layout["skin"]))

    controls = SolverControls(**v["solver_controls"])
    init = v["initial_state"]
    initial = SimState.uniform(mesh.dims.n_cells, init["pressure"], init["s_w"],
                               len(wells))

    return SimulationBundle(
        config=config, mesh=mesh, model=model, wells=wells, schedule=schedule,
        controls=controls, initial=initial, pore_volume=pv,
        permeability=permeability, porosity=porosity,
    )


def run_config(config: ExecutableConfig, on_step=None) -> SimulationBundle:
    """Build and simulate; the bundle's ``result`` carries the certificate."""
    bundle = build_simulation(config)
    bundle.result = simulate(bundle.model, bundle.initial, bundle.schedule,
                             bundle.wells, bundle.controls, on_step=on_step)
    return bundle


def run_manifest(bundle: SimulationBundle) -> dict:
    """Summary record written next to exported results."""
    result = bundle.result
    return {
        "schema": "groundloop-run v1",
        "config_hash": bundle.config.content_hash,
        "certificate": bool(result.certificate) if result else False,
        "pore_volume": bundle.pore_volume,
        "final_pvi": (float(result.cumulative_injection[-1] / bundle.pore_volume)
                      if result is not None and len(result.cumulative_injection) else 0.0),
        "controls": bundle.config.values["solver_controls"],
        "totals": {
            "steps": result.n_steps if result else 0,
            "newton_iterations": result.diagnostics.total_newton_iterations if result else 0,
            "cuts": result.diagnostics.total_cuts if result else 0,
            "wall_time": result.diagnostics.wall_time if result else 0.0,
        },
        "model_summary_hash": content_hash(bundle.model_summary()),
    }
