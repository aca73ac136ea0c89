"""Configuration linting: range checks, unit anomalies, and advisory
findings, run before any simulation is attempted."""

from __future__ import annotations

from dataclasses import dataclass

from ..units import DARCY
from ..modelspec.serialize import ExecutableConfig

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Finding:
    severity: str
    key: str        # checklist key (or dotted field) the finding points at
    message: str

    def to_dict(self) -> dict:
        return {"severity": self.severity, "key": self.key, "message": self.message}


def static_check(config: ExecutableConfig) -> list[Finding]:
    """Lint an executable configuration. An empty list is a pass; error
    findings block the run, warnings are advisory."""
    v = config.values
    findings: list[Finding] = []

    def err(key, msg):
        findings.append(Finding(ERROR, key, msg))

    def warn(key, msg):
        findings.append(Finding(WARNING, key, msg))

    poro = v["porosity_spec"]
    for m in poro["means"]:
        if not (0.0 < m < 1.0):
            err("porosity_spec", f"porosity out of (0,1): mean {m}")
    perm = v["permeability_stats"]
    for m in perm["means"]:
        if m <= 0:
            err("permeability_stats", f"non-positive permeability mean {m}")
        elif m > 100.0 * DARCY:
            warn("permeability_stats",
                 f"permeability mean {m / DARCY:.3g} D exceeds 100 D; check units")

    init = v["initial_state"]
    if init["pressure"] <= 0:
        err("initial_state", "initial pressure must be > 0")
    if not (0.0 <= init["s_w"] <= 1.0):
        err("initial_state", f"initial saturation {init['s_w']} outside [0,1]")

    visc = v["fluid_viscosities"]
    if visc["water"] <= 0 or visc["oil"] <= 0:
        err("fluid_viscosities", "viscosities must be > 0")
    if max(visc.values()) / min(visc.values()) > 1e4:
        warn("fluid_viscosities", "viscosity ratio beyond 1e4; expect hard convergence")

    sched = v["schedule_horizon"]
    solver = v["solver_controls"]
    if solver["initial_dt"] > sched["total_time"]:
        warn("solver_controls",
             "initial_dt exceeds the schedule horizon; it will be clipped to the first report boundary")
    # crude throughput advisory: pore-volume turnover per initial step
    target = v["injection_target"]
    if "pore_volumes" in target:
        frac = target["pore_volumes"] * solver["initial_dt"] / sched["total_time"]
        if frac > 0.2:
            warn("solver_controls",
                 f"initial_dt injects {frac:.0%} of the target pore volume in one step; "
                 "expect timestep cuts")

    dims = v["mesh_dims"]
    for i, j in v["producer_coordinates"]["coords"]:
        if not (0 <= i < dims["nx"] and 0 <= j < dims["ny"]):
            err("producer_coordinates", f"producer column ({i},{j}) outside the grid")
    for i, j in v["well_layout"]["injector_placement"]:
        if not (0 <= i < dims["nx"] and 0 <= j < dims["ny"]):
            err("well_layout", f"injector column ({i},{j}) outside the grid")

    completion = v["well_completion_range"]
    for group in ("injectors", "producers"):
        kr = completion[group]
        if kr != "full" and not (0 <= kr[0] <= kr[1] < dims["nz"]):
            err("well_completion_range", f"{group} k-range {kr} outside [0,{dims['nz']})")

    rp = v["relperm_family_and_params"]
    if rp["residuals"]["water"] + rp["residuals"]["oil"] >= 1:
        err("relperm_family_and_params", "residual saturations sum to >= 1")

    if v["boundary_conditions"]["kind"] != "closed":
        err("boundary_conditions", "only closed boundaries are supported")
    return findings
