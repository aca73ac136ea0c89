"""Executable configurations and their canonical byte form.

A configuration is a total assignment of the decision checklist. Its
canonical serialization is a reproduction-level specification document in
SI units with sorted keys and shortest round-trip float formatting, so
parsing and re-resolving the canonical form reproduces the identical
content hash.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..hashing import canonical_json, content_hash


@dataclass(frozen=True)
class ExecutableConfig:
    """Fully resolved, unit-normalized model: one value per checklist key."""

    values: dict
    title: str = ""
    content_hash: str = ""

    @classmethod
    def from_values(cls, values: dict, title: str = "") -> "ExecutableConfig":
        values = {k: values[k] for k in sorted(values)}
        digest = content_hash({"title": title, "values": values})
        return cls(values=values, title=title, content_hash=digest)

    def key_value(self, key: str):
        return self.values[key]

    # --- canonical document -------------------------------------------------

    def to_document(self) -> dict:
        """Reproduction-level specification document (SI, all blocks)."""
        v = self.values
        mesh = v["mesh_dims"]
        perm = v["permeability_stats"]
        poro = v["porosity_spec"]
        layers = [
            {"permeability": {"mean": km, "std": ks},
             "porosity": {"mean": pm, "std": ps}}
            for km, ks, pm, ps in zip(perm["means"], perm["stds"],
                                      poro["means"], poro["stds"])
        ]
        layout = v["well_layout"]
        gravity = v["gravity"]
        doc = {
            "meta": {"title": self.title, "level": "reproduction"},
            "mesh": dict(mesh),
            "deformation": dict(v["deformation_params"]),
            "layers": layers,
            "fluids": {
                "viscosity": dict(v["fluid_viscosities"]),
                "density": dict(v["fluid_densities"]),
                "relperm": dict(v["relperm_family_and_params"]),
                "density_closure": dict(v["density_closure"]),
            },
            "initial": dict(v["initial_state"]),
            "wells": {
                "injectors": {
                    "placement": [list(p) for p in layout["injector_placement"]],
                    "control": layout["injector_control"],
                    "radius": layout["radius"],
                    "skin": layout["skin"],
                    "k_range": v["well_completion_range"]["injectors"],
                },
                "producers": {
                    "placement": [list(p) for p in v["producer_coordinates"]["coords"]],
                    "count": layout["n_producers"],
                    "bhp": layout["producer_bhp"],
                    "radius": layout["radius"],
                    "skin": layout["skin"],
                    "k_range": v["well_completion_range"]["producers"],
                },
            },
            "schedule": {
                "total_time": v["schedule_horizon"]["total_time"],
                "n_report_steps": v["schedule_horizon"]["n_report_steps"],
                "year_days": v["time_unit_convention"]["year_days"],
            },
            "constraints": {
                "gravity": gravity["magnitude"] if gravity["enabled"] else "off",
                "boundaries": v["boundary_conditions"]["kind"],
            },
            "sampling": {"seed": v["sampling_seed"]["seed"],
                         "strategy": v["sampling_strategy"]["strategy"]},
            "solver": dict(v["solver_controls"]),
        }
        target = v["injection_target"]
        if "pore_volumes" in target:
            doc["constraints"]["injected_pore_volumes"] = target["pore_volumes"]
        else:
            doc["wells"]["injectors"]["control"] = {"rate": target["explicit_rate"]}
        return doc


def canonical_serialize(config: ExecutableConfig) -> tuple[str, str]:
    """(canonical document text, content hash of the configuration)."""
    return canonical_json(config.to_document()), config.content_hash
