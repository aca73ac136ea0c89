"""Shared specification fixtures (loaded from the bundled examples and
shrunk where speed matters)."""

from __future__ import annotations

import copy
import json
from importlib import resources


def load_example(name: str) -> dict:
    text = resources.files("groundloop.assets.examples").joinpath(f"{name}.json").read_text()
    return json.loads(text)


def dome_doc() -> dict:
    """Desk-scale dome reference; density closure deliberately absent
    (tacit), which drives the closure-divergence scenarios."""
    return load_example("dome_reservoir")


def dome_doc_complete() -> dict:
    """Fully specified variant: every checklist decision determined."""
    doc = dome_doc()
    doc["fluids"]["density_closure"] = {
        "kind": "constant_compressibility",
        "reference_pressure": "150 bar",
        "compressibility": {"water": 1e-10, "oil": 1e-10},
    }
    return doc


def dome_doc_small(nx=10, ny=10, nz=3, n_report=8) -> dict:
    doc = dome_doc()
    doc["mesh"].update({"nx": nx, "ny": ny, "nz": nz})
    # deliberately off the resolver's interior-fraction pattern, so masked
    # placement is a real degree of freedom
    doc["wells"]["producers"]["placement"] = [
        [nx // 2, ny // 2], [2, ny - 3], [nx - 3, 2]]
    doc["schedule"]["n_report_steps"] = n_report
    return doc


def fivespot_doc() -> dict:
    return load_example("fivespot")


def fivespot_unfavorable_doc() -> dict:
    doc = fivespot_doc()
    doc["meta"]["title"] = "quarter five-spot waterflood, corner injector and producer wells, unfavorable mobility ratio"
    doc["fluids"]["viscosity"] = {"water": "1 cP", "oil": "5 cP"}
    return doc


def waterflood_doc() -> dict:
    return load_example("waterflood_1d")


def journal_dome_doc() -> dict:
    """Compact journal-style description of the dome case."""
    doc = dome_doc()
    doc["meta"] = {"title": doc["meta"]["title"], "level": "journal"}
    doc.pop("sampling", None)
    doc.pop("solver", None)
    deform = doc["deformation"]
    doc["deformation"] = {"undulation_amplitude": deform["undulation_amplitude"],
                          "dome_amplitude": deform["dome_amplitude"]}
    doc["wells"] = copy.deepcopy(doc["wells"])
    doc["wells"]["producers"]["placement"] = "interior"
    return doc


def report_dome_doc(open_porosity: bool = False) -> dict:
    doc = dome_doc()
    doc["meta"] = {"title": doc["meta"]["title"], "level": "report"}
    doc.pop("sampling", None)
    doc.pop("solver", None)
    if open_porosity:
        for layer in doc["layers"]:
            layer.pop("porosity", None)
    return doc


def convergence_failure_doc() -> dict:
    """Five-spot variant whose first step cannot converge at the declared
    initial timestep with a tight Newton budget and no in-run cuts; the
    rule planner's timestep halvings rescue it."""
    from groundloop.units import YEAR_365
    T = YEAR_365
    return {
        "meta": {"title": "forced convergence failure", "level": "reproduction"},
        "mesh": {"nx": 8, "ny": 8, "nz": 1, "lx": 400, "ly": 400, "lz": 10,
                 "origin_depth": 0},
        "deformation": {"undulation_amplitude": 0, "undulation_wavelength": 500,
                        "dome_amplitude": 0, "dome_radius": 400,
                        "interface_depths": [0, 10]},
        "layers": [{"permeability": {"mean": "0.1 D", "std": 0},
                    "porosity": {"mean": 0.3, "std": 0}}],
        "fluids": {
            "viscosity": {"water": "1 cP", "oil": "1 cP"},
            "density": {"water": 1000, "oil": 800},
            "relperm": {"family": "quadratic"},
            "density_closure": {"kind": "incompressible", "reference_pressure": "150 bar"},
        },
        "initial": {"pressure": "150 bar", "s_w": 0.0},
        "wells": {
            "injectors": {"placement": [[0, 0]], "control": "derived",
                          "radius": 0.1, "skin": 0, "k_range": "full"},
            "producers": {"placement": [[7, 7]], "count": 1, "bhp": "50 bar",
                          "radius": 0.1, "skin": 0, "k_range": "full"},
        },
        "schedule": {"total_time": T, "n_report_steps": 10, "year_days": 365},
        "constraints": {"injected_pore_volumes": 1.0, "gravity": "off",
                        "boundaries": "closed"},
        "sampling": {"seed": 7, "strategy": "layer_batched"},
        "solver": {"newton_max_iters": 4, "cnv_tolerance": 1e-6,
                   "mb_tolerance": 1e-7, "initial_dt": T / 50, "min_dt": 1,
                   "max_dt": T / 50, "cut_factor": 0.5, "growth_factor": 1.5,
                   "max_cuts_per_step": 0},
    }
