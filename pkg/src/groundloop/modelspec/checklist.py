"""The canonical decision checklist.

Every modelling choice a runnable configuration needs is one checklist
item with three parts: a reader that extracts the choice from a
specification when the document determines it, a default generator used
when it does not, and a validator. Resolving every item yields a complete
configuration, which is what makes the assumption ledger total: each key
gets exactly one provenance-tagged entry.

Items flagged ``divergence_prone`` are the choices known to drive
reconstructions apart when left implicit (density closure, sampling order,
interior well placement, deformation details, solver setup).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..errors import ContradictionError, InvariantViolation
from ..units import BAR, CENTIPOISE, GRAVITY, MILLIDARCY, YEAR_365
from .schema import ModelSpec


class _Missing:
    def __repr__(self):
        return "MISSING"


MISSING = _Missing()

BLOCKS_PHYSICS = "blocks-physics"
BLOCKS_REPRODUCIBILITY = "blocks-reproducibility"


@dataclass(frozen=True)
class ChecklistItem:
    key: str
    description: str
    severity: str
    divergence_prone: bool
    determined: Callable[[ModelSpec], object]
    default: Callable[[ModelSpec, dict], tuple]      # -> (value, rationale)
    validate: Callable[[object, dict], None] = lambda value, draft: None


def _n_units(spec: ModelSpec, draft: dict) -> int:
    if "permeability_stats" in draft:
        return len(draft["permeability_stats"]["means"])
    if spec.layers:
        return len(spec.layers)
    if spec.deformation and "interface_depths" in spec.deformation:
        return len(spec.deformation["interface_depths"]) - 1
    return 3


# --- mesh_dims ----------------------------------------------------------------

def _mesh_determined(spec: ModelSpec):
    m = spec.mesh or {}
    needed = ("nx", "ny", "nz", "lx", "ly", "lz")
    if all(k in m for k in needed):
        return {**{k: m[k] for k in needed}, "origin_depth": m.get("origin_depth", 0.0)}
    return MISSING


def _mesh_default(spec: ModelSpec, draft: dict):
    m = dict(spec.mesh or {})
    base = {"nx": 20, "ny": 20, "nz": 6, "lx": 1000.0, "ly": 1000.0, "lz": 50.0,
            "origin_depth": 1000.0}
    filled = [k for k in base if k not in m]
    base.update(m)
    return base, f"desk-scale grid; defaulted fields: {', '.join(filled)}"


def _mesh_validate(value, draft):
    if min(value["nx"], value["ny"], value["nz"]) < 1:
        raise InvariantViolation("mesh cell counts >= 1")
    if min(value["lx"], value["ly"], value["lz"]) <= 0:
        raise InvariantViolation("mesh extents > 0")


# --- permeability_stats ---------------------------------------------------------

def _perm_determined(spec: ModelSpec):
    if not spec.layers:
        return MISSING
    means, stds = [], []
    for entry in spec.layers:
        p = entry.get("permeability")
        if not p or "mean" not in p:
            return MISSING
        means.append(p["mean"])
        stds.append(p.get("std", 0.0))
    return {"means": means, "stds": stds}


def _perm_default(spec: ModelSpec, draft: dict):
    means = [100.0, 200.0, 900.0]
    stds = [30.0, 60.0, 90.0]
    return ({"means": [m * MILLIDARCY for m in means],
             "stds": [s * MILLIDARCY for s in stds]},
            "three-unit lognormal permeability, means 100/200/900 mD, stds 30/60/90 mD")


def _perm_validate(value, draft):
    if len(value["means"]) != len(value["stds"]) or not value["means"]:
        raise InvariantViolation("permeability means/stds must be non-empty and equal length")
    if any(m <= 0 for m in value["means"]) or any(s < 0 for s in value["stds"]):
        raise InvariantViolation("permeability mean must be > 0 and std >= 0")


# --- porosity_spec --------------------------------------------------------------

def _poro_determined(spec: ModelSpec):
    if not spec.layers:
        return MISSING
    means, stds = [], []
    for entry in spec.layers:
        p = entry.get("porosity")
        if not p or "mean" not in p:
            return MISSING
        means.append(p["mean"])
        stds.append(p.get("std", 0.0))
    return {"means": means, "stds": stds}


def _poro_default(spec: ModelSpec, draft: dict):
    n = _n_units(spec, draft)
    return ({"means": [0.3] * n, "stds": [0.0] * n},
            "constant porosity 0.3 per unit; override with lognormal statistics if heterogeneity is intended")


def _poro_validate(value, draft):
    if "permeability_stats" in draft and \
            len(value["means"]) != len(draft["permeability_stats"]["means"]):
        raise ContradictionError(
            "porosity and permeability statistics cover different unit counts",
            ("layers[*].porosity", "layers[*].permeability"))
    for m in value["means"]:
        if not (0.0 < m < 1.0):
            raise InvariantViolation("porosity mean in (0, 1)")
    if any(s < 0 for s in value["stds"]):
        raise InvariantViolation("porosity std >= 0")


# --- deformation_params ---------------------------------------------------------

def _deform_determined(spec: ModelSpec):
    d = spec.deformation or {}
    needed = ("undulation_amplitude", "undulation_wavelength", "dome_amplitude",
              "dome_radius", "interface_depths")
    if all(k in d for k in needed):
        return {k: d[k] for k in needed}
    return MISSING


def _deform_default(spec: ModelSpec, draft: dict):
    d = dict(spec.deformation or {})
    n = _n_units(spec, draft)
    lz = draft["mesh_dims"]["lz"]
    base = {
        "undulation_amplitude": 0.0 if not d else d.get("undulation_amplitude", 2.0),
        "undulation_wavelength": 500.0,
        "dome_amplitude": 0.0 if not d else d.get("dome_amplitude", 30.0),
        "dome_radius": 400.0,
        "interface_depths": [lz * i / n for i in range(n + 1)],
    }
    filled = [k for k in base if k not in d]
    base.update(d)
    if not d:
        note = "no deformation block: flat stratigraphy, equal-thickness units"
    else:
        note = f"smooth sinusoidal undulation and Gaussian dome; defaulted fields: {', '.join(filled)}"
    return base, note


def _deform_validate(value, draft):
    z = value["interface_depths"]
    if len(z) < 2 or z[0] != 0 or any(b <= a for a, b in zip(z, z[1:])):
        raise InvariantViolation("interface_depths start at 0 and strictly increase")
    lz = draft["mesh_dims"]["lz"]
    if abs(z[-1] - lz) > 1e-9 * max(lz, 1.0):
        raise ContradictionError(
            f"last interface depth {z[-1]} does not equal domain thickness {lz}",
            ("deformation.interface_depths", "mesh.lz"))
    if "permeability_stats" in draft and \
            len(z) - 1 != len(draft["permeability_stats"]["means"]):
        raise ContradictionError(
            "interface count disagrees with the layer-statistics unit count",
            ("deformation.interface_depths", "layers"))
    spacing = min(b - a for a, b in zip(z, z[1:]))
    if value["undulation_amplitude"] >= spacing / 2:
        raise InvariantViolation("undulation amplitude below half the interface spacing")
    if value["undulation_wavelength"] <= 0 or value["dome_radius"] <= 0:
        raise InvariantViolation("wavelength and dome radius > 0")


# --- fluids ---------------------------------------------------------------------

def _visc_determined(spec: ModelSpec):
    v = (spec.fluids or {}).get("viscosity", {})
    if "water" in v and "oil" in v:
        return {"water": v["water"], "oil": v["oil"]}
    return MISSING


def _visc_default(spec, draft):
    return ({"water": 0.5 * CENTIPOISE, "oil": 5.0 * CENTIPOISE},
            "constant viscosities 0.5/5 cP: an unfavorable waterflood (M = 10)")


def _visc_validate(value, draft):
    if value["water"] <= 0 or value["oil"] <= 0:
        raise InvariantViolation("viscosities > 0")


def _dens_determined(spec: ModelSpec):
    d = (spec.fluids or {}).get("density", {})
    if "water" in d and "oil" in d:
        return {"water": d["water"], "oil": d["oil"]}
    return MISSING


def _dens_default(spec, draft):
    return ({"water": 1000.0, "oil": 800.0},
            "reference densities 1000/800 kg/m^3 at surface conditions")


def _dens_validate(value, draft):
    if value["water"] <= 0 or value["oil"] <= 0:
        raise InvariantViolation("densities > 0")


def _closure_determined(spec: ModelSpec):
    dc = (spec.fluids or {}).get("density_closure", {})
    if "kind" in dc and "compressibility" in dc and \
            "water" in dc["compressibility"] and "oil" in dc["compressibility"]:
        out = {"kind": dc["kind"],
               "compressibility": dict(dc["compressibility"])}
        if "reference_pressure" in dc:
            out["reference_pressure"] = dc["reference_pressure"]
        return out
    if dc.get("kind") == "incompressible":
        return {"kind": "incompressible",
                "compressibility": {"water": 0.0, "oil": 0.0},
                "reference_pressure": dc.get("reference_pressure", 1.0e5)}
    return MISSING


def _closure_default(spec: ModelSpec, draft: dict):
    p_ref = draft.get("initial_state", {}).get("pressure", 150.0 * BAR)
    return ({"kind": "constant_compressibility",
             "reference_pressure": p_ref,
             "compressibility": {"water": 1.0e-10, "oil": 1.0e-10}},
            "linear density closure, slight compressibility 1e-10 1/Pa per phase, "
            "referenced at the initial pressure; state this explicitly because a "
            "silently inherited closure changes pressure evolution")


def _closure_validate(value, draft):
    c = value["compressibility"]
    if c["water"] < 0 or c["oil"] < 0:
        raise InvariantViolation("compressibilities >= 0")
    if value.get("reference_pressure", 1.0) <= 0:
        raise InvariantViolation("reference pressure > 0")


def _relperm_determined(spec: ModelSpec):
    rp = (spec.fluids or {}).get("relperm", {})
    if rp.get("family") == "quadratic":
        return {"family": "quadratic",
                "exponents": {"water": 2.0, "oil": 2.0},
                "residuals": {"water": 0.0, "oil": 0.0},
                "endpoints": {"water": 1.0, "oil": 1.0}}
    if rp.get("family") == "brooks_corey" and "exponents" in rp and "residuals" in rp:
        exps, res = rp["exponents"], rp["residuals"]
        if "water" in exps and "oil" in exps and "water" in res and "oil" in res:
            ends = rp.get("endpoints", {})
            return {"family": "brooks_corey",
                    "exponents": dict(exps), "residuals": dict(res),
                    "endpoints": {"water": ends.get("water", 1.0),
                                  "oil": ends.get("oil", 1.0)}}
    return MISSING


def _relperm_default(spec, draft):
    return ({"family": "brooks_corey",
             "exponents": {"water": 2.0, "oil": 2.0},
             "residuals": {"water": 0.2, "oil": 0.2},
             "endpoints": {"water": 1.0, "oil": 1.0}},
            "Brooks-Corey with quadratic exponents and moderate residual saturations 0.2/0.2")


def _relperm_validate(value, draft):
    e, r, k = value["exponents"], value["residuals"], value["endpoints"]
    if e["water"] < 1 or e["oil"] < 1:
        raise InvariantViolation("relperm exponents >= 1")
    if not (0 <= r["water"] and 0 <= r["oil"] and r["water"] + r["oil"] < 1):
        raise InvariantViolation("0 <= Sr_w + Sr_n < 1")
    if not (0 < k["water"] <= 1 and 0 < k["oil"] <= 1):
        raise InvariantViolation("endpoints in (0, 1]")


# --- initial / gravity / boundaries ---------------------------------------------

def _initial_determined(spec: ModelSpec):
    i = spec.initial or {}
    if "pressure" in i and "s_w" in i:
        return {"pressure": i["pressure"], "s_w": i["s_w"]}
    return MISSING


def _initial_default(spec, draft):
    return ({"pressure": 150.0 * BAR, "s_w": 0.2},
            "uniform initial state: 150 bar, water saturation 0.2")


def _initial_validate(value, draft):
    if value["pressure"] <= 0:
        raise InvariantViolation("initial pressure > 0")
    if not (0.0 <= value["s_w"] <= 1.0):
        raise InvariantViolation("initial saturation in [0, 1]")


def _gravity_determined(spec: ModelSpec):
    g = (spec.constraints or {}).get("gravity")
    if g is None:
        return MISSING
    if g == "on":
        return {"enabled": True, "magnitude": GRAVITY}
    if g == "off":
        return {"enabled": False, "magnitude": 0.0}
    return {"enabled": g != 0.0, "magnitude": float(g)}


def _gravity_default(spec, draft):
    return ({"enabled": True, "magnitude": GRAVITY},
            "gravity on (9.80665 m/s^2); buoyancy matters for segregation behavior")


def _boundary_determined(spec: ModelSpec):
    b = (spec.constraints or {}).get("boundaries")
    return {"kind": "closed"} if b == "closed" else MISSING


def _boundary_default(spec, draft):
    return {"kind": "closed"}, "closed (no-flow) outer boundaries"


def _boundary_validate(value, draft):
    if value["kind"] != "closed":
        raise InvariantViolation("only closed boundaries supported")


# --- wells -----------------------------------------------------------------------

def _corner_placement(dims: dict) -> list:
    nx, ny = dims["nx"], dims["ny"]
    return [[0, 0], [nx - 1, 0], [0, ny - 1], [nx - 1, ny - 1]]


def _resolve_coord(pair, dims) -> list:
    i, j = pair
    nx, ny = dims["nx"], dims["ny"]
    if isinstance(i, float) and 0 <= i <= 1 and (i != int(i) or isinstance(j, float) and j <= 1):
        return [min(int(i * nx), nx - 1), min(int(j * ny), ny - 1)]
    return [int(i), int(j)]


def _layout_determined(spec: ModelSpec):
    w = spec.wells or {}
    inj, prod = w.get("injectors"), w.get("producers")
    if not inj or not prod:
        return MISSING
    if "placement" not in inj or "bhp" not in prod:
        return MISSING
    n_prod = prod.get("count", len(prod["placement"]) if isinstance(prod.get("placement"), list) else None)
    if n_prod is None:
        return MISSING
    control = inj.get("control", "derived")
    return {
        "injector_placement": inj["placement"],
        "injector_control": control,
        "n_producers": n_prod,
        "producer_bhp": prod["bhp"],
        "radius": inj.get("radius", prod.get("radius", 0.1)),
        "skin": inj.get("skin", prod.get("skin", 0.0)),
    }


def _layout_default(spec: ModelSpec, draft: dict):
    w = spec.wells or {}
    inj, prod = w.get("injectors", {}), w.get("producers", {})
    value = {
        "injector_placement": inj.get("placement", "corners"),
        "injector_control": inj.get("control", "derived"),
        "n_producers": prod.get("count",
                                len(prod["placement"]) if isinstance(prod.get("placement"), list) else 3),
        "producer_bhp": prod.get("bhp", 50.0 * BAR),
        "radius": inj.get("radius", prod.get("radius", 0.1)),
        "skin": inj.get("skin", prod.get("skin", 0.0)),
    }
    return value, ("four rate-controlled corner injectors and BHP producers at 50 bar "
                   "(defaults fill whatever the wells block left out)")


def _layout_normalize(value, draft):
    if value["injector_placement"] == "corners":
        value = dict(value)
        value["injector_placement"] = _corner_placement(draft["mesh_dims"])
    else:
        value = dict(value)
        value["injector_placement"] = [
            _resolve_coord(p, draft["mesh_dims"]) for p in value["injector_placement"]]
    return value


def _layout_validate(value, draft):
    dims = draft["mesh_dims"]
    for i, j in value["injector_placement"]:
        if not (0 <= i < dims["nx"] and 0 <= j < dims["ny"]):
            raise InvariantViolation("injector column inside the grid")
    if value["n_producers"] < 1:
        raise InvariantViolation("at least one producer")
    if value["producer_bhp"] <= 0:
        raise InvariantViolation("producer BHP > 0")


def _producer_coords_determined(spec: ModelSpec):
    prod = (spec.wells or {}).get("producers", {})
    placement = prod.get("placement")
    if isinstance(placement, list):
        return {"coords": placement}
    return MISSING


_INTERIOR_FRACTIONS = [(0.5, 0.5), (0.3, 0.7), (0.7, 0.3)]


def _producer_coords_default(spec: ModelSpec, draft: dict):
    dims = draft["mesh_dims"]
    n = draft["well_layout"]["n_producers"]
    fracs = list(_INTERIOR_FRACTIONS)
    while len(fracs) < n:  # deterministic diagonal fill for unusual counts
        m = len(fracs) - 2
        fracs.append((0.25 + 0.5 * (m % 3) / 3.0, 0.25 + 0.5 * ((m + 1) % 3) / 3.0))
    coords = [[min(int(fx * dims["nx"]), dims["nx"] - 1),
               min(int(fy * dims["ny"]), dims["ny"] - 1)] for fx, fy in fracs[:n]]
    return ({"coords": coords},
            "interior producers at column fractions (0.5,0.5), (0.3,0.7), (0.7,0.3); "
            "exact placement is a first-order reconstruction degree of freedom")


def _producer_coords_normalize(value, draft):
    return {"coords": [_resolve_coord(p, draft["mesh_dims"]) for p in value["coords"]]}


def _producer_coords_validate(value, draft):
    dims = draft["mesh_dims"]
    n = draft["well_layout"]["n_producers"]
    if len(value["coords"]) != n:
        raise ContradictionError(
            f"{len(value['coords'])} producer coordinates for {n} producers",
            ("wells.producers.placement", "wells.producers.count"))
    for i, j in value["coords"]:
        if not (0 <= i < dims["nx"] and 0 <= j < dims["ny"]):
            raise InvariantViolation("producer column inside the grid")


def _completion_determined(spec: ModelSpec):
    w = spec.wells or {}
    inj_kr = w.get("injectors", {}).get("k_range")
    prod_kr = w.get("producers", {}).get("k_range")
    if inj_kr is not None and prod_kr is not None:
        return {"injectors": inj_kr, "producers": prod_kr}
    return MISSING


def _completion_default(spec: ModelSpec, draft: dict):
    w = spec.wells or {}
    value = {"injectors": w.get("injectors", {}).get("k_range", "full"),
             "producers": w.get("producers", {}).get("k_range", "full")}
    return value, "vertical wells perforating the full thickness"


def _completion_validate(value, draft):
    nz = draft["mesh_dims"]["nz"]
    for group in ("injectors", "producers"):
        kr = value[group]
        if kr == "full":
            continue
        if not (0 <= kr[0] <= kr[1] < nz):
            raise InvariantViolation("completion k-range inside [0, nz)")


# --- injection target / schedule --------------------------------------------------

def _target_determined(spec: ModelSpec):
    pvi = (spec.constraints or {}).get("injected_pore_volumes")
    control = ((spec.wells or {}).get("injectors", {}) or {}).get("control")
    explicit = isinstance(control, dict) and "rate" in control
    if pvi is not None and explicit:
        raise ContradictionError(
            "both an injected-pore-volume target and explicit injector rates are given",
            ("constraints.injected_pore_volumes", "wells.injectors.control.rate"))
    if pvi is not None:
        return {"pore_volumes": pvi}
    if explicit:
        return {"explicit_rate": control["rate"]}
    return MISSING


def _target_default(spec, draft):
    return ({"pore_volumes": 1.0},
            "inject exactly one pore volume over the schedule, split equally across injectors")


def _target_validate(value, draft):
    if "pore_volumes" in value and value["pore_volumes"] <= 0:
        raise InvariantViolation("injected pore volumes > 0")
    if "explicit_rate" in value and value["explicit_rate"] <= 0:
        raise InvariantViolation("injection rate > 0")


def _schedule_determined(spec: ModelSpec):
    s = spec.schedule or {}
    if "total_time" in s:
        return {"total_time": s["total_time"],
                "n_report_steps": s.get("n_report_steps", 20)}
    return MISSING


def _schedule_default(spec, draft):
    return ({"total_time": 10.0 * YEAR_365, "n_report_steps": 20},
            "ten-year horizon with 20 report steps")


def _schedule_validate(value, draft):
    if value["total_time"] <= 0 or value["n_report_steps"] < 1:
        raise InvariantViolation("schedule positive and at least one report step")


# --- sampling / solver / time convention -------------------------------------------

def _seed_determined(spec: ModelSpec):
    s = (spec.sampling or {}).get("seed")
    return {"seed": s} if s is not None else MISSING


def _seed_default(spec, draft):
    return {"seed": 42}, "fixed sampling seed for reproducibility"


def _strategy_determined(spec: ModelSpec):
    s = (spec.sampling or {}).get("strategy")
    return {"strategy": s} if s is not None else MISSING


def _strategy_default(spec, draft):
    return ({"strategy": "layer_batched"},
            "sample per-unit batches (all permeability draws, then porosity); "
            "the draw order is part of the realization, so it must be pinned")


def _solver_determined(spec: ModelSpec):
    s = spec.solver or {}
    needed = ("newton_max_iters", "cnv_tolerance", "mb_tolerance", "initial_dt",
              "min_dt", "max_dt", "cut_factor", "growth_factor", "max_cuts_per_step")
    if all(k in s for k in needed):
        out = {k: s[k] for k in needed}
        out["ctrl_tolerance"] = s.get("ctrl_tolerance", 1.0e-11)
        out["ds_max"] = s.get("ds_max", 0.2)
        return out
    return MISSING


def _solver_default(spec: ModelSpec, draft: dict):
    total = draft["schedule_horizon"]["total_time"]
    s = dict(spec.solver or {})
    base = {
        "newton_max_iters": 15,
        "cnv_tolerance": 1.0e-6,
        "mb_tolerance": 1.0e-7,
        "initial_dt": min(86_400.0, total / 20.0),
        "min_dt": 1.0,
        "max_dt": total / 20.0,
        "cut_factor": 0.5,
        "growth_factor": 1.5,
        "max_cuts_per_step": 10,
        "ctrl_tolerance": 1.0e-11,
        "ds_max": 0.2,
    }
    filled = [k for k in base if k not in s]
    base.update(s)
    return base, ("Newton tolerances cnv 1e-6 / mb 1e-7, halving cuts with 1.5x regrowth; "
                  f"defaulted fields: {', '.join(filled)}")


def _solver_validate(value, draft):
    if value["cnv_tolerance"] <= 0 or value["mb_tolerance"] <= 0:
        raise InvariantViolation("tolerances > 0")
    if not (0 < value["cut_factor"] < 1 < value["growth_factor"]):
        raise InvariantViolation("0 < cut_factor < 1 < growth_factor")
    if not (0 < value["min_dt"] <= value["initial_dt"] <= value["max_dt"]):
        raise InvariantViolation("0 < min_dt <= initial_dt <= max_dt")


def _year_determined(spec: ModelSpec):
    yd = (spec.schedule or {}).get("year_days")
    return {"year_days": yd} if yd is not None else MISSING


def _year_default(spec, draft):
    return {"year_days": 365.0}, "1 year = 365 days for schedule conversion"


CANONICAL_CHECKLIST: tuple[ChecklistItem, ...] = (
    ChecklistItem("mesh_dims", "grid size and physical extents",
                  BLOCKS_PHYSICS, False, _mesh_determined, _mesh_default, _mesh_validate),
    ChecklistItem("permeability_stats", "per-unit permeability statistics",
                  BLOCKS_PHYSICS, False, _perm_determined, _perm_default, _perm_validate),
    ChecklistItem("porosity_spec", "per-unit porosity statistics (constant or lognormal)",
                  BLOCKS_PHYSICS, True, _poro_determined, _poro_default, _poro_validate),
    ChecklistItem("deformation_params", "stratigraphic undulation and dome parameters",
                  BLOCKS_PHYSICS, True, _deform_determined, _deform_default, _deform_validate),
    ChecklistItem("fluid_viscosities", "constant phase viscosities",
                  BLOCKS_PHYSICS, False, _visc_determined, _visc_default, _visc_validate),
    ChecklistItem("fluid_densities", "reference phase densities",
                  BLOCKS_PHYSICS, False, _dens_determined, _dens_default, _dens_validate),
    ChecklistItem("initial_state", "initial pressure and water saturation",
                  BLOCKS_PHYSICS, False, _initial_determined, _initial_default, _initial_validate),
    ChecklistItem("density_closure", "density-pressure relationship per phase",
                  BLOCKS_PHYSICS, True, _closure_determined, _closure_default, _closure_validate),
    ChecklistItem("relperm_family_and_params", "relative permeability family and parameters",
                  BLOCKS_PHYSICS, False, _relperm_determined, _relperm_default, _relperm_validate),
    ChecklistItem("gravity", "gravity on/off and magnitude",
                  BLOCKS_PHYSICS, False, _gravity_determined, _gravity_default),
    ChecklistItem("boundary_conditions", "outer boundary condition",
                  BLOCKS_PHYSICS, False, _boundary_determined, _boundary_default, _boundary_validate),
    ChecklistItem("well_layout", "injector/producer counts, controls, and placement style",
                  BLOCKS_PHYSICS, False, _layout_determined, _layout_default, _layout_validate),
    ChecklistItem("producer_coordinates", "exact interior producer columns",
                  BLOCKS_PHYSICS, True, _producer_coords_determined,
                  _producer_coords_default, _producer_coords_validate),
    ChecklistItem("well_completion_range", "perforated k-range per well group",
                  BLOCKS_PHYSICS, False, _completion_determined, _completion_default,
                  _completion_validate),
    ChecklistItem("injection_target", "pore-volume injection constraint or explicit rates",
                  BLOCKS_PHYSICS, False, _target_determined, _target_default, _target_validate),
    ChecklistItem("schedule_horizon", "total simulated time and report layout",
                  BLOCKS_PHYSICS, False, _schedule_determined, _schedule_default,
                  _schedule_validate),
    ChecklistItem("sampling_seed", "random seed for field realizations",
                  BLOCKS_REPRODUCIBILITY, True, _seed_determined, _seed_default),
    ChecklistItem("sampling_strategy", "order in which the seeded stream is consumed",
                  BLOCKS_REPRODUCIBILITY, True, _strategy_determined, _strategy_default),
    ChecklistItem("solver_controls", "Newton and timestep-control settings",
                  BLOCKS_REPRODUCIBILITY, True, _solver_determined, _solver_default,
                  _solver_validate),
    ChecklistItem("time_unit_convention", "days per year for schedule conversion",
                  BLOCKS_REPRODUCIBILITY, False, _year_determined, _year_default),
)

# post-resolution normalizers (need the draft for mesh-relative placements)
NORMALIZERS = {
    "well_layout": _layout_normalize,
    "producer_coordinates": _producer_coords_normalize,
}

CHECKLIST_KEYS = tuple(item.key for item in CANONICAL_CHECKLIST)
