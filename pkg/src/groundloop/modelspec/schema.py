"""Leveled model-specification documents.

A specification is UTF-8 JSON with top-level blocks: meta, mesh,
deformation, layers, fluids, initial, wells, schedule, constraints,
sampling, solver. Any block or field may be absent; what is present is
validated and unit-normalized to SI here. Unknown keys are rejected with
their location.

Abstraction levels gate what a document may contain: ``reproduction``
admits everything; ``report`` must not carry sampling, seed, or solver
blocks; ``journal`` additionally must not carry exact producer coordinates
or the deformation's functional details (wavelength, dome radius,
interface depths) beyond the amplitudes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from ..errors import ContradictionError, LevelMaskError, SpecParseError
from ..units import YEAR_365, DAY, parse_quantity

LEVELS = ("reproduction", "report", "journal")

TOP_LEVEL_KEYS = ("meta", "mesh", "deformation", "layers", "fluids", "initial",
                  "wells", "schedule", "constraints", "sampling", "solver")


@dataclass(frozen=True)
class ModelSpec:
    """Parsed, SI-normalized specification; absent blocks are None."""

    title: str = ""
    level: str = "reproduction"
    mesh: dict | None = None
    deformation: dict | None = None
    layers: list | None = None
    fluids: dict | None = None
    initial: dict | None = None
    wells: dict | None = None
    schedule: dict | None = None
    constraints: dict | None = None
    sampling: dict | None = None
    solver: dict | None = None

    def block(self, name: str):
        return getattr(self, name)

    def with_block(self, name: str, value) -> "ModelSpec":
        return replace(self, **{name: value})


def _check_keys(d: dict, allowed: tuple, loc: str) -> None:
    unknown = set(d) - set(allowed)
    if unknown:
        raise SpecParseError(f"unknown key(s) {sorted(unknown)}", loc)


def _as_int(v, loc: str) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
        raise SpecParseError(f"expected integer, got {v!r}", loc)
    return int(v)


def _as_number(v, loc: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SpecParseError(f"expected number, got {v!r}", loc)
    return float(v)


def _pair(d: dict, loc: str, kind: str, year_s: float) -> dict:
    _check_keys(d, ("water", "oil"), loc)
    out = {}
    for ph in ("water", "oil"):
        if ph in d:
            out[ph] = parse_quantity(d[ph], kind, f"{loc}.{ph}", year_s)
    return out


def _parse_mesh(raw: dict, year_s: float) -> dict:
    loc = "mesh"
    _check_keys(raw, ("nx", "ny", "nz", "lx", "ly", "lz", "origin_depth"), loc)
    out = {}
    for k in ("nx", "ny", "nz"):
        if k in raw:
            out[k] = _as_int(raw[k], f"{loc}.{k}")
    for k in ("lx", "ly", "lz", "origin_depth"):
        if k in raw:
            out[k] = parse_quantity(raw[k], "length", f"{loc}.{k}", year_s)
    return out


def _parse_deformation(raw: dict, year_s: float) -> dict:
    loc = "deformation"
    _check_keys(raw, ("undulation_amplitude", "undulation_wavelength",
                      "dome_amplitude", "dome_radius", "interface_depths"), loc)
    out = {}
    for k in ("undulation_amplitude", "undulation_wavelength", "dome_amplitude",
              "dome_radius"):
        if k in raw:
            out[k] = parse_quantity(raw[k], "length", f"{loc}.{k}", year_s)
    if "interface_depths" in raw:
        vals = raw["interface_depths"]
        if not isinstance(vals, list) or len(vals) < 2:
            raise SpecParseError("interface_depths must be a list of at least 2 depths",
                                 f"{loc}.interface_depths")
        out["interface_depths"] = [
            parse_quantity(v, "length", f"{loc}.interface_depths[{i}]", year_s)
            for i, v in enumerate(vals)
        ]
    return out


def _parse_layers(raw: list, year_s: float) -> list:
    if not isinstance(raw, list) or not raw:
        raise SpecParseError("layers must be a non-empty list", "layers")
    out = []
    for i, entry in enumerate(raw):
        loc = f"layers[{i}]"
        _check_keys(entry, ("permeability", "porosity"), loc)
        norm = {}
        if "permeability" in entry:
            p = entry["permeability"]
            _check_keys(p, ("mean", "std"), f"{loc}.permeability")
            norm["permeability"] = {
                k: parse_quantity(p[k], "permeability", f"{loc}.permeability.{k}", year_s)
                for k in p
            }
        if "porosity" in entry:
            p = entry["porosity"]
            _check_keys(p, ("mean", "std"), f"{loc}.porosity")
            norm["porosity"] = {k: _as_number(p[k], f"{loc}.porosity.{k}") for k in p}
        out.append(norm)
    return out


def _parse_fluids(raw: dict, year_s: float) -> dict:
    loc = "fluids"
    _check_keys(raw, ("viscosity", "density", "relperm", "density_closure"), loc)
    out = {}
    if "viscosity" in raw:
        out["viscosity"] = _pair(raw["viscosity"], f"{loc}.viscosity", "viscosity", year_s)
    if "density" in raw:
        out["density"] = _pair(raw["density"], f"{loc}.density", "density", year_s)
    if "relperm" in raw:
        rp = raw["relperm"]
        _check_keys(rp, ("family", "exponents", "residuals", "endpoints"), f"{loc}.relperm")
        norm = {}
        if "family" in rp:
            if rp["family"] not in ("quadratic", "brooks_corey"):
                raise SpecParseError(f"unknown relperm family {rp['family']!r}",
                                     f"{loc}.relperm.family")
            norm["family"] = rp["family"]
        for k in ("exponents", "residuals", "endpoints"):
            if k in rp:
                norm[k] = {ph: _as_number(v, f"{loc}.relperm.{k}.{ph}")
                           for ph, v in rp[k].items() if ph in ("water", "oil")}
                _check_keys(rp[k], ("water", "oil"), f"{loc}.relperm.{k}")
        out["relperm"] = norm
    if "density_closure" in raw:
        dc = raw["density_closure"]
        _check_keys(dc, ("kind", "reference_pressure", "compressibility"), f"{loc}.density_closure")
        norm = {}
        if "kind" in dc:
            if dc["kind"] not in ("constant_compressibility", "incompressible"):
                raise SpecParseError(f"unknown closure kind {dc['kind']!r}",
                                     f"{loc}.density_closure.kind")
            norm["kind"] = dc["kind"]
        if "reference_pressure" in dc:
            norm["reference_pressure"] = parse_quantity(
                dc["reference_pressure"], "pressure", f"{loc}.density_closure.reference_pressure", year_s)
        if "compressibility" in dc:
            norm["compressibility"] = _pair(dc["compressibility"],
                                            f"{loc}.density_closure.compressibility",
                                            "compressibility", year_s)
        out["density_closure"] = norm
    return out


def _parse_initial(raw: dict, year_s: float) -> dict:
    loc = "initial"
    _check_keys(raw, ("pressure", "s_w"), loc)
    out = {}
    if "pressure" in raw:
        out["pressure"] = parse_quantity(raw["pressure"], "pressure", f"{loc}.pressure", year_s)
    if "s_w" in raw:
        out["s_w"] = _as_number(raw["s_w"], f"{loc}.s_w")
    return out


def _parse_placement(v, loc: str):
    if v == "corners" or v == "interior":
        return v
    if isinstance(v, list):
        out = []
        for i, item in enumerate(v):
            if (not isinstance(item, list)) or len(item) != 2:
                raise SpecParseError("placement entries must be [i, j] pairs",
                                     f"{loc}[{i}]")
            out.append([_as_number(item[0], f"{loc}[{i}][0]"),
                        _as_number(item[1], f"{loc}[{i}][1]")])
        return out
    raise SpecParseError(f"placement must be 'corners', 'interior', or a pair list, got {v!r}", loc)


def _parse_well_group(raw: dict, loc: str, year_s: float) -> dict:
    _check_keys(raw, ("placement", "count", "control", "bhp", "rate",
                      "radius", "skin", "k_range"), loc)
    out = {}
    if "placement" in raw:
        out["placement"] = _parse_placement(raw["placement"], f"{loc}.placement")
    if "count" in raw:
        out["count"] = _as_int(raw["count"], f"{loc}.count")
    if "control" in raw:
        c = raw["control"]
        if c == "derived":
            out["control"] = "derived"
        elif isinstance(c, dict) and set(c) == {"rate"}:
            out["control"] = {"rate": parse_quantity(c["rate"], "rate", f"{loc}.control.rate", year_s)}
        else:
            raise SpecParseError("control must be 'derived' or {'rate': q}", f"{loc}.control")
    if "bhp" in raw:
        out["bhp"] = parse_quantity(raw["bhp"], "pressure", f"{loc}.bhp", year_s)
    if "rate" in raw:
        out["rate"] = parse_quantity(raw["rate"], "rate", f"{loc}.rate", year_s)
    if "radius" in raw:
        out["radius"] = parse_quantity(raw["radius"], "length", f"{loc}.radius", year_s)
    if "skin" in raw:
        out["skin"] = _as_number(raw["skin"], f"{loc}.skin")
    if "k_range" in raw:
        kr = raw["k_range"]
        if kr == "full":
            out["k_range"] = "full"
        elif isinstance(kr, list) and len(kr) == 2:
            out["k_range"] = [_as_int(kr[0], f"{loc}.k_range[0]"),
                              _as_int(kr[1], f"{loc}.k_range[1]")]
        else:
            raise SpecParseError("k_range must be 'full' or [k0, k1]", f"{loc}.k_range")
    return out


def _parse_wells(raw: dict, year_s: float) -> dict:
    loc = "wells"
    _check_keys(raw, ("injectors", "producers"), loc)
    out = {}
    for group in ("injectors", "producers"):
        if group in raw:
            out[group] = _parse_well_group(raw[group], f"{loc}.{group}", year_s)
    return out


def _parse_schedule(raw: dict, year_s: float) -> dict:
    loc = "schedule"
    _check_keys(raw, ("total_time", "n_report_steps", "year_days"), loc)
    out = {}
    if "year_days" in raw:
        yd = _as_number(raw["year_days"], f"{loc}.year_days")
        if yd <= 0:
            raise SpecParseError("year_days must be > 0", f"{loc}.year_days")
        out["year_days"] = yd
    if "total_time" in raw:
        out["total_time"] = parse_quantity(raw["total_time"], "time", f"{loc}.total_time", year_s)
    if "n_report_steps" in raw:
        out["n_report_steps"] = _as_int(raw["n_report_steps"], f"{loc}.n_report_steps")
    return out


def _parse_constraints(raw: dict, year_s: float) -> dict:
    loc = "constraints"
    _check_keys(raw, ("injected_pore_volumes", "gravity", "boundaries"), loc)
    out = {}
    if "injected_pore_volumes" in raw:
        out["injected_pore_volumes"] = _as_number(raw["injected_pore_volumes"],
                                                  f"{loc}.injected_pore_volumes")
    if "gravity" in raw:
        g = raw["gravity"]
        if g in ("on", "off"):
            out["gravity"] = g
        else:
            out["gravity"] = _as_number(g, f"{loc}.gravity")
    if "boundaries" in raw:
        if raw["boundaries"] != "closed":
            raise SpecParseError("only 'closed' boundaries are supported", f"{loc}.boundaries")
        out["boundaries"] = "closed"
    return out


def _parse_sampling(raw: dict, year_s: float) -> dict:
    loc = "sampling"
    _check_keys(raw, ("seed", "strategy", "rng_family"), loc)
    out = {}
    if "seed" in raw:
        out["seed"] = _as_int(raw["seed"], f"{loc}.seed")
    if "strategy" in raw:
        if raw["strategy"] not in ("layer_batched", "cell_interleaved"):
            raise SpecParseError(f"unknown strategy {raw['strategy']!r}", f"{loc}.strategy")
        out["strategy"] = raw["strategy"]
    if "rng_family" in raw:
        out["rng_family"] = str(raw["rng_family"])
    return out


def _parse_solver(raw: dict, year_s: float) -> dict:
    loc = "solver"
    fields = ("newton_max_iters", "cnv_tolerance", "mb_tolerance", "initial_dt",
              "min_dt", "max_dt", "cut_factor", "growth_factor",
              "max_cuts_per_step", "ctrl_tolerance", "ds_max")
    _check_keys(raw, fields, loc)
    out = {}
    for k in fields:
        if k not in raw:
            continue
        if k in ("newton_max_iters", "max_cuts_per_step"):
            out[k] = _as_int(raw[k], f"{loc}.{k}")
        elif k in ("initial_dt", "min_dt", "max_dt"):
            out[k] = parse_quantity(raw[k], "time", f"{loc}.{k}", year_s)
        else:
            out[k] = _as_number(raw[k], f"{loc}.{k}")
    return out


_BLOCK_PARSERS = {
    "mesh": _parse_mesh,
    "deformation": _parse_deformation,
    "layers": _parse_layers,
    "fluids": _parse_fluids,
    "initial": _parse_initial,
    "wells": _parse_wells,
    "schedule": _parse_schedule,
    "constraints": _parse_constraints,
    "sampling": _parse_sampling,
    "solver": _parse_solver,
}


def _enforce_level_mask(doc: dict, level: str) -> None:
    if level == "reproduction":
        return
    meta = doc.get("meta", {})
    if "seed" in meta:
        raise LevelMaskError(f"seed not permitted at {level} level", "meta.seed")
    for blocked in ("sampling", "solver"):
        if blocked in doc:
            raise LevelMaskError(f"{blocked} block not permitted at {level} level", blocked)
    if level == "journal":
        deform = doc.get("deformation", {})
        for k in ("undulation_wavelength", "dome_radius", "interface_depths"):
            if k in deform:
                raise LevelMaskError(
                    f"deformation.{k} not permitted at journal level (amplitudes only)",
                    f"deformation.{k}")
        producers = doc.get("wells", {}).get("producers", {})
        if isinstance(producers.get("placement"), list):
            raise LevelMaskError(
                "exact producer coordinates not permitted at journal level",
                "wells.producers.placement")


def parse_spec(document) -> ModelSpec:
    """Parse and unit-normalize a specification document (JSON text or dict).

    Rejects unknown keys and units with their location and enforces the
    abstraction-level mask. A seed may live in meta or sampling; it is
    normalized into the sampling block (a conflict is a contradiction).
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SpecParseError(f"invalid JSON: {exc}", "document") from None
    if not isinstance(document, dict):
        raise SpecParseError("document must be a JSON object", "document")

    _check_keys(document, TOP_LEVEL_KEYS, "document")

    meta = document.get("meta", {})
    _check_keys(meta, ("title", "level", "seed"), "meta")
    level = meta.get("level", "reproduction")
    if level not in LEVELS:
        raise SpecParseError(f"unknown level {level!r}", "meta.level")
    title = str(meta.get("title", ""))

    _enforce_level_mask(document, level)

    year_s = YEAR_365
    sched_raw = document.get("schedule", {})
    if isinstance(sched_raw, dict) and "year_days" in sched_raw:
        year_s = _as_number(sched_raw["year_days"], "schedule.year_days") * DAY

    blocks = {}
    for name, parser in _BLOCK_PARSERS.items():
        if name in document:
            raw = document[name]
            if name != "layers" and not isinstance(raw, dict):
                raise SpecParseError(f"{name} must be an object", name)
            blocks[name] = parser(raw, year_s)

    # normalize meta.seed into sampling.seed
    if "seed" in meta:
        seed = _as_int(meta["seed"], "meta.seed")
        sampling = blocks.get("sampling", {})
        if "seed" in sampling and sampling["seed"] != seed:
            raise ContradictionError(
                f"meta.seed={seed} disagrees with sampling.seed={sampling['seed']}",
                ("meta.seed", "sampling.seed"))
        sampling = dict(sampling)
        sampling["seed"] = seed
        blocks["sampling"] = sampling

    return ModelSpec(title=title, level=level, **blocks)


def spec_to_document(spec: ModelSpec) -> dict:
    """Inverse of parse_spec for SI-normalized specs (no unit strings)."""
    doc: dict = {"meta": {"title": spec.title, "level": spec.level}}
    for name in _BLOCK_PARSERS:
        block = spec.block(name)
        if block is not None:
            doc[name] = block
    return doc
