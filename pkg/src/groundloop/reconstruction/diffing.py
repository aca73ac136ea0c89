"""Structured divergence reports between certified runs.

Compares two (configuration, ledger, run) bundles along five axes: the
checklist values themselves (with attribution to the candidate ledger
entry that set each differing value), geometry, sampled fields, wells, and
responses on a common pore-volumes-injected axis. Runs without
certificates are refused: numbers from an uncompleted run carry no
physical warranty, so their differences mean nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import GroundLoopError
from ..modelspec.build import SimulationBundle
from ..modelspec.checklist import CHECKLIST_KEYS
from ..modelspec.resolver import AssumptionLedger
from ..modelspec.serialize import ExecutableConfig
from ..sim import RunResult, pvi_series

# default "differs" thresholds
SCALAR_RTOL = 1.0e-9        # configuration scalars
FIELD_STAT_TOL = 0.01       # relative, per-unit field statistics
RATE_L1_TOL = 0.02          # relative L1 on PVI-aligned rate curves


@dataclass
class RunBundle:
    config: ExecutableConfig
    ledger: AssumptionLedger
    result: RunResult
    summary: dict
    pore_volume: float

    @classmethod
    def from_simulation(cls, sim: SimulationBundle, ledger: AssumptionLedger) -> "RunBundle":
        if sim.result is None:
            raise GroundLoopError("bundle has no run result")
        return cls(config=sim.config, ledger=ledger, result=sim.result,
                   summary=sim.model_summary(), pore_volume=sim.pore_volume)


@dataclass
class DiffReport:
    closures: dict = field(default_factory=dict)
    geometry: dict = field(default_factory=dict)
    fields: dict = field(default_factory=dict)
    wells: dict = field(default_factory=dict)
    responses: dict = field(default_factory=dict)

    @property
    def differing_keys(self) -> list[str]:
        return [k for k, v in self.closures.items() if v["status"] != "equal"]

    @property
    def all_equal(self) -> bool:
        return (not self.differing_keys
                and self.geometry.get("pore_volume_delta_rel", 0.0) == 0.0
                and self.fields.get("hash_equal", {}).get("permeability", True)
                and self.fields.get("hash_equal", {}).get("porosity", True))

    def to_dict(self) -> dict:
        return {"closures": self.closures, "geometry": self.geometry,
                "fields": self.fields, "wells": self.wells,
                "responses": self.responses,
                "differing_keys": self.differing_keys,
                "all_equal": self.all_equal}


def _values_equal(a, b, rtol=SCALAR_RTOL) -> bool:
    if isinstance(a, dict) and isinstance(b, dict):
        return set(a) == set(b) and all(_values_equal(a[k], b[k], rtol) for k in a)
    if isinstance(a, (list, tuple)) and isinstance(b, (list, tuple)):
        return len(a) == len(b) and all(_values_equal(x, y, rtol) for x, y in zip(a, b))
    if isinstance(a, bool) or isinstance(b, bool):
        return a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return math.isclose(a, b, rel_tol=rtol, abs_tol=0.0) or a == b
    return a == b


def _closure_diffs(ref: RunBundle, cand: RunBundle) -> dict:
    out = {}
    keys = [k for k in CHECKLIST_KEYS
            if k in ref.config.values or k in cand.config.values]
    for key in keys:
        in_ref = key in ref.config.values
        in_cand = key in cand.config.values
        if not (in_ref and in_cand):
            out[key] = {"status": f"present_only_in_{'reference' if in_ref else 'candidate'}",
                        "reference": ref.config.values.get(key),
                        "candidate": cand.config.values.get(key)}
            continue
        rv, cv = ref.config.values[key], cand.config.values[key]
        if _values_equal(rv, cv):
            out[key] = {"status": "equal"}
        else:
            entry = cand.ledger.by_key(key)
            attribution = None
            if entry is not None and _values_equal(entry.value, cv):
                attribution = {"provenance": entry.provenance,
                               "rationale": entry.rationale,
                               "event_id": entry.event_id}
            out[key] = {"status": "differs", "reference": rv, "candidate": cv,
                        "attribution": attribution}
    return out


def _geometry_diffs(ref: RunBundle, cand: RunBundle) -> dict:
    pv_r, pv_c = ref.pore_volume, cand.pore_volume
    bv_r, bv_c = ref.summary["bulk_volume"], cand.summary["bulk_volume"]
    out = {
        "pore_volume_delta_rel": abs(pv_c - pv_r) / pv_r,
        "bulk_volume_delta_rel": abs(bv_c - bv_r) / bv_r,
        "node_displacement": None,
    }
    nd_r = np.asarray(ref.summary["node_depths"])
    nd_c = np.asarray(cand.summary["node_depths"])
    if nd_r.shape == nd_c.shape:
        delta = np.abs(nd_c - nd_r)
        out["node_displacement"] = {"max": float(delta.max()),
                                    "mean": float(delta.mean())}
    return out


def _field_diffs(ref: RunBundle, cand: RunBundle) -> dict:
    out = {"hash_equal": {}, "unit_stats_delta_rel": {}, "stats_within_tol": True}
    for name in ("permeability", "porosity"):
        out["hash_equal"][name] = (ref.summary["field_hashes"][name]
                                   == cand.summary["field_hashes"][name])
        r_stats = ref.summary["unit_stats"][name]
        c_stats = cand.summary["unit_stats"][name]
        deltas = []
        if len(r_stats) == len(c_stats):
            for (rm, rs), (cm, cs) in zip(r_stats, c_stats):
                dm = abs(cm - rm) / abs(rm) if rm else 0.0
                ds = abs(cs - rs) / abs(rs) if rs else 0.0
                deltas.append({"mean": dm, "std": ds})
                if dm > FIELD_STAT_TOL or ds > FIELD_STAT_TOL:
                    out["stats_within_tol"] = False
        else:
            out["stats_within_tol"] = False
        out["unit_stats_delta_rel"][name] = deltas
    return out


def _well_diffs(ref: RunBundle, cand: RunBundle) -> dict:
    out = {"placement_distance_m": {}, "control_delta": {}, "missing": []}
    # lateral spacing comes from the configs (deformations are vertical)
    rdims, rmesh = ref.summary["dims"], ref.config.values["mesh_dims"]
    dx_r, dy_r = rmesh["lx"] / rdims[0], rmesh["ly"] / rdims[1]
    cmesh = cand.config.values["mesh_dims"]
    cdims = cand.summary["dims"]
    dx_c, dy_c = cmesh["lx"] / cdims[0], cmesh["ly"] / cdims[1]
    for name, rw in ref.summary["wells"].items():
        cw = cand.summary["wells"].get(name)
        if cw is None:
            out["missing"].append(name)
            continue
        x_r, y_r = (rw["i"] + 0.5) * dx_r, (rw["j"] + 0.5) * dy_r
        x_c, y_c = (cw["i"] + 0.5) * dx_c, (cw["j"] + 0.5) * dy_c
        out["placement_distance_m"][name] = math.hypot(x_c - x_r, y_c - y_r)
        rv, cv = rw["control"], cw["control"]
        if rv["kind"] != cv["kind"]:
            out["control_delta"][name] = {"reference": rv, "candidate": cv}
        else:
            denom = abs(rv["value"]) or 1.0
            delta = abs(cv["value"] - rv["value"]) / denom
            if delta > SCALAR_RTOL:
                out["control_delta"][name] = {"reference": rv, "candidate": cv,
                                              "delta_rel": delta}
    return out


def _production_curves(bundle: RunBundle):
    res = bundle.result
    producers = [i for i, w in enumerate(res.well_names) if w.startswith("P")]
    pvi = res.cumulative_injection / bundle.pore_volume
    q_w = -res.step_rates_water[:, producers].sum(axis=1)
    q_liq = q_w - res.step_rates_oil[:, producers].sum(axis=1)
    return pvi, q_w, q_liq


def _response_diffs(ref: RunBundle, cand: RunBundle, pvi_fractions) -> dict:
    pvi_r, qw_r, ql_r = _production_curves(ref)
    pvi_c, qw_c, ql_c = _production_curves(cand)
    common = min(pvi_r[-1], pvi_c[-1])
    grid = np.linspace(common / 200.0, common, 200)

    def l1_linf(a_x, a_y, b_x, b_y):
        a = np.interp(grid, a_x, a_y)
        b = np.interp(grid, b_x, b_y)
        scale_l1 = np.abs(a).sum()
        scale_inf = np.abs(a).max()
        return (float(np.abs(a - b).sum() / scale_l1) if scale_l1 else 0.0,
                float(np.abs(a - b).max() / scale_inf) if scale_inf else 0.0)

    water_l1, water_linf = l1_linf(pvi_r, qw_r, pvi_c, qw_c)
    liq_l1, liq_linf = l1_linf(pvi_r, ql_r, pvi_c, ql_c)

    # average-pressure trajectories on report-step PVI, compared only over
    # the range both runs actually resolved (no left extrapolation)
    rp_r = pvi_series(ref.result, ref.pore_volume)
    rp_c = pvi_series(cand.result, cand.pore_volume)
    rep_pvi_r = np.interp(np.asarray(ref.result.report_times), rp_r["times"], rp_r["pvi"])
    rep_pvi_c = np.interp(np.asarray(cand.result.report_times), rp_c["times"], rp_c["pvi"])
    p_lo = max(rep_pvi_r[0], rep_pvi_c[0])
    p_grid = np.linspace(p_lo, common, 200)
    p_r = np.interp(p_grid, rep_pvi_r, np.asarray(ref.result.avg_pressure))
    p_c = np.interp(p_grid, rep_pvi_c, np.asarray(cand.result.avg_pressure))
    avg_p_l1 = float(np.abs(p_r - p_c).sum() / np.abs(p_r).sum())
    avg_p_max = float(np.abs(p_r - p_c).max() / np.abs(p_r).max())

    sat_l1 = {}
    same_cells = ref.summary["cell_count"] == cand.summary["cell_count"]
    if pvi_fractions:
        fractions = [f for f in pvi_fractions if f <= common * (1 + 1e-9)]
        if fractions and same_cells:
            snaps_r = pvi_series(ref.result, ref.pore_volume, fractions)["snapshots"]
            snaps_c = pvi_series(cand.result, cand.pore_volume, fractions)["snapshots"]
            weights = np.asarray(ref.summary["cell_pore_volumes"])
            for sr, sc in zip(snaps_r, snaps_c):
                ds = np.abs(np.asarray(sr["saturation"]) - np.asarray(sc["saturation"]))
                sat_l1[str(sr["fraction"])] = float(np.dot(weights, ds) / weights.sum())
        elif fractions:
            sat_l1 = {str(f): None for f in fractions}

    return {
        "rate_water_l1_rel": water_l1, "rate_water_linf_rel": water_linf,
        "rate_liquid_l1_rel": liq_l1, "rate_liquid_linf_rel": liq_linf,
        "avg_pressure_l1_rel": avg_p_l1, "avg_pressure_max_rel": avg_p_max,
        "saturation_l1": sat_l1,
        "compared_up_to_pvi": float(common),
        "rates_within_tol": water_l1 <= RATE_L1_TOL and liq_l1 <= RATE_L1_TOL,
    }


def diff_bundles(ref: RunBundle, cand: RunBundle,
                 pvi_fractions=(0.25, 0.5, 0.75)) -> DiffReport:
    """Full divergence report between two certified runs; refuses runs
    without certificates."""
    for name, bundle in (("reference", ref), ("candidate", cand)):
        if not bundle.result.certificate:
            raise GroundLoopError(
                f"{name} run has no validity certificate; diffs of failed runs "
                "are not meaningful")
    return DiffReport(
        closures=_closure_diffs(ref, cand),
        geometry=_geometry_diffs(ref, cand),
        fields=_field_diffs(ref, cand),
        wells=_well_diffs(ref, cand),
        responses=_response_diffs(ref, cand, list(pvi_fractions)),
    )
