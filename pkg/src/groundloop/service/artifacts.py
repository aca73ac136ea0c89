"""Run-directory export and reload.

A run directory is the documented on-disk interface between the simulator
and the diff/UI tooling:

    manifest.json       run manifest (hashes, certificate, totals)
    config.json         canonical configuration document
    ledger.json         assumption ledger records
    summary.json        model summary (volumes, field stats, wells)
    result.json         full run result
    grid.txt            versioned grid dump
    results/fields.txt  columnar: cell permeability porosity
    results/wells.txt   columnar: time well rate_water rate_oil bhp
    results/steps/NNNN.txt  columnar per report step: cell pressure saturation
"""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import GroundLoopError, StoreError
from ..hashing import canonical_json, hash_bytes
from ..meshing import export_grid_text
from ..modelspec.build import SimulationBundle, run_manifest
from ..modelspec.resolver import AssumptionLedger, resolve
from ..modelspec.schema import parse_spec
from ..reconstruction.diffing import RunBundle
from ..sim import RunResult


def _atomic_write(path: Path, data: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(data, encoding="utf-8")
    tmp.replace(path)


def save_run_dir(path, sim: SimulationBundle, ledger: AssumptionLedger) -> dict:
    """Write the full run directory; returns the manifest."""
    if sim.result is None:
        raise GroundLoopError("cannot export a bundle that has not been simulated")
    path = Path(path)
    (path / "results" / "steps").mkdir(parents=True, exist_ok=True)

    config_text = canonical_json(sim.config.to_document())
    _atomic_write(path / "config.json", config_text)
    _atomic_write(path / "ledger.json", canonical_json({
        "config_hash": ledger.config_hash, "entries": ledger.to_records()}))
    _atomic_write(path / "summary.json", canonical_json(sim.model_summary()))
    _atomic_write(path / "result.json", canonical_json(sim.result.to_dict()))
    _atomic_write(path / "grid.txt", export_grid_text(sim.mesh))

    lines = ["# cell permeability_m2 porosity"]
    for c, (k, p) in enumerate(zip(sim.permeability.values, sim.porosity.values)):
        lines.append(f"{c} {k!r} {p!r}")
    _atomic_write(path / "results" / "fields.txt", "\n".join(lines) + "\n")

    res = sim.result
    lines = ["# time_s well rate_water_m3s rate_oil_m3s bhp_pa"]
    for n, t in enumerate(res.step_times):
        for w, name in enumerate(res.well_names):
            lines.append(f"{t!r} {name} {res.step_rates_water[n, w]!r} "
                         f"{res.step_rates_oil[n, w]!r} {res.step_bhp[n, w]!r}")
    _atomic_write(path / "results" / "wells.txt", "\n".join(lines) + "\n")

    for k, (p_arr, s_arr) in enumerate(zip(res.report_pressure, res.report_saturation)):
        lines = [f"# report step {k} at t={res.report_times[k]!r}", "# cell pressure_pa s_w"]
        lines.extend(f"{c} {p!r} {s!r}" for c, (p, s) in enumerate(zip(p_arr.tolist(),
                                                                       s_arr.tolist())))
        _atomic_write(path / "results" / "steps" / f"{k:04d}.txt", "\n".join(lines) + "\n")

    manifest = run_manifest(sim)
    manifest["content_hashes"] = {
        "config": hash_bytes(config_text.encode()),
        "fields": hash_bytes((path / "results" / "fields.txt").read_bytes()),
        "wells": hash_bytes((path / "results" / "wells.txt").read_bytes()),
    }
    _atomic_write(path / "manifest.json", canonical_json(manifest))
    return manifest


def load_run_bundle(path) -> RunBundle:
    """Reload a run directory into a diff-ready bundle; verifies the
    configuration hash recorded in the manifest."""
    path = Path(path)
    try:
        manifest = json.loads((path / "manifest.json").read_text())
        config_doc = (path / "config.json").read_text()
        ledger_doc = json.loads((path / "ledger.json").read_text())
        summary = json.loads((path / "summary.json").read_text())
        result = json.loads((path / "result.json").read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise StoreError(f"unreadable run directory {path}: {exc}") from exc

    config, _ = resolve(parse_spec(config_doc))
    if config.content_hash != manifest["config_hash"]:
        raise StoreError(
            f"config hash mismatch in {path}: manifest {manifest['config_hash'][:12]}..., "
            f"recomputed {config.content_hash[:12]}...")
    ledger = AssumptionLedger.from_records(ledger_doc["entries"],
                                           ledger_doc["config_hash"])
    return RunBundle(
        config=config, ledger=ledger, result=RunResult.from_dict(result),
        summary=summary, pore_volume=summary["pore_volume"],
    )
