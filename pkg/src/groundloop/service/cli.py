"""Command-line entry points for every workflow.

Exit codes: 0 success, 1 domain error (machine-readable JSON on stderr),
2 usage error (argparse). Outputs that are artifacts go to files; summaries
print as JSON on stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from ..errors import GroundLoopError
from ..hashing import canonical_json
from ..modelspec.build import run_config
from ..modelspec.resolver import (AUTONOMOUS, AssumptionLedger, Interactive,
                                  ClarificationRequest, defaults_audit, resolve)
from ..modelspec.schema import parse_spec, spec_to_document
from ..modelspec.serialize import ExecutableConfig, canonical_serialize
from ..orchestration.retrieval import build_default_index, keyword_search
from ..orchestration.events import read_event_log
from ..orchestration.session import replay as replay_session
from ..reconstruction.diffing import diff_bundles
from ..reconstruction.masks import (JOURNAL_MASK, REPORT_MASK,
                                    REPRODUCTION_MASK, degrade, reconstruct)
from ..reconstruction.matrix import audit_matrix, matrix_to_csv
from .artifacts import load_run_bundle, save_run_dir

_MASKS = {"reproduction": REPRODUCTION_MASK, "report": REPORT_MASK,
          "journal": JOURNAL_MASK}


def _read_json(path: str):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _resolve_from_file(path: str):
    spec = parse_spec(_read_json(path))
    return resolve(spec, AUTONOMOUS)


def cmd_resolve(args) -> int:
    spec = parse_spec(_read_json(args.spec))
    if args.policy == "interactive" and args.answers:
        policy = Interactive(_read_json(args.answers))
    elif args.policy == "interactive":
        policy = Interactive(None)
    else:
        policy = AUTONOMOUS
    out = resolve(spec, policy)
    if isinstance(out, ClarificationRequest):
        print(canonical_json({"clarification": list(out.items)}))
        return 0
    config, ledger = out
    base = Path(args.out or ".")
    text, digest = canonical_serialize(config)
    _write(base / (args.prefix + "config.json"), text)
    _write(base / (args.prefix + "ledger.json"), canonical_json(
        {"config_hash": ledger.config_hash, "entries": ledger.to_records()}))
    print(canonical_json({"config_hash": digest,
                          "entries": len(ledger.entries),
                          "agent_defaults": [e.key for e in ledger.entries
                                             if e.provenance == "agent_default"]}))
    return 0


def _load_config(path: str) -> ExecutableConfig:
    config, _ = resolve(parse_spec(_read_json(path)), AUTONOMOUS)
    return config


def cmd_simulate(args) -> int:
    config, ledger = _resolve_from_file(args.config)
    if args.ledger:
        raw = _read_json(args.ledger)
        ledger = AssumptionLedger.from_records(raw["entries"], raw["config_hash"])
    bundle = run_config(config)
    manifest = save_run_dir(args.out, bundle, ledger)
    print(canonical_json({"certificate": manifest["certificate"],
                          "final_pvi": manifest["final_pvi"],
                          "out": str(args.out)}))
    return 0


def cmd_audit(args) -> int:
    config = _load_config(args.config)
    raw = _read_json(args.ledger)
    ledger = AssumptionLedger.from_records(raw["entries"], raw["config_hash"])
    report = defaults_audit(config, ledger)
    print(canonical_json({"config_hash": report.config_hash,
                          "tacit_keys": report.keys(),
                          "empty": report.empty}))
    return 0


def cmd_degrade(args) -> int:
    spec = parse_spec(_read_json(args.spec))
    degraded = degrade(spec, _MASKS[args.level])
    text = canonical_json(spec_to_document(degraded))
    if args.out:
        _write(Path(args.out), text)
        print(canonical_json({"out": args.out, "level": args.level}))
    else:
        print(text)
    return 0


def cmd_reconstruct(args) -> int:
    spec = parse_spec(_read_json(args.spec))
    degraded = degrade(spec, _MASKS[args.level])
    config, ledger = reconstruct(degraded)
    base = Path(args.out or ".")
    text, digest = canonical_serialize(config)
    _write(base / "config.json", text)
    _write(base / "ledger.json", canonical_json(
        {"config_hash": ledger.config_hash, "entries": ledger.to_records()}))
    print(canonical_json({"config_hash": digest, "level": args.level,
                          "agent_defaults": [e.key for e in ledger.entries
                                             if e.provenance == "agent_default"]}))
    return 0


def cmd_diff(args) -> int:
    ref = load_run_bundle(args.ref)
    cand = load_run_bundle(args.cand)
    report = diff_bundles(ref, cand, tuple(args.pvi_fractions))
    text = canonical_json(report.to_dict())
    if args.out:
        _write(Path(args.out), text)
    print(canonical_json({"differing_keys": report.differing_keys,
                          "all_equal": report.all_equal}))
    return 0


def cmd_matrix(args) -> int:
    spec = parse_spec(_read_json(args.spec))
    result = audit_matrix(spec)
    csv_text = matrix_to_csv(result["rows"])
    base = Path(args.out or ".")
    _write(base / "matrix.csv", csv_text)
    _write(base / "matrix.json", canonical_json(
        {"rows": result["rows"],
         "reports": {lvl: rep.to_dict() for lvl, rep in result["reports"].items()}}))
    print(csv_text, end="")
    return 0


def cmd_search(args) -> int:
    index = build_default_index()
    results = keyword_search(index, args.query, k=args.k)
    print(canonical_json({"results": results}))
    return 0


def cmd_replay(args) -> int:
    events = read_event_log(Path(args.log).read_text(encoding="utf-8"))
    state, session = replay_session(events)
    print(canonical_json({
        "phase": state.phase,
        "config_hash": state.config.content_hash if state.config else None,
        "certificate": state.certificate,
    }))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app
    from .store import SessionStore

    store = SessionStore(args.store or os.environ.get("GROUNDLOOP_STORE", "./sessions"))
    planner_url = args.planner_url or os.environ.get("GROUNDLOOP_PLANNER_URL")
    ui_dir = args.ui or os.environ.get("GROUNDLOOP_UI")
    app = create_app(store, planner_url=planner_url, ui_dir=ui_dir)
    bind = args.bind or os.environ.get("GROUNDLOOP_BIND", "127.0.0.1")
    uvicorn.run(app, host=bind, port=args.port,
                log_level=os.environ.get("GROUNDLOOP_LOG_LEVEL", "info"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="groundloop",
                                     description="execution-grounded simulation workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("resolve", help="resolve a specification into config + ledger")
    p.add_argument("spec")
    p.add_argument("--policy", choices=("autonomous", "interactive"), default="autonomous")
    p.add_argument("--answers", help="JSON file with clarification answers")
    p.add_argument("--out", help="output directory (default .)")
    p.add_argument("--prefix", default="", help="output filename prefix")
    p.set_defaults(fn=cmd_resolve)

    p = sub.add_parser("simulate", help="run a configuration and export the run directory")
    p.add_argument("config")
    p.add_argument("--ledger", help="ledger JSON to include in the export")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("audit", help="tacit-defaults audit of a config against its ledger")
    p.add_argument("config")
    p.add_argument("ledger")
    p.set_defaults(fn=cmd_audit)

    p = sub.add_parser("degrade", help="strip a spec to an abstraction level")
    p.add_argument("spec")
    p.add_argument("--level", choices=("reproduction", "report", "journal"), required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_degrade)

    p = sub.add_parser("reconstruct", help="degrade then autonomously re-resolve a spec")
    p.add_argument("spec")
    p.add_argument("--level", choices=("reproduction", "report", "journal"), required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_reconstruct)

    p = sub.add_parser("diff", help="divergence report between two run directories")
    p.add_argument("ref")
    p.add_argument("cand")
    p.add_argument("--pvi-fractions", type=float, nargs="*", default=[0.25, 0.5, 0.75])
    p.add_argument("--out")
    p.set_defaults(fn=cmd_diff)

    p = sub.add_parser("matrix", help="degrade/reconstruct/diff across all levels")
    p.add_argument("spec")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_matrix)

    p = sub.add_parser("search", help="keyword search over the bundled corpus")
    p.add_argument("query")
    p.add_argument("-k", type=int, default=10)
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("replay", help="re-execute a session event log")
    p.add_argument("log")
    p.set_defaults(fn=cmd_replay)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--bind")
    p.add_argument("--store")
    p.add_argument("--planner-url")
    p.add_argument("--ui", help="directory with the built browser client")
    p.set_defaults(fn=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except GroundLoopError as exc:
        sys.stderr.write(canonical_json({
            "code": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    except OSError as exc:
        sys.stderr.write(canonical_json({"code": "io_error", "message": str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
