from .schema import ModelSpec, parse_spec, LEVELS
from .checklist import CANONICAL_CHECKLIST, ChecklistItem, MISSING
from .resolver import (AUTONOMOUS, AssumptionEntry, AssumptionLedger,
                       ClarificationRequest, Interactive, TacitAssumptionReport,
                       assemble_unaudited, defaults_audit, detect_ambiguities,
                       resolve)
from .serialize import ExecutableConfig, canonical_serialize
from .build import SimulationBundle, build_simulation, run_config

__all__ = [
    "ModelSpec", "parse_spec", "LEVELS",
    "CANONICAL_CHECKLIST", "ChecklistItem", "MISSING",
    "AUTONOMOUS", "Interactive", "ClarificationRequest",
    "AssumptionEntry", "AssumptionLedger", "TacitAssumptionReport",
    "detect_ambiguities", "resolve", "defaults_audit", "assemble_unaudited",
    "ExecutableConfig", "canonical_serialize",
    "SimulationBundle", "build_simulation", "run_config",
]
