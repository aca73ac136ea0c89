from .model import ReservoirModel, SimState, SolverControls, build_reservoir_model
from .assembly import assemble_system
from .driver import Diagnostics, RunResult, newton_solve, simulate, pvi_series, breakthrough_pvi

__all__ = [
    "ReservoirModel", "SimState", "SolverControls", "build_reservoir_model",
    "assemble_system", "Diagnostics", "RunResult", "newton_solve", "simulate",
    "pvi_series", "breakthrough_pvi",
]
