"""Newton solve with timestep control; run completion is the certificate.

Each implicit step is solved with a damped Newton iteration (saturation
updates clipped per iteration). A step is accepted only when the scaled
per-cell and global mass residuals, the well-control residuals, and the
saturation bounds all hold, so a run that reaches the end of its schedule
has, by construction, satisfied the conservation tolerances on every step.
Failures cut the timestep geometrically; too many consecutive cuts fail
the run and surface full diagnostics.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import MatrixRankWarning, spsolve

from ..errors import (ConvergenceFailure, LinearSolverFailure,
                      NonphysicalStateError, OutOfRangeError, RunFailure)
from ..wells import INJECTOR, Well, Schedule
from .assembly import assemble_system, scaled_norms
from .model import ReservoirModel, SimState, SolverControls

_SAT_BOUND_TOL = 1.0e-8


@dataclass
class StepAttempt:
    t_start: float
    dt: float
    iterations: int
    accepted: bool
    failure_kind: str | None = None     # max_iters | nonphysical | linear_solver | bounds
    detail: str = ""
    norms: dict = field(default_factory=dict)
    residual_trace: list = field(default_factory=list)


@dataclass
class Diagnostics:
    """Solver evidence: every attempted step with its Newton trace, plus
    totals. Accepted attempts carry the converged norms, so the
    conservation record is inspectable after the fact."""

    attempts: list[StepAttempt] = field(default_factory=list)
    total_newton_iterations: int = 0
    total_cuts: int = 0
    wall_time: float = 0.0
    cross_flow_events: list = field(default_factory=list)

    def accepted(self) -> list[StepAttempt]:
        return [a for a in self.attempts if a.accepted]

    def to_dict(self) -> dict:
        return {
            "attempts": [
                {
                    "t_start": a.t_start, "dt": a.dt, "iterations": a.iterations,
                    "accepted": a.accepted, "failure_kind": a.failure_kind,
                    "detail": a.detail, "norms": a.norms,
                    "residual_trace": a.residual_trace,
                }
                for a in self.attempts
            ],
            "total_newton_iterations": self.total_newton_iterations,
            "total_cuts": self.total_cuts,
            "wall_time": self.wall_time,
            "cross_flow_events": [list(e) for e in self.cross_flow_events],
        }


@dataclass
class RunResult:
    """Report-step snapshots, well response series, diagnostics, and the
    completion certificate (true iff the schedule end was reached with all
    step tolerances met)."""

    report_times: list[float]
    report_pressure: list[np.ndarray]
    report_saturation: list[np.ndarray]
    step_times: np.ndarray          # end time of each accepted step
    step_dt: np.ndarray
    step_rates_water: np.ndarray    # (n_steps, n_wells), volumetric at ref density
    step_rates_oil: np.ndarray
    step_bhp: np.ndarray
    well_names: list[str]
    cumulative_injection: np.ndarray  # per accepted step, m^3 at ref density
    avg_pressure: list[float]         # pore-volume-weighted mean at report steps
    diagnostics: Diagnostics
    certificate: bool
    final_state: SimState | None = None

    @property
    def n_steps(self) -> int:
        return len(self.step_times)

    def to_dict(self) -> dict:
        return {
            "report_times": list(self.report_times),
            "report_pressure": [p.tolist() for p in self.report_pressure],
            "report_saturation": [s.tolist() for s in self.report_saturation],
            "step_times": self.step_times.tolist(),
            "step_dt": self.step_dt.tolist(),
            "step_rates_water": self.step_rates_water.tolist(),
            "step_rates_oil": self.step_rates_oil.tolist(),
            "step_bhp": self.step_bhp.tolist(),
            "well_names": list(self.well_names),
            "cumulative_injection": self.cumulative_injection.tolist(),
            "avg_pressure": list(self.avg_pressure),
            "diagnostics": self.diagnostics.to_dict(),
            "certificate": self.certificate,
            "final_state": None if self.final_state is None else {
                "pressure": self.final_state.pressure.tolist(),
                "saturation": self.final_state.saturation.tolist(),
                "bhp": self.final_state.bhp.tolist(),
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunResult":
        diag = Diagnostics(
            attempts=[StepAttempt(**{**a, "norms": a["norms"] or {}})
                      for a in d["diagnostics"]["attempts"]],
            total_newton_iterations=d["diagnostics"]["total_newton_iterations"],
            total_cuts=d["diagnostics"]["total_cuts"],
            wall_time=d["diagnostics"]["wall_time"],
            cross_flow_events=[tuple(e) for e in d["diagnostics"]["cross_flow_events"]],
        )
        fs = d.get("final_state")
        final_state = None if fs is None else SimState(
            np.asarray(fs["pressure"]), np.asarray(fs["saturation"]), np.asarray(fs["bhp"]))
        return cls(
            report_times=list(d["report_times"]),
            report_pressure=[np.asarray(p) for p in d["report_pressure"]],
            report_saturation=[np.asarray(s) for s in d["report_saturation"]],
            step_times=np.asarray(d["step_times"]),
            step_dt=np.asarray(d["step_dt"]),
            step_rates_water=np.asarray(d["step_rates_water"]),
            step_rates_oil=np.asarray(d["step_rates_oil"]),
            step_bhp=np.asarray(d["step_bhp"]),
            well_names=list(d["well_names"]),
            cumulative_injection=np.asarray(d["cumulative_injection"]),
            avg_pressure=list(d["avg_pressure"]),
            diagnostics=diag,
            certificate=d["certificate"],
            final_state=final_state,
        )


def _solve_linear(jac, rhs) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter("error", MatrixRankWarning)
        try:
            delta = spsolve(jac, rhs)
        except (MatrixRankWarning, RuntimeError) as exc:
            raise LinearSolverFailure(str(exc)) from exc
    if not np.all(np.isfinite(delta)):
        raise LinearSolverFailure("non-finite Newton update (singular system)")
    return delta


def newton_solve(model: ReservoirModel, prev_state: SimState, dt: float,
                 wells: list[Well], controls: SolverControls):
    """Solve one implicit step. Returns (state, info, trace) on success;
    raises ConvergenceFailure / LinearSolverFailure / NonphysicalStateError
    (all recoverable by a timestep cut)."""
    nc = model.n_cells
    state = prev_state.copy()
    trace: list[dict] = []

    for it in range(controls.newton_max_iters + 1):
        residual, jac, info = assemble_system(model, state, prev_state, dt, wells)
        norms = scaled_norms(model, residual, dt, wells)
        s_min = float(state.saturation.min()) if nc else 0.0
        s_max = float(state.saturation.max()) if nc else 0.0
        in_bounds = s_min >= -_SAT_BOUND_TOL and s_max <= 1.0 + _SAT_BOUND_TOL
        converged = (
            norms["cnv_water"] <= controls.cnv_tolerance
            and norms["cnv_oil"] <= controls.cnv_tolerance
            and norms["mb_water"] <= controls.mb_tolerance
            and norms["mb_oil"] <= controls.mb_tolerance
            and norms["ctrl"] <= controls.ctrl_tolerance
        )
        trace.append({"iteration": it, **norms, "in_bounds": in_bounds})
        if converged and in_bounds:
            return state, info, trace
        if converged and not in_bounds:
            raise ConvergenceFailure(
                f"saturation out of bounds at converged point [{s_min:.3e}, {s_max:.3e}]",
                trace=trace)
        if it == controls.newton_max_iters:
            raise ConvergenceFailure(
                f"no convergence in {controls.newton_max_iters} iterations "
                f"(cnv_w={norms['cnv_water']:.2e}, cnv_o={norms['cnv_oil']:.2e})",
                trace=trace)

        delta = _solve_linear(jac, -residual)
        ds = np.clip(delta[1:2 * nc:2], -controls.ds_max, controls.ds_max)
        state.pressure += delta[0:2 * nc:2]
        state.saturation += ds
        state.bhp += delta[2 * nc:]


def initialize_bhp(model: ReservoirModel, state: SimState, wells: list[Well]) -> SimState:
    """Seed bottom-hole pressures: BHP targets exactly, rate wells offset
    from their reference cell pressure in the flow direction."""
    out = state.copy()
    if out.bhp.shape[0] != len(wells):
        out.bhp = np.zeros(len(wells))
    for w_idx, well in enumerate(wells):
        if well.control.kind == "bhp":
            out.bhp[w_idx] = well.control.value
        else:
            ref_cell = well.cells[0]
            offset = 1.0e5 if well.kind == INJECTOR else -1.0e5
            out.bhp[w_idx] = out.pressure[ref_cell] + offset
    return out


def simulate(model: ReservoirModel, initial: SimState, schedule: Schedule,
             wells: list[Well], controls: SolverControls,
             on_step=None) -> RunResult:
    """Advance the model over the schedule with timestep control.

    on_step, when given, is called with a small dict after every attempted
    step and at every report boundary (live-diagnostics hook). Raises
    RunFailure when the controller exhausts its cut budget; the failure
    carries the Diagnostics collected so far.
    """
    t_wall = time.perf_counter()
    diagnostics = Diagnostics()
    state = initialize_bhp(model, initial, wells)
    pv_weights = model.pore_volumes
    pv_total = pv_weights.sum()

    boundaries = list(schedule.report_times)
    report_times: list[float] = []
    report_p: list[np.ndarray] = []
    report_s: list[np.ndarray] = []
    avg_pressure: list[float] = []

    step_times: list[float] = []
    step_dt: list[float] = []
    rates_w: list[np.ndarray] = []
    rates_o: list[np.ndarray] = []
    bhps: list[np.ndarray] = []
    cumulative: list[float] = []
    injected_terms: list[float] = []

    injector_idx = [i for i, w in enumerate(wells) if w.kind == INJECTOR]

    def emit(payload: dict):
        if on_step is not None:
            on_step(payload)

    t = 0.0
    dt_nominal = controls.initial_dt  # un-clipped controller timestep
    consecutive_cuts = 0
    b_idx = 0

    while b_idx < len(boundaries):
        target = boundaries[b_idx]
        remainder = target - t
        dt_try = min(dt_nominal, remainder)
        attempt = StepAttempt(t_start=t, dt=dt_try, iterations=0, accepted=False)
        try:
            new_state, info, trace = newton_solve(model, state, dt_try, wells, controls)
            attempt.iterations = trace[-1]["iteration"]
            attempt.accepted = True
            attempt.norms = {k: v for k, v in trace[-1].items() if k != "iteration"}
            attempt.residual_trace = trace
        except (ConvergenceFailure, LinearSolverFailure, NonphysicalStateError) as exc:
            if isinstance(exc, ConvergenceFailure):
                kind = "max_iters"
            elif isinstance(exc, LinearSolverFailure):
                kind = "linear_solver"
            else:
                kind = "nonphysical"
            attempt.failure_kind = kind
            attempt.detail = str(exc)
            attempt.residual_trace = getattr(exc, "trace", [])
            attempt.iterations = len(attempt.residual_trace)
            diagnostics.attempts.append(attempt)
            diagnostics.total_newton_iterations += attempt.iterations
            diagnostics.total_cuts += 1
            consecutive_cuts += 1
            emit({"kind": "step", "t": t, "dt": dt_try, "accepted": False,
                  "failure": kind, "cuts": consecutive_cuts})
            next_dt = dt_try * controls.cut_factor
            if consecutive_cuts > controls.max_cuts_per_step or next_dt < controls.min_dt:
                diagnostics.wall_time = time.perf_counter() - t_wall
                raise RunFailure(
                    f"step at t={t:.6g}s failed after {consecutive_cuts} cut(s): {exc}",
                    diagnostics=diagnostics, step_index=len(step_times), cause=exc,
                ) from exc
            dt_nominal = next_dt
            continue

        # accepted
        diagnostics.attempts.append(attempt)
        diagnostics.total_newton_iterations += attempt.iterations
        if info["cross_flow"]:
            diagnostics.cross_flow_events.append((t, info["cross_flow"]))
        consecutive_cuts = 0
        state = new_state
        # dt_try == remainder means the step lands exactly on the boundary
        t = target if dt_try == remainder else t + dt_try
        step_times.append(t)
        step_dt.append(dt_try)
        rates_w.append(info["vol_rates_water"].copy())
        rates_o.append(info["vol_rates_oil"].copy())
        bhps.append(info["bhp"].copy())
        injected = sum(info["vol_rates_water"][i] for i in injector_idx) * dt_try
        injected_terms.append(injected)
        cumulative.append(math.fsum(injected_terms))
        emit({"kind": "step", "t": t, "dt": dt_try, "accepted": True,
              "iterations": attempt.iterations,
              "mb_water": attempt.norms.get("mb_water"),
              "mb_oil": attempt.norms.get("mb_oil"),
              "cumulative_injection": cumulative[-1]})

        if t == target:
            report_times.append(target)
            report_p.append(state.pressure.copy())
            report_s.append(state.saturation.copy())
            avg_pressure.append(float(np.dot(pv_weights, state.pressure) / pv_total))
            emit({"kind": "report", "t": target, "index": b_idx})
            b_idx += 1

        # grow the nominal step, not the boundary-clipped one, so report
        # boundaries do not restart the ramp
        dt_nominal = min(max(dt_nominal, dt_try) * controls.growth_factor,
                         controls.max_dt)

    diagnostics.wall_time = time.perf_counter() - t_wall
    return RunResult(
        report_times=report_times,
        report_pressure=report_p,
        report_saturation=report_s,
        step_times=np.asarray(step_times),
        step_dt=np.asarray(step_dt),
        step_rates_water=np.asarray(rates_w),
        step_rates_oil=np.asarray(rates_o),
        step_bhp=np.asarray(bhps),
        well_names=[w.name for w in wells],
        cumulative_injection=np.asarray(cumulative),
        avg_pressure=avg_pressure,
        diagnostics=diagnostics,
        certificate=True,
        final_state=state,
    )


def pvi_series(result: RunResult, pore_volume: float,
               fractions: list[float] | None = None):
    """Map the run onto pore-volumes-injected time: PVI(t) over accepted
    steps plus, when ``fractions`` are requested, the nearest report-step
    snapshot and linearly interpolated scalars at each fraction."""
    if pore_volume <= 0:
        raise OutOfRangeError("pore volume must be > 0")
    pvi_steps = result.cumulative_injection / pore_volume
    times = result.step_times
    out = {
        "times": times,
        "pvi": pvi_steps,
        "final_pvi": float(pvi_steps[-1]) if len(pvi_steps) else 0.0,
    }
    if fractions is None:
        return out

    report_pvi = np.interp(np.asarray(result.report_times), times, pvi_steps)
    out["report_pvi"] = report_pvi
    snapshots = []
    for f in fractions:
        if f < 0 or f > out["final_pvi"] * (1 + 1e-9):
            raise OutOfRangeError(
                f"requested fraction {f} beyond achieved PVI {out['final_pvi']:.6g}")
        t_at = float(np.interp(f, pvi_steps, times))
        idx = int(np.argmin(np.abs(report_pvi - f)))
        snapshots.append({
            "fraction": f,
            "time": t_at,
            "report_index": idx,
            "report_time": result.report_times[idx],
            "pressure": result.report_pressure[idx],
            "saturation": result.report_saturation[idx],
            "avg_pressure": float(np.interp(f, report_pvi, np.asarray(result.avg_pressure))),
        })
    out["snapshots"] = snapshots
    return out


def breakthrough_pvi(result: RunResult, pore_volume: float, well_name: str,
                     water_cut_threshold: float = 0.01) -> float:
    """PVI at which the named producer's water cut first crosses the
    threshold (linear interpolation between accepted steps)."""
    w = result.well_names.index(well_name)
    q_w = -result.step_rates_water[:, w]
    q_o = -result.step_rates_oil[:, w]
    total = q_w + q_o
    with np.errstate(invalid="ignore", divide="ignore"):
        cut = np.where(total > 0, q_w / total, 0.0)
    pvi = result.cumulative_injection / pore_volume
    above = np.nonzero(cut >= water_cut_threshold)[0]
    if len(above) == 0:
        raise OutOfRangeError(f"no breakthrough at {well_name} within the run")
    k = above[0]
    if k == 0:
        return float(pvi[0])
    # interpolate in PVI between the bracketing steps
    c0, c1 = cut[k - 1], cut[k]
    f = (water_cut_threshold - c0) / (c1 - c0) if c1 != c0 else 1.0
    return float(pvi[k - 1] + f * (pvi[k] - pvi[k - 1]))
