"""Fully implicit residual and Jacobian assembly.

Per cell c and phase a, the mass-balance residual over a step of length dt:

    R_{a,c} = [ (phi V rho_a S_a)_c^{n+1} - (phi V rho_a S_a)_c^n ] / dt
              + sum_faces F_{a,f} - Q_{a,c}

with the two-point flux F_{a,f} = T_f * lam_a(up) * rho_a(up) * dPhi_a and
phase potential difference dPhi_a = dp - rhobar_a * g * ddepth (depth
positive downward, rhobar the arithmetic face mean). Mobility and density
are upwinded by the sign of dPhi_a, with the upwind direction frozen per
evaluation, which is also what the Jacobian differentiates.

Wells contribute connection mass rates Q and one control equation each:
rate targets fix the total volumetric rate at reference density; BHP
targets pin the wellbore pressure. Producer connections take mobility and
density from the host cell; injector connections use the injected phase's
endpoint mobility and wellbore density.

Unknown ordering: [p_0, s_0, p_1, s_1, ..., bhp_0, ...]; equations follow
the same layout (water balance, oil balance per cell, then controls).
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import coo_matrix

from ..errors import InvalidWellError
from ..fluids import (NON_WETTING, WETTING, density, density_deriv, relperm,
                      relperm_deriv)
from ..wells import BHP_TARGET, INJECTOR, RATE_TARGET, Well
from .model import ReservoirModel, SimState


def connection_pressures(model: ReservoirModel, well: Well, bhp: float) -> np.ndarray:
    """Wellbore pressure at each connection: BHP plus a hydrostatic column
    using the well's primary-phase reference density (single-node bore)."""
    closure = model.fluids.density
    rho_ref = closure.rho_ref_w if well.kind == INJECTOR else closure.rho_ref_n
    depths = np.asarray(well.conn_depth)
    return bhp + rho_ref * model.gravity * (depths - well.ref_depth)


def _accumulation(model: ReservoirModel, state: SimState):
    """Phase masses per cell and their derivatives w.r.t. (p, s)."""
    pv = model.pore_volumes
    closure = model.fluids.density
    rho_w = density(closure, WETTING, state.pressure)
    rho_n = density(closure, NON_WETTING, state.pressure)
    s = state.saturation
    mass_w = pv * rho_w * s
    mass_n = pv * rho_n * (1.0 - s)
    return mass_w, mass_n, rho_w, rho_n


def assemble_system(model: ReservoirModel, state: SimState, prev_state: SimState,
                    dt: float, wells: list[Well]):
    """Residual vector, sparse Jacobian (CSC), and an info dict with
    per-well volumetric rates and cross-flow flags for the current state."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    nc = model.n_cells
    nw = len(wells)
    nvar = 2 * nc + nw
    fluids = model.fluids
    closure = fluids.density
    g = model.gravity

    p = state.pressure
    s = state.saturation

    rho_w = density(closure, WETTING, p)
    rho_n = density(closure, NON_WETTING, p)
    drho_w = density_deriv(closure, WETTING)
    drho_n = density_deriv(closure, NON_WETTING)
    kr_w, kr_n = relperm(fluids.relperm, s)
    dkr_w, dkr_n = relperm_deriv(fluids.relperm, s)
    lam_w, dlam_w = kr_w / fluids.mu_w, dkr_w / fluids.mu_w
    lam_n, dlam_n = kr_n / fluids.mu_n, dkr_n / fluids.mu_n

    residual = np.zeros(nvar)
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []

    def add(r, c, v):
        rows.append(np.asarray(r, dtype=np.int64).ravel())
        cols.append(np.asarray(c, dtype=np.int64).ravel())
        vals.append(np.asarray(v, dtype=np.float64).ravel())

    # --- accumulation -----------------------------------------------------
    mass_w, mass_n, _, _ = _accumulation(model, state)
    prev_w, prev_n, _, _ = _accumulation(model, prev_state)
    pv = model.pore_volumes
    cell = np.arange(nc)
    residual[2 * cell] += (mass_w - prev_w) / dt
    residual[2 * cell + 1] += (mass_n - prev_n) / dt
    add(2 * cell, 2 * cell, pv * drho_w * s / dt)
    add(2 * cell, 2 * cell + 1, pv * rho_w / dt)
    add(2 * cell + 1, 2 * cell, pv * drho_n * (1.0 - s) / dt)
    add(2 * cell + 1, 2 * cell + 1, -pv * rho_n / dt)

    # --- interior-face fluxes ---------------------------------------------
    o = model.face_cells[:, 0]
    n = model.face_cells[:, 1]
    T = model.face_trans
    dd = model.face_ddepth
    dp = p[o] - p[n]

    for rho, drho, lam, dlam, row_off in (
        (rho_w, drho_w, lam_w, dlam_w, 0),
        (rho_n, drho_n, lam_n, dlam_n, 1),
    ):
        rho_face = 0.5 * (rho[o] + rho[n])
        dphi = dp - g * rho_face * dd
        up = np.where(dphi >= 0.0, o, n)
        lam_up = lam[up]
        rho_up = rho[up]
        flux = T * lam_up * rho_up * dphi

        np.add.at(residual, 2 * o + row_off, flux)
        np.add.at(residual, 2 * n + row_off, -flux)

        up_is_o = (up == o).astype(np.float64)
        dflux_dpo = T * lam_up * (rho_up * (1.0 - 0.5 * g * dd * drho) + up_is_o * drho * dphi)
        dflux_dpn = T * lam_up * (rho_up * (-1.0 - 0.5 * g * dd * drho) + (1.0 - up_is_o) * drho * dphi)
        dflux_dsup = T * dlam[up] * rho_up * dphi

        add(2 * o + row_off, 2 * o, dflux_dpo)
        add(2 * o + row_off, 2 * n, dflux_dpn)
        add(2 * o + row_off, 2 * up + 1, dflux_dsup)
        add(2 * n + row_off, 2 * o, -dflux_dpo)
        add(2 * n + row_off, 2 * n, -dflux_dpn)
        add(2 * n + row_off, 2 * up + 1, -dflux_dsup)

    # --- wells --------------------------------------------------------------
    cross_flow: list[tuple[str, int]] = []
    vol_rates_w = np.zeros(nw)
    vol_rates_n = np.zeros(nw)

    for w_idx, well in enumerate(wells):
        bcol = 2 * nc + w_idx
        bhp = state.bhp[w_idx]
        conns = np.asarray(well.cells, dtype=np.int64)
        wi = np.asarray(well.wi)
        p_cell = p[conns]
        p_conn = connection_pressures(model, well, bhp)
        drawdown = p_conn - p_cell

        if well.kind == INJECTOR:
            lam_inj = fluids.relperm.kmax_w / fluids.mu_w
            rho_conn = density(closure, WETTING, p_conn)
            q_w = wi * lam_inj * rho_conn * drawdown
            dq_dbhp = wi * lam_inj * (drho_w * drawdown + rho_conn)
            dq_dpc = -wi * lam_inj * rho_conn

            residual[2 * conns] -= q_w
            add(2 * conns, np.full_like(conns, bcol), -dq_dbhp)
            add(2 * conns, 2 * conns, -dq_dpc)

            qvol_w = q_w / closure.rho_ref_w
            vol_rates_w[w_idx] = qvol_w.sum()
            for c_local in np.nonzero(drawdown < 0)[0]:
                cross_flow.append((well.name, int(conns[c_local])))

            if well.control.kind == RATE_TARGET:
                residual[bcol] = qvol_w.sum() - well.control.value
                add(np.full_like(conns, bcol), np.full_like(conns, bcol), dq_dbhp / closure.rho_ref_w)
                add(np.full_like(conns, bcol), 2 * conns, dq_dpc / closure.rho_ref_w)
            elif well.control.kind == BHP_TARGET:
                residual[bcol] = bhp - well.control.value
                add([bcol], [bcol], [1.0])
            else:
                raise InvalidWellError(f"unsupported control {well.control.kind!r}")

        else:  # producer: upwind from the host cell, both phases
            lam_wc, lam_nc = lam_w[conns], lam_n[conns]
            dlam_wc, dlam_nc = dlam_w[conns], dlam_n[conns]
            rho_wc, rho_nc = rho_w[conns], rho_n[conns]

            q_w = wi * lam_wc * rho_wc * drawdown
            q_n = wi * lam_nc * rho_nc * drawdown
            dqw_dbhp = wi * lam_wc * rho_wc
            dqn_dbhp = wi * lam_nc * rho_nc
            dqw_dpc = wi * lam_wc * (drho_w * drawdown - rho_wc)
            dqn_dpc = wi * lam_nc * (drho_n * drawdown - rho_nc)
            dqw_dsc = wi * dlam_wc * rho_wc * drawdown
            dqn_dsc = wi * dlam_nc * rho_nc * drawdown

            residual[2 * conns] -= q_w
            residual[2 * conns + 1] -= q_n
            add(2 * conns, np.full_like(conns, bcol), -dqw_dbhp)
            add(2 * conns, 2 * conns, -dqw_dpc)
            add(2 * conns, 2 * conns + 1, -dqw_dsc)
            add(2 * conns + 1, np.full_like(conns, bcol), -dqn_dbhp)
            add(2 * conns + 1, 2 * conns, -dqn_dpc)
            add(2 * conns + 1, 2 * conns + 1, -dqn_dsc)

            vol_rates_w[w_idx] = (q_w / closure.rho_ref_w).sum()
            vol_rates_n[w_idx] = (q_n / closure.rho_ref_n).sum()
            for c_local in np.nonzero(drawdown > 0)[0]:
                cross_flow.append((well.name, int(conns[c_local])))

            if well.control.kind == BHP_TARGET:
                residual[bcol] = bhp - well.control.value
                add([bcol], [bcol], [1.0])
            elif well.control.kind == RATE_TARGET:
                residual[bcol] = (q_w / closure.rho_ref_w + q_n / closure.rho_ref_n).sum() - well.control.value
                add(np.full_like(conns, bcol), np.full_like(conns, bcol),
                    dqw_dbhp / closure.rho_ref_w + dqn_dbhp / closure.rho_ref_n)
                add(np.full_like(conns, bcol), 2 * conns,
                    dqw_dpc / closure.rho_ref_w + dqn_dpc / closure.rho_ref_n)
                add(np.full_like(conns, bcol), 2 * conns + 1,
                    dqw_dsc / closure.rho_ref_w + dqn_dsc / closure.rho_ref_n)
            else:
                raise InvalidWellError(f"unsupported control {well.control.kind!r}")

    jac = coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(nvar, nvar),
    ).tocsc()

    info = {
        "vol_rates_water": vol_rates_w,
        "vol_rates_oil": vol_rates_n,
        "bhp": state.bhp.copy(),
        "cross_flow": cross_flow,
    }
    return residual, jac, info


def scaled_norms(model: ReservoirModel, residual: np.ndarray, dt: float,
                 wells: list[Well]) -> dict:
    """Dimensionless convergence measures: per-cell (cnv) and global (mb)
    scaled mass residuals per phase, plus the worst relative well-control
    residual."""
    nc = model.n_cells
    closure = model.fluids.density
    pv = model.pore_volumes
    out = {}
    for phase, rho_ref, off in ((WETTING, closure.rho_ref_w, 0),
                                (NON_WETTING, closure.rho_ref_n, 1)):
        r = residual[off:2 * nc:2]
        scale = pv * rho_ref
        out[f"cnv_{phase}"] = float(np.max(np.abs(r) * dt / scale))
        out[f"mb_{phase}"] = float(abs(r.sum()) * dt / scale.sum())
    ctrl = 0.0
    for w_idx, well in enumerate(wells):
        r = residual[2 * nc + w_idx]
        scale = max(abs(well.control.value), 1.0e5 if well.control.kind == BHP_TARGET else 1.0e-12)
        ctrl = max(ctrl, abs(r) / scale)
    out["ctrl"] = ctrl
    return out
