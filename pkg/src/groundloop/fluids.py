"""Constitutive closures for the two-phase immiscible system.

Relative permeability (power-law on effective saturation between
residuals), a linear density-pressure closure, constant viscosities, and
the endpoint mobility ratio that separates favorable from unfavorable
displacement. All evaluations are pure and clamp saturation internally so
Newton iterates may wander slightly out of [0, 1]; converged states must
satisfy the bounds without clamping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonphysicalStateError, UndefinedFractionalFlowError

QUADRATIC = "quadratic"
BROOKS_COREY = "brooks_corey"

CONSTANT_COMPRESSIBILITY = "constant_compressibility"
INCOMPRESSIBLE = "incompressible"

WETTING = "water"       # displacing phase
NON_WETTING = "oil"     # displaced phase
PHASES = (WETTING, NON_WETTING)


@dataclass(frozen=True)
class RelPermModel:
    """Power-law relative permeabilities.

    quadratic is shorthand for brooks_corey with exponents 2, zero
    residuals, and unit endpoints; the equivalence is exact.
    """

    family: str = BROOKS_COREY
    n_w: float = 2.0
    n_n: float = 2.0
    sr_w: float = 0.0
    sr_n: float = 0.0
    kmax_w: float = 1.0
    kmax_n: float = 1.0

    def __post_init__(self):
        if self.family == QUADRATIC:
            object.__setattr__(self, "n_w", 2.0)
            object.__setattr__(self, "n_n", 2.0)
            object.__setattr__(self, "sr_w", 0.0)
            object.__setattr__(self, "sr_n", 0.0)
            object.__setattr__(self, "kmax_w", 1.0)
            object.__setattr__(self, "kmax_n", 1.0)
        elif self.family != BROOKS_COREY:
            raise NonphysicalStateError(f"unknown relperm family {self.family!r}")
        if self.n_w < 1 or self.n_n < 1:
            raise NonphysicalStateError("relperm exponents must be >= 1")
        if not (0 <= self.sr_w and 0 <= self.sr_n and self.sr_w + self.sr_n < 1):
            raise NonphysicalStateError("residual saturations must satisfy 0 <= Sr_w + Sr_n < 1")
        if not (0 < self.kmax_w <= 1 and 0 < self.kmax_n <= 1):
            raise NonphysicalStateError("endpoints must lie in (0, 1]")


def relperm(model: RelPermModel, s_w):
    """(kr_w, kr_n) at water saturation ``s_w`` (scalar or array)."""
    s = np.asarray(s_w, dtype=float)
    span = 1.0 - model.sr_w - model.sr_n
    se = np.clip((s - model.sr_w) / span, 0.0, 1.0)
    kr_w = model.kmax_w * se**model.n_w
    kr_n = model.kmax_n * (1.0 - se) ** model.n_n
    if np.ndim(s_w) == 0:
        return float(kr_w), float(kr_n)
    return kr_w, kr_n


def relperm_deriv(model: RelPermModel, s_w):
    """d(kr_w)/ds_w and d(kr_n)/ds_w; zero outside the mobile range."""
    s = np.asarray(s_w, dtype=float)
    span = 1.0 - model.sr_w - model.sr_n
    se_raw = (s - model.sr_w) / span
    inside = (se_raw > 0.0) & (se_raw < 1.0)
    se = np.clip(se_raw, 0.0, 1.0)
    dkr_w = np.where(inside, model.kmax_w * model.n_w * se ** (model.n_w - 1.0) / span, 0.0)
    dkr_n = np.where(inside, -model.kmax_n * model.n_n * (1.0 - se) ** (model.n_n - 1.0) / span, 0.0)
    if np.ndim(s_w) == 0:
        return float(dkr_w), float(dkr_n)
    return dkr_w, dkr_n


@dataclass(frozen=True)
class DensityClosure:
    """Linear density-pressure closure rho = rho_ref * (1 + c * (p - p_ref)).

    ``incompressible`` pins both compressibilities to zero; it is the same
    formula with c = 0.
    """

    kind: str = CONSTANT_COMPRESSIBILITY
    reference_pressure: float = 1.0e5
    rho_ref_w: float = 1000.0
    rho_ref_n: float = 800.0
    c_w: float = 0.0
    c_n: float = 0.0

    def __post_init__(self):
        if self.kind == INCOMPRESSIBLE:
            object.__setattr__(self, "c_w", 0.0)
            object.__setattr__(self, "c_n", 0.0)
        elif self.kind != CONSTANT_COMPRESSIBILITY:
            raise NonphysicalStateError(f"unknown density closure kind {self.kind!r}")
        if self.rho_ref_w <= 0 or self.rho_ref_n <= 0:
            raise NonphysicalStateError("reference densities must be > 0")
        if self.c_w < 0 or self.c_n < 0:
            raise NonphysicalStateError("compressibilities must be >= 0")

    def params(self, phase: str) -> tuple[float, float]:
        if phase == WETTING:
            return self.rho_ref_w, self.c_w
        if phase == NON_WETTING:
            return self.rho_ref_n, self.c_n
        raise NonphysicalStateError(f"unknown phase {phase!r}")


def density(closure: DensityClosure, phase: str, p, check: bool = True):
    """Phase density at pressure ``p`` (scalar or array, Pa)."""
    rho_ref, c = closure.params(phase)
    rho = rho_ref * (1.0 + c * (np.asarray(p, dtype=float) - closure.reference_pressure))
    if check and np.any(rho <= 0.0):
        bad = int(np.argmin(np.asarray(rho).reshape(-1)))
        raise NonphysicalStateError(
            f"{phase} density non-positive at pressure sample {bad}", cell=bad, phase=phase)
    if np.ndim(p) == 0:
        return float(rho)
    return rho


def density_deriv(closure: DensityClosure, phase: str) -> float:
    """d(rho)/dp; constant for the linear closure."""
    rho_ref, c = closure.params(phase)
    return rho_ref * c


@dataclass(frozen=True)
class FluidSystem:
    """Two-phase fluid description: constant viscosities (Pa*s), relative
    permeability model, and density closure.

    When no density closure is passed, the constructor falls back to the
    simulator's own default: slightly compressible phases referenced at
    surface pressure. That fallback is exactly the kind of tacit choice the
    defaults audit exists to surface, so configuration-level code should
    always pass a closure explicitly.
    """

    mu_w: float
    mu_n: float
    relperm: RelPermModel = RelPermModel()
    density: DensityClosure | None = None

    def __post_init__(self):
        if self.mu_w <= 0 or self.mu_n <= 0:
            raise NonphysicalStateError("viscosities must be > 0")
        if self.density is None:
            object.__setattr__(self, "density", SIMULATOR_DEFAULT_DENSITY)

    def viscosity(self, phase: str) -> float:
        return self.mu_w if phase == WETTING else self.mu_n


# Tacit constructor default: slightly compressible, oil markedly more so,
# referenced at 1 bar. Distinct from the resolver's explicit agent default
# on purpose; the difference is what the tacit-assumption audit measures.
SIMULATOR_DEFAULT_DENSITY = DensityClosure(
    kind=CONSTANT_COMPRESSIBILITY,
    reference_pressure=1.0e5,
    rho_ref_w=1000.0,
    rho_ref_n=800.0,
    c_w=1.0e-10,
    c_n=1.0e-8,
)


def mobility_ratio(system: FluidSystem) -> float:
    """Endpoint mobility of the displacing phase over the displaced phase:
    M = (kmax_w / mu_w) / (kmax_n / mu_n). Favorable iff M <= 1."""
    rp = system.relperm
    return (rp.kmax_w / system.mu_w) / (rp.kmax_n / system.mu_n)


def is_favorable(system: FluidSystem) -> bool:
    return mobility_ratio(system) <= 1.0


def fractional_flow(system: FluidSystem, s_w):
    """Water fractional flow f_w = lam_w / (lam_w + lam_n), gravity and
    capillarity ignored. Used by the analytic 1D displacement oracle."""
    kr_w, kr_n = relperm(system.relperm, s_w)
    lam_w = np.asarray(kr_w) / system.mu_w
    lam_n = np.asarray(kr_n) / system.mu_n
    total = lam_w + lam_n
    if np.any(total == 0.0):
        raise UndefinedFractionalFlowError("both phases immobile")
    f = lam_w / total
    if np.ndim(s_w) == 0:
        return float(f)
    return f
