"""Seeded lognormal petrophysical fields with moment matching.

Arithmetic mean/std descriptors are converted to log-space parameters so
the sampled distribution reproduces those moments exactly. Two draw-order
strategies are supported because the order in which a seeded stream is
consumed is part of the reproducibility contract: identical seeds with
different orders give different (but statistically equivalent) fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidStatsError
from .hashing import content_hash
from .meshing import GeometrySummary, Mesh
from .units import MILLIDARCY

LAYER_BATCHED = "layer_batched"
CELL_INTERLEAVED = "cell_interleaved"
# Philox is counter-based internally, so the stream is reproducible across
# platforms and thread layouts; exposed here as a plain sequential generator.
RNG_FAMILY = "philox4x64-v1"

POROSITY_CAP = 0.95  # reject-and-redraw threshold for porosity samples


def moment_match(mean: float, std: float) -> tuple[float, float]:
    """Log-space (mu, sigma) of a lognormal with the given arithmetic
    mean and standard deviation: sigma^2 = ln(1 + std^2/mean^2),
    mu = ln(mean) - sigma^2/2."""
    if mean <= 0:
        raise InvalidStatsError(f"mean must be > 0, got {mean}")
    if std < 0:
        raise InvalidStatsError(f"std must be >= 0, got {std}")
    sigma2 = math.log1p((std / mean) ** 2)
    mu = math.log(mean) - sigma2 / 2.0
    return mu, math.sqrt(sigma2)


@dataclass(frozen=True)
class LognormalSpec:
    """Arithmetic-moment description of a lognormal in native units."""

    arithmetic_mean: float
    arithmetic_std: float

    def __post_init__(self):
        moment_match(self.arithmetic_mean, self.arithmetic_std)  # validates

    @property
    def log_params(self) -> tuple[float, float]:
        return moment_match(self.arithmetic_mean, self.arithmetic_std)


@dataclass(frozen=True)
class LayerStats:
    """Per stratigraphic unit: permeability (mD) and porosity (fraction)."""

    permeability: tuple[LognormalSpec, ...]
    porosity: tuple[LognormalSpec, ...]

    def __post_init__(self):
        if len(self.permeability) != len(self.porosity):
            raise InvalidStatsError("permeability and porosity must cover the same units")
        if not self.permeability:
            raise InvalidStatsError("at least one stratigraphic unit required")
        for spec in self.porosity:
            if spec.arithmetic_mean >= 1.0:
                raise InvalidStatsError(
                    f"porosity mean must lie in (0, 1), got {spec.arithmetic_mean}")

    @property
    def n_units(self) -> int:
        return len(self.permeability)


@dataclass(frozen=True)
class SamplingPlan:
    seed: int
    strategy: str = LAYER_BATCHED
    rng_family: str = RNG_FAMILY

    def __post_init__(self):
        if self.strategy not in (LAYER_BATCHED, CELL_INTERLEAVED):
            raise InvalidStatsError(f"unknown sampling strategy {self.strategy!r}")
        if self.rng_family != RNG_FAMILY:
            raise InvalidStatsError(f"unsupported rng family {self.rng_family!r}")


@dataclass(frozen=True)
class PropertyField:
    """Per-cell scalar field; permeability is stored in m^2, porosity as a
    fraction."""

    name: str
    unit: str
    values: np.ndarray
    redraw_count: int = 0

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))

    def content_hash(self) -> str:
        return content_hash({"name": self.name, "unit": self.unit,
                             "values": self.values.tolist()})

    def unit_stats(self, layer_of_cell: np.ndarray, n_units: int) -> list[tuple[float, float]]:
        """Empirical (mean, std) per stratigraphic unit."""
        out = []
        for u in range(n_units):
            vals = self.values[layer_of_cell == u]
            out.append((float(vals.mean()), float(vals.std(ddof=0))))
        return out


def _draw_porosity(rng: np.random.Generator, mu: float, sigma: float, n: int) -> tuple[np.ndarray, int]:
    """Vector draw with reject-and-redraw above the porosity cap; offending
    entries are redrawn one at a time in ascending index order so the
    stream consumption stays deterministic."""
    vals = rng.lognormal(mu, sigma, n)
    redraws = 0
    for idx in np.nonzero(vals > POROSITY_CAP)[0]:
        v = vals[idx]
        while v > POROSITY_CAP:
            v = rng.lognormal(mu, sigma)
            redraws += 1
        vals[idx] = v
    return vals, redraws


def sample_fields(mesh: Mesh, stats: LayerStats, plan: SamplingPlan) -> tuple[PropertyField, PropertyField]:
    """Draw permeability and porosity realizations for every cell.

    layer_batched: for each unit in order, draw all permeability values for
    that unit's cells, then all porosity values, assigning in cell-index
    order. cell_interleaved: for each cell in global index order, draw one
    permeability then one porosity sample from that cell's unit stats.
    Same (seed, strategy, rng_family, mesh) gives bit-identical fields.
    """
    if stats.n_units != mesh.n_units:
        raise InvalidStatsError(
            f"stats cover {stats.n_units} units but mesh declares {mesh.n_units}")

    nc = mesh.dims.n_cells
    layer = mesh.layer_of_cell
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(plan.seed)))

    perm_md = np.empty(nc)
    phi = np.empty(nc)
    redraws = 0

    k_params = [spec.log_params for spec in stats.permeability]
    p_params = [spec.log_params for spec in stats.porosity]

    if plan.strategy == LAYER_BATCHED:
        for u in range(stats.n_units):
            cells = np.nonzero(layer == u)[0]
            mu_k, sg_k = k_params[u]
            mu_p, sg_p = p_params[u]
            perm_md[cells] = rng.lognormal(mu_k, sg_k, cells.size)
            vals, r = _draw_porosity(rng, mu_p, sg_p, cells.size)
            phi[cells] = vals
            redraws += r
    else:
        for c in range(nc):
            u = layer[c]
            mu_k, sg_k = k_params[u]
            mu_p, sg_p = p_params[u]
            perm_md[c] = rng.lognormal(mu_k, sg_k)
            v = rng.lognormal(mu_p, sg_p)
            while v > POROSITY_CAP:
                v = rng.lognormal(mu_p, sg_p)
                redraws += 1
            phi[c] = v

    perm = PropertyField("permeability", "m2", perm_md * MILLIDARCY)
    poro = PropertyField("porosity", "fraction", phi, redraw_count=redraws)
    return perm, poro


def pore_volume(geometry: GeometrySummary, porosity: PropertyField) -> float:
    """Sum of porosity-weighted cell volumes (m^3)."""
    if len(porosity.values) != len(geometry.cell_volumes):
        raise InvalidStatsError("porosity field length does not match cell count")
    return float(np.dot(porosity.values, geometry.cell_volumes))
