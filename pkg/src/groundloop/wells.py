"""Simple vertical wells: Peaceman connection indices, rate/BHP controls,
schedules, and the pore-volume-constrained rate derivation.

A well occupies one (i, j) column, perforating a contiguous k-range; each
perforated cell gets one connection with its own well index. The wellbore
is a single node (no friction): connection pressures follow the bottom-hole
pressure plus a hydrostatic correction using the well's primary-phase
reference density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidWellError
from .meshing import GeometrySummary, Mesh

INJECTOR = "injector"
PRODUCER = "producer"

RATE_TARGET = "rate"
BHP_TARGET = "bhp"


@dataclass(frozen=True)
class Control:
    """rate: total volumetric rate at reference density (m^3/s, positive =
    injection). bhp: fixed bottom-hole pressure (Pa)."""

    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in (RATE_TARGET, BHP_TARGET):
            raise InvalidWellError(f"unknown control kind {self.kind!r}")


def peaceman_wi(dx: float, dy: float, dz: float, k: float, rw: float, skin: float = 0.0) -> float:
    """Peaceman well index for a vertical well completed in one cell:
    re = 0.14 * sqrt(dx^2 + dy^2), WI = 2*pi*k*dz / (ln(re/rw) + skin)."""
    if min(dx, dy, dz, k, rw) <= 0:
        raise InvalidWellError("lengths, permeability, and radius must be > 0")
    re = 0.14 * math.sqrt(dx * dx + dy * dy)
    if re <= rw:
        raise InvalidWellError(f"equivalent radius {re:.4g} m not larger than wellbore {rw:.4g} m")
    denom = math.log(re / rw) + skin
    if denom <= 0:
        raise InvalidWellError("ln(re/rw) + skin must be > 0")
    return 2.0 * math.pi * k * dz / denom


@dataclass(frozen=True)
class Well:
    name: str
    kind: str
    i: int
    j: int
    k_range: tuple[int, int]           # inclusive
    radius: float
    skin: float
    control: Control
    cells: tuple[int, ...]             # one per perforated layer
    wi: tuple[float, ...]              # m^3, per connection
    conn_depth: tuple[float, ...]      # connection cell centroid depths
    ref_depth: float                   # topmost connection depth

    @property
    def n_connections(self) -> int:
        return len(self.cells)


def setup_vertical_well(
    mesh: Mesh,
    geometry: GeometrySummary,
    permeability: np.ndarray,
    name: str,
    i: int,
    j: int,
    kind: str,
    control: Control,
    k_range: tuple[int, int] | None = None,
    radius: float = 0.1,
    skin: float = 0.0,
) -> Well:
    """One connection per perforated cell; defaults to full thickness.

    Cell thickness for the well index is the effective dz of the (possibly
    deformed) host cell, volume / (dx * dy); lateral spacing is exact since
    deformations are vertical only.
    """
    d = mesh.dims
    if not (0 <= i < d.nx and 0 <= j < d.ny):
        raise InvalidWellError(f"well {name}: column ({i}, {j}) outside the {d.nx}x{d.ny} grid")
    if kind not in (INJECTOR, PRODUCER):
        raise InvalidWellError(f"unknown well kind {kind!r}")
    if k_range is None:
        k_range = (0, d.nz - 1)
    k0, k1 = k_range
    if not (0 <= k0 <= k1 < d.nz):
        raise InvalidWellError(f"well {name}: k-range {k_range} invalid for nz={d.nz}")

    dx, dy, _ = d.spacing
    cells, wi, depths = [], [], []
    for k in range(k0, k1 + 1):
        c = mesh.cell_index(i, j, k)
        dz_eff = geometry.cell_volumes[c] / (dx * dy)
        cells.append(c)
        wi.append(peaceman_wi(dx, dy, dz_eff, float(permeability[c]), radius, skin))
        depths.append(float(geometry.cell_centroids[c, 2]))

    return Well(
        name=name, kind=kind, i=i, j=j, k_range=(k0, k1), radius=radius, skin=skin,
        control=control, cells=tuple(cells), wi=tuple(wi),
        conn_depth=tuple(depths), ref_depth=min(depths),
    )


def derive_injection_rates(pore_volume: float, total_time: float, n_injectors: int) -> float:
    """Per-injector volumetric rate so the injector group delivers exactly
    one pore-volume multiple: rate = PV / (T * n)."""
    if pore_volume <= 0 or total_time <= 0 or n_injectors <= 0:
        raise InvalidWellError("pore volume, time, and injector count must be > 0")
    return pore_volume / (total_time * n_injectors)


@dataclass(frozen=True)
class Schedule:
    """Report-step boundaries (s), strictly increasing, last = total time."""

    total_time: float
    report_times: tuple[float, ...]

    def __post_init__(self):
        rts = self.report_times
        if not rts or rts[-1] != self.total_time:
            raise InvalidWellError("last report boundary must equal total_time")
        if any(b <= a for a, b in zip((0.0,) + rts[:-1], rts)):
            raise InvalidWellError("report boundaries must be strictly increasing and > 0")

    @classmethod
    def uniform(cls, total_time: float, n_steps: int) -> "Schedule":
        if total_time <= 0 or n_steps < 1:
            raise InvalidWellError("schedule needs total_time > 0 and n_steps >= 1")
        boundaries = [total_time * (m + 1) / n_steps for m in range(n_steps - 1)]
        boundaries.append(total_time)  # exact, regardless of rounding above
        return cls(total_time, tuple(boundaries))
