"""Deterministic abstraction masks.

A mask is the structured stand-in for rewriting a model description at a
coarser level: it removes specification keys outright and coarsens others
(exact producer coordinates become the marker "interior"). Removal sets
are nested, reproduction within report within journal, so information loss
is monotone by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..errors import GroundLoopError
from ..modelspec.resolver import AUTONOMOUS, resolve
from ..modelspec.schema import ModelSpec


@dataclass(frozen=True)
class LevelMask:
    level: str
    removed: tuple[str, ...]           # dotted block paths to delete
    coarsened: dict | None = None      # dotted path -> coarse replacement

    def __post_init__(self):
        object.__setattr__(self, "coarsened", dict(self.coarsened or {}))


REPRODUCTION_MASK = LevelMask("reproduction", (), {})
REPORT_MASK = LevelMask("report", ("sampling", "solver"), {})
JOURNAL_MASK = LevelMask(
    "journal",
    ("sampling", "solver", "deformation.undulation_wavelength",
     "deformation.dome_radius", "deformation.interface_depths"),
    {"wells.producers.placement": "interior"},
)


def default_masks() -> tuple[LevelMask, ...]:
    return (REPRODUCTION_MASK, REPORT_MASK, JOURNAL_MASK)


def _check_nesting(masks) -> None:
    for coarse, fine in zip(masks, masks[1:]):
        if not set(coarse.removed) <= set(fine.removed):
            raise GroundLoopError(
                f"mask removal sets must nest: {coarse.level} ⊄ {fine.level}")


_check_nesting(default_masks())


def _remove_path(spec: ModelSpec, path: str) -> ModelSpec:
    parts = path.split(".")
    block = spec.block(parts[0])
    if block is None:
        return spec
    if len(parts) == 1:
        return spec.with_block(parts[0], None)
    node = dict(block)
    cursor = node
    for p in parts[1:-1]:
        if p not in cursor or not isinstance(cursor[p], dict):
            return spec
        cursor[p] = dict(cursor[p])
        cursor = cursor[p]
    cursor.pop(parts[-1], None)
    return spec.with_block(parts[0], node)


def _coarsen_path(spec: ModelSpec, path: str, replacement) -> ModelSpec:
    parts = path.split(".")
    block = spec.block(parts[0])
    if block is None:
        return spec
    node = dict(block)
    cursor = node
    for p in parts[1:-1]:
        if p not in cursor or not isinstance(cursor[p], dict):
            return spec
        cursor[p] = dict(cursor[p])
        cursor = cursor[p]
    leaf = parts[-1]
    if leaf in cursor and isinstance(cursor[leaf], list):
        # keep the count the exact coordinates implied before coarsening
        if leaf == "placement" and "count" not in cursor:
            cursor["count"] = len(cursor[leaf])
        cursor[leaf] = replacement
    return spec.with_block(parts[0], node)


def degrade(spec: ModelSpec, mask: LevelMask) -> ModelSpec:
    """Strip a specification down to the mask's abstraction level.

    Keys in the removal set are deleted, coarsened keys are replaced by
    their coarse markers, and the document level is set accordingly. The
    result always satisfies its own level mask.
    """
    out = spec
    for path in mask.removed:
        out = _remove_path(out, path)
    for path, replacement in mask.coarsened.items():
        out = _coarsen_path(out, path, replacement)
    return replace(out, level=mask.level)


def reconstruct(degraded: ModelSpec, policy=AUTONOMOUS):
    """Resolve a degraded specification into an executable configuration;
    every agent-default ledger entry marks a latent degree of freedom of
    that representation."""
    return resolve(degraded, policy)
