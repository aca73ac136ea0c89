"""Exception taxonomy shared across the workbench.

Every recoverable domain failure has a dedicated class so callers (and the
orchestration loop's classifier) can dispatch on type rather than message
text.
"""

from __future__ import annotations


class GroundLoopError(Exception):
    """Base class for all workbench errors."""


# --- geometry / fields -------------------------------------------------------

class InvalidDimsError(GroundLoopError):
    """Mesh dimensions or extents are not strictly positive."""


class DegenerateGeometryError(GroundLoopError):
    """Deformation produced inverted cells, crossing interfaces, or
    non-positive volumes."""


class DeformationOrderError(GroundLoopError):
    """Deformations composed in an unsupported order (undulation must
    precede the dome)."""


class InvalidStatsError(GroundLoopError):
    """Statistical descriptors violate their invariants (e.g. mean <= 0)."""


# --- fluids / simulation -----------------------------------------------------

class NonphysicalStateError(GroundLoopError):
    """A state evaluation produced a nonphysical quantity (e.g. density <= 0)."""

    def __init__(self, message: str, cell: int | None = None, phase: str | None = None):
        super().__init__(message)
        self.cell = cell
        self.phase = phase


class UndefinedFractionalFlowError(GroundLoopError):
    """Both phases immobile; fractional flow undefined."""


class InvalidWellError(GroundLoopError):
    """Well placement or completion is inconsistent with the mesh."""


class ConvergenceFailure(GroundLoopError):
    """Newton iteration did not meet tolerances within the iteration budget."""

    def __init__(self, message: str, trace: list | None = None):
        super().__init__(message)
        self.trace = trace or []


class LinearSolverFailure(GroundLoopError):
    """The sparse linear solve produced no finite update (singular system)."""


class RunFailure(GroundLoopError):
    """A simulation run could not reach the end of its schedule."""

    def __init__(self, message: str, diagnostics=None, step_index: int | None = None,
                 cause: GroundLoopError | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics
        self.step_index = step_index
        self.cause = cause


class OutOfRangeError(GroundLoopError):
    """A requested sample point lies outside the achieved range."""


# --- specification engine ----------------------------------------------------

class SpecParseError(GroundLoopError):
    """Malformed specification document."""

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


class UnitError(SpecParseError):
    """Unknown or inadmissible unit string."""


class LevelMaskError(SpecParseError):
    """A field is not permitted at the document's abstraction level."""


class ContradictionError(GroundLoopError):
    """Two specification fields demand incompatible configurations."""

    def __init__(self, message: str, fields: tuple[str, str]):
        super().__init__(message)
        self.fields = fields


class InvariantViolation(GroundLoopError):
    """A resolved value breaks a named domain invariant."""

    def __init__(self, invariant: str, message: str = ""):
        super().__init__(message or invariant)
        self.invariant = invariant


class StaleLedgerError(GroundLoopError):
    """Ledger does not certify the configuration it was presented with."""


# --- orchestration / retrieval / persistence ---------------------------------

class QueryError(GroundLoopError):
    """Empty or unusable retrieval query."""


class NotFoundError(GroundLoopError):
    """Symbol, entry, or record does not exist."""


class TamperError(GroundLoopError):
    """Event payload hash mismatch during replay."""

    def __init__(self, message: str, event_id: int | None = None):
        super().__init__(message)
        self.event_id = event_id


class CorruptLogError(GroundLoopError):
    """Event log has gaps or undecodable records."""


class PlannerError(GroundLoopError):
    """External planner unreachable or returned an invalid directive."""


class StoreError(GroundLoopError):
    """Session store record corrupt or inaccessible."""
