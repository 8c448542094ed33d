"""Exception hierarchy for the padpress package.

Every domain failure derives from :class:`PadpressError` so callers (and
the CLI) can catch one type. Parsers attach context through keyword
arguments (``line=...``, ``index=...``) which become attributes on the
exception and are appended to the message.
"""


class PadpressError(Exception):
    """Base class for all padpress failures."""

    def __init__(self, message: str = "", **context):
        self.context = context
        for key, value in context.items():
            setattr(self, key, value)
        if context:
            detail = ", ".join(f"{k}={v!r}" for k, v in context.items())
            message = f"{message} ({detail})" if message else detail
        super().__init__(message)


# --- frame / axis / lattice construction ---

class DimensionMismatch(PadpressError):
    """Value count does not match the declared rows x cols geometry."""


class NonFiniteValue(PadpressError):
    """A pressure value, coordinate, or timestamp is NaN/inf or unparseable."""


class NegativePressure(PadpressError):
    """A pressure value is below zero."""


class NonIncreasingAxis(PadpressError):
    """Axis sample coordinates are not strictly increasing."""


class LatticeError(PadpressError):
    """Base class for sample-lattice structural failures."""


class MissingNodeError(LatticeError):
    """The frame set does not cover the full Cartesian product of axis samples."""


class DuplicateNodeError(LatticeError):
    """Two frames (or two capture holds) map to the same lattice node."""


class GeometryMismatchError(LatticeError):
    """A frame's geometry differs from the lattice frame geometry."""


class MalformedLatticeFile(LatticeError):
    """Lattice document is not valid JSON or violates the file schema."""


# --- capture parsing ---

class CaptureError(PadpressError):
    """Base class for capture CSV failures. Line numbers count data rows
    (header excluded, first data row is line 1)."""


class MalformedHeader(CaptureError):
    """Capture CSV header does not follow t_s,angle_deg,stage_z_mm,hold_id,p_R_C..."""


class RowArityMismatch(CaptureError):
    """A capture row has a different column count than the header."""


class NonMonotonicTime(CaptureError):
    """Timestamps decrease within a capture session."""


# --- ingestion / calibration ---

class IngestError(PadpressError):
    """Base class for lattice-building failures."""


class NeverExceeded(IngestError):
    """No sample's contact statistic crossed the baseline threshold."""


class EmptyHold(IngestError):
    """average_hold received no samples."""


class MixedHold(IngestError):
    """Samples within one hold disagree on geometry, hold id, or stage position."""


class IncompleteGrid(IngestError):
    """Sessions do not cover the full (z, angle) grid; carries ``missing``."""

    def __init__(self, missing, **context):
        self.missing = tuple(tuple(m) for m in missing)
        super().__init__(f"missing lattice nodes: {list(self.missing)}", **context)


class InconsistentZSchedule(IngestError):
    """Sessions report equally many holds but at different displacements."""


# --- queries ---

class QueryError(PadpressError):
    """Base class for interpolation query failures."""


class ArityMismatch(QueryError):
    """Query coordinate count does not match the lattice axis count."""


class NonFiniteCoordinate(QueryError):
    """A query coordinate is NaN or infinite."""


# --- service ---

class MalformedTrajectory(PadpressError):
    """Trajectory CSV is empty or has a malformed row."""


class BindFailure(PadpressError):
    """The service could not bind its listen address."""
