"""Exception hierarchy.

Three failure families map onto CLI exit codes: data integrity (2),
statistical preconditions (3), numerical failures (4).
"""


class GeodesicCensusError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class DataIntegrityError(GeodesicCensusError):
    exit_code = 2


class NonHyperbolicError(DataIntegrityError):
    """Matrix with |trace| <= 2 where a hyperbolic element was required."""


class ChecksumError(DataIntegrityError):
    """Census file checksum does not match its data lines."""


class FormatVersionError(DataIntegrityError):
    """Census file carries an unsupported format_version."""


class MemoryBudgetError(DataIntegrityError):
    """Estimated enumeration output exceeds the configured budget."""


class StatPreconditionError(GeodesicCensusError):
    exit_code = 3


class CutoffExceededError(StatPreconditionError):
    """Requested T exceeds the census certification cutoff T_cert."""


class EmptyWindowError(StatPreconditionError):
    """No classes fall in the requested window."""


class DegenerateVarianceError(StatPreconditionError):
    """sigma^2 is (numerically) zero: lattice roof, no Gaussian limit."""


class InsufficientDataError(StatPreconditionError):
    """Fewer samples than the documented minimum for this statistic."""


class NumericalError(GeodesicCensusError):
    exit_code = 4


class NonConvergenceError(NumericalError):
    """Iterative solver failed to converge."""


class BracketError(NumericalError):
    """Root bracketing failed (input outside the solvable range)."""


class EstimateDisagreementError(NumericalError):
    """Independent estimates of the same constant disagree beyond tolerance."""
