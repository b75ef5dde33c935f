"""Exception taxonomy shared across the package."""


class FclabError(Exception):
    """Base class for every package-specific error."""


class ConfigError(FclabError):
    """Invalid or inconsistent configuration."""


class AlignmentError(FclabError):
    """Series that must share an index have incompatible lengths."""


class EmptyWindowError(FclabError):
    """An evaluation window selects no observations."""


class DegenerateBaselineError(FclabError):
    """Baseline MSFE is zero, so normalized ratios are undefined."""


class InsufficientDataError(FclabError):
    """Not enough observations for the requested fit."""


class NumericInputError(FclabError):
    """Non-finite values where finite reals are required."""


class DegenerateWeightsError(FclabError):
    """No candidate carries any weight (all scores are -inf)."""


class NoCandidatesError(FclabError):
    """A combiner was asked to combine an empty candidate set."""


class ProtocolError(FclabError):
    """predict/observe called out of order, or state queried too early."""


class ExplosiveSeriesError(FclabError):
    """Simulated series exceeded the magnitude guard."""


class BudgetError(FclabError):
    """Requested search exceeds the configured compute budget."""


class MissingDataError(FclabError):
    """Missing or non-finite cell in a panel that must be complete."""


class SchemaError(FclabError):
    """Panel file violates the expected schema."""


class ReplicationError(FclabError):
    """A Monte Carlo replication failed; message records index and seed."""


# Errors that indicate bad input data rather than bad configuration; the
# CLI maps these to a distinct exit status.
DATA_ERRORS = (
    AlignmentError,
    EmptyWindowError,
    DegenerateBaselineError,
    InsufficientDataError,
    NumericInputError,
    DegenerateWeightsError,
    MissingDataError,
    SchemaError,
    ExplosiveSeriesError,
    ReplicationError,
)
