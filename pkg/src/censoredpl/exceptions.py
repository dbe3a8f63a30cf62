"""Exception hierarchy for censoredpl.

All library-raised errors derive from :class:`CensoredPathlossError` so that
callers (notably the CLI) can map any data/spec problem to a single failure
path. Optimizer non-convergence is reported as a flag on the fit result, not
as an exception.
"""


class CensoredPathlossError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CensoredPathlossError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class DataError(CensoredPathlossError):
    """Base class for dataset construction and ingestion problems."""


class InvariantError(DataError, ValueError):
    """A dataset (or file row) violates a structural invariant."""


class ParseError(DataError):
    """A measurement file could not be parsed.

    Attributes:
        line: 1-based line number of the offending line, if known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MissingMetadataError(DataError):
    """A required metadata key (e.g. censoring level ``c``) was not supplied.

    Attributes:
        key: name of the missing metadata key.
    """

    def __init__(self, key: str, message: str | None = None):
        self.key = key
        super().__init__(message or f"missing required metadata key: {key!r}")


class DegenerateDesignError(CensoredPathlossError, ValueError):
    """All regressor values coincide; the slope is unidentifiable."""


class TooFewSamplesError(CensoredPathlossError, ValueError):
    """Not enough samples remain after filtering to fit the model."""


class AllCensoredError(CensoredPathlossError, ValueError):
    """Every sample is censored; the likelihood has no interior maximum."""


class NonFiniteObjectiveError(CensoredPathlossError, ValueError):
    """The objective is non-finite at the starting point."""


class SingularInformationError(CensoredPathlossError):
    """The summed information matrix is numerically singular."""


class SpecError(CensoredPathlossError, ValueError):
    """A Monte-Carlo experiment specification is invalid."""


class AllReplicatesFailedError(CensoredPathlossError):
    """No replicate of a Monte-Carlo experiment produced a fit."""


class WriteError(CensoredPathlossError):
    """An output file could not be written."""
