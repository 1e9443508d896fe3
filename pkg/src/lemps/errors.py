"""Exception hierarchy shared across the package.

Plain parameter/shape/range problems raise the builtin ValueError; the
classes below name the domain-specific failure modes that callers are
expected to catch and report.
"""


class LempsError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(LempsError):
    """CSV header does not match the canonical column set."""


class ParseError(LempsError):
    """A CSV cell could not be parsed; message names row and column."""


class ValidationError(LempsError):
    """A record violates a data invariant; message names the row."""


class ContinuityError(LempsError):
    """Monthly records are not consecutive; message names the gap."""


class InsufficientDataError(LempsError):
    """Too few records for the requested operation."""


class UndefinedCorrelationError(LempsError):
    """Pearson correlation requested on a constant vector."""


class SelectionError(LempsError):
    """Every hyperparameter candidate produced a degenerate fit."""


class AggregateError(LempsError):
    """Too many repeat failures to aggregate a report."""
