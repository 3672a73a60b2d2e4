"""Exception types raised by the toolkit.

Everything user-facing derives from SimbaError so the CLI can map input and
validation problems to exit code 1; anything else escaping a phase is treated
as an internal invariant violation (exit code 2).
"""

from __future__ import annotations


class SimbaError(Exception):
    """Base class for input, schema, and configuration errors."""


class SchemaError(SimbaError):
    """Structural problem in an input table (duplicate ids, missing datasets)."""


class ParseError(SimbaError):
    """A cell in an input file could not be parsed."""

    def __init__(self, message: str, *, row: int | None = None, column: str | None = None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column!r}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.row = row
        self.column = column


class DegenerateChanceError(SchemaError):
    """A dataset's random-chance level leaves no headroom to normalize against."""


class SplitError(SimbaError):
    """A model split would leave the train or test half empty."""


class IncompleteMatrixError(SimbaError):
    """An operation that needs complete columns found missing cells."""

    def __init__(self, message: str, missing: list[tuple[str, str]] | None = None):
        super().__init__(message)
        self.missing = missing or []


class InsufficientDataError(SimbaError):
    """Too few common observations to fit a pairwise regression."""


class DegenerateFitError(SimbaError):
    """A regression is undefined on this data (zero variance or infeasible transform)."""


class ConfigError(SimbaError):
    """Invalid or inconsistent run configuration."""
