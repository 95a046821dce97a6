"""Exception hierarchy shared across the package.

Every error carries a ``category`` used by the HTTP service and the CLI to
map failures onto status/exit codes: "data" for malformed or missing input,
"model" for estimation and forecasting failures.
"""

from __future__ import annotations


class EpiForecastError(Exception):
    """Base class for all domain errors raised by this package."""

    category = "model"


class FormatError(EpiForecastError):
    """Input file or payload does not match the expected wire format."""

    category = "data"


class CellError(FormatError):
    """A single table cell failed to parse; carries its location."""

    def __init__(self, message: str, row: int, column: str):
        super().__init__(f"{message} (row {row}, column {column!r})")
        self.row = row
        self.column = column


class NotFound(EpiForecastError):
    """Requested key is absent; ``suggestions`` lists near matches."""

    category = "data"

    def __init__(self, message: str, suggestions: tuple[str, ...] = ()):
        if suggestions:
            message = f"{message}; did you mean: {', '.join(suggestions)}?"
        super().__init__(message)
        self.suggestions = suggestions


class OutOfRange(EpiForecastError):
    category = "data"


class ShapeError(EpiForecastError):
    category = "data"


class EmptyInput(EpiForecastError):
    category = "data"


class ZeroActual(EpiForecastError):
    category = "data"


class InvalidInterval(EpiForecastError):
    category = "data"


class InsufficientData(EpiForecastError):
    """Series too short for the requested operation."""


class InsufficientResiduals(InsufficientData):
    """Residual series left after the linear stage is too short."""


class StateMismatch(EpiForecastError):
    """Transform state does not match the series it is applied to."""


class DegenerateScale(EpiForecastError):
    """Constant series cannot be min-max scaled."""


class PositivityError(EpiForecastError):
    """Multiplicative smoothing requires strictly positive observations."""


class ConvergenceError(EpiForecastError):
    """Optimizer hit its iteration budget; ``best`` holds the best-so-far fit."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class NoViableModel(EpiForecastError):
    """Every candidate in an order-selection grid failed to fit."""


class InvalidParams(EpiForecastError):
    """Model parameters violate stationarity/invertibility requirements."""


class DivergenceError(EpiForecastError):
    """Training produced a non-finite loss."""


class SingularSystem(EpiForecastError):
    """Normal equations are singular (collinear columns without ridge)."""
