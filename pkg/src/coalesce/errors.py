"""Exception hierarchy for Coalesce."""

from typing import Any, Optional


class CoalesceError(Exception):
    """Base class for all Coalesce errors."""

    pass


class GridError(CoalesceError):
    """Degenerate frequency or time grid."""

    pass


class CoverageError(CoalesceError):
    """Too little of the spectral mass lies inside the grid."""

    def __init__(self, coverage: float, required: float) -> None:
        self.coverage = coverage
        self.required = required
        super().__init__(
            f"Grid holds {coverage:.5%} of the |Phi(w)|^2 mass, at least {required:.3%} "
            "is required; widen the grid span"
        )


class GridExtentError(CoalesceError):
    """A delay shift pushes significant temporal mass off the grid."""

    def __init__(self, tau_fs: float, lost_fraction: float, required_points: int) -> None:
        self.tau_fs = tau_fs
        self.lost_fraction = lost_fraction
        self.required_points = required_points
        super().__init__(
            f"Delay {tau_fs:g} fs moves {lost_fraction:.3%} of the wavepacket off the time "
            f"grid; extend the grid to at least {required_points} points at the same span"
        )


class QuadratureError(CoalesceError):
    """Quadrature produced a clearly negative probability."""

    pass


class StreamOrderError(CoalesceError):
    """Arrivals or events are not in time order."""

    pass


class EventFileError(CoalesceError):
    """Malformed event file."""

    def __init__(self, message: str, line_number: int, path: Optional[str] = None) -> None:
        self.line_number = line_number
        self.path = path
        location = f"{path}:{line_number}" if path else f"line {line_number}"
        super().__init__(f"{location}: {message}")


class SchemaVersionError(EventFileError):
    """Event file written with an unsupported schema version."""

    pass


class ResultFileError(CoalesceError):
    """Curve CSV with missing columns or invalid rows."""

    pass


class EstimationError(CoalesceError):
    """Probability or efficiency estimate is undefined."""

    pass


class FitError(CoalesceError):
    """Visibility fit did not converge."""

    def __init__(self, message: str, best: Any = None) -> None:
        self.best = best
        super().__init__(message)
