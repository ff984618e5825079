"""Exception types shared across the package."""


class VibcontrolError(Exception):
    """Base class for package errors."""


class CurveDataError(VibcontrolError, ValueError):
    """Invalid potential-curve tabulation."""


class GridMismatchError(VibcontrolError, ValueError):
    """Fields defined on different radial grids were combined."""


class ConfigError(VibcontrolError, ValueError):
    """Invalid run configuration (CLI exit code 1)."""


class NumericsError(VibcontrolError, RuntimeError):
    """Propagation produced non-finite values (CLI exit code 2)."""
