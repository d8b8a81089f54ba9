"""Python front end of the two-material NIP/ENIP solver."""

from ._core import (
    ConfigError,
    NumericalFailure,
    error_norm,
    exact_riemann,
    line_from_volume,
    loglog_slope,
    volume_from_line,
    youngs_normal,
)
from ._core import run_case as _run_case

__all__ = [
    "ConfigError",
    "NumericalFailure",
    "error_norm",
    "exact_riemann",
    "line_from_volume",
    "loglog_slope",
    "run",
    "volume_from_line",
    "youngs_normal",
]


def run(case, **overrides):
    """Run a built-in case; keyword overrides use the config-file keys."""
    return _run_case(case, {k: str(v) for k, v in overrides.items()})
