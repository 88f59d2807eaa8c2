"""Squeezed-laser modelling toolkit.

Linear-response noise spectra of an optical parametric oscillator whose
vacuum input is replaced by squeezed light, together with the threshold,
frequency-comb, linewidth and curve-fitting tools used to compare the model
with bench measurements.
"""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    LossBudget,
    QuadVariance,
    SqueezedState,
    apply_loss,
    db_to_variance,
    escape_efficiency,
    squeezing_degree,
    total_efficiency,
    variance_to_db,
    variance_to_r,
)
from .errors import (  # noqa: E402
    ConfigError,
    DomainError,
    SqueezeLaseError,
    ThresholdSingularityError,
    TraceParseError,
)

__all__ = [
    "__version__",
    "ConfigError",
    "DomainError",
    "LossBudget",
    "QuadVariance",
    "SqueezeLaseError",
    "SqueezedState",
    "ThresholdSingularityError",
    "TraceParseError",
    "apply_loss",
    "db_to_variance",
    "escape_efficiency",
    "squeezing_degree",
    "total_efficiency",
    "variance_to_db",
    "variance_to_r",
]
