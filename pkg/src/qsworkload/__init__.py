"""Quasi-stationary workload of Levy-driven storage systems.

Closed-form and transform-level quasi-stationary laws for spectrally
one-sided input with exponential jumps (or linear Brownian motion), the
busy-period tail asymptotics, numerical Laplace inversion, and a Monte Carlo
oracle for the reflected process conditioned on a long busy period.
"""
__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AssumptionViolation,
    BelowSingularity,
    CapabilityError,
    ConfigError,
    DomainError,
    ModelError,
    StabilityError,
)
from .exponent_analysis import CriticalPoints, Side, critical_points, right_inverse_phi  # noqa: E402
from .levy_models import Kind, LevyModel, dual, laplace_exponent, load_model, stationary_law  # noqa: E402
from .qs_transforms import (  # noqa: E402
    brownian_exact_tail,
    busy_period_tail,
    master_transform,
    qs_transform,
)

__all__ = [
    "__version__",
    "AssumptionViolation",
    "BelowSingularity",
    "CapabilityError",
    "ConfigError",
    "DomainError",
    "ModelError",
    "StabilityError",
    "CriticalPoints",
    "Side",
    "critical_points",
    "right_inverse_phi",
    "Kind",
    "LevyModel",
    "dual",
    "laplace_exponent",
    "load_model",
    "stationary_law",
    "brownian_exact_tail",
    "busy_period_tail",
    "master_transform",
    "qs_transform",
]
