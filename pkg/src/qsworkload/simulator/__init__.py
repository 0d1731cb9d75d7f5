"""Monte Carlo oracle for the conditioned reflected process."""
from ._backend import ENV_FLAG, resolve_backend
from ._rng import ALGORITHM
from .core import (
    MIN_SURVIVORS,
    EmpiricalConditional,
    SimulationConfig,
    estimate_master_transform,
    ks_distance,
    simulate,
    simulate_brownian,
    simulate_cp,
)

__all__ = [
    "ALGORITHM",
    "ENV_FLAG",
    "MIN_SURVIVORS",
    "EmpiricalConditional",
    "SimulationConfig",
    "estimate_master_transform",
    "ks_distance",
    "resolve_backend",
    "simulate",
    "simulate_brownian",
    "simulate_cp",
]
