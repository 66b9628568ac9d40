"""Exact analysis of the two-queue join-the-shortest-queue system.

Closed-form blocking probabilities, full stationary distributions for
finite and infinite capacity (symmetric and asymmetric service rates),
total-occupancy statistics, comparison-queue bounds, a brute-force balance
oracle and a coupled stochastic simulator for cross-validation.
"""

from .blocking import (
    blocking_asymptotics,
    blocking_probability,
    blocking_probability_odd,
    blocking_total_constraint,
    empty_queue_probability,
)
from .cohen import boundary_coeffs_infinite, cohen_A
from .finite import stationary_finite
from .infinite import stationary_infinite
from .model import INFINITE, AsymmetricParams, JointDist, SymmetricParams, validate_dist
from .simulate import estimate_blocking, simulate_coupled
from .totals import mean_total, mean_total_bounds, total_dist

__version__ = "0.1.0"

__all__ = [
    "AsymmetricParams",
    "INFINITE",
    "JointDist",
    "SymmetricParams",
    "blocking_asymptotics",
    "blocking_probability",
    "blocking_probability_odd",
    "blocking_total_constraint",
    "boundary_coeffs_infinite",
    "cohen_A",
    "empty_queue_probability",
    "estimate_blocking",
    "mean_total",
    "mean_total_bounds",
    "simulate_coupled",
    "stationary_finite",
    "stationary_infinite",
    "total_dist",
    "validate_dist",
]
