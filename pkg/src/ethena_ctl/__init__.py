"""Stochastic-control toolkit for the delta-neutral staking/perpetual carry trade.

Solves the optimal accumulation policy in two settings (a discounted
infinite horizon and a finite horizon with terminal liquidation cost),
simulates the closed-loop dynamics with seeded, counter-based noise, and
certifies every solved coefficient through independent residual checks.
"""

from .fh import FHCoefficientPath, integrate_backward, optimal_rate_fh, value_fh
from .ih import IHCoefficients, IHFeedback, IHSolution, optimal_rate_ih, solve_ih, value_ih
from .kernels import BACKEND
from .params import ModelParams, ValidationReport, phi_from_risk_aversion, validate
from .simulate import (
    ConstantRate,
    FiniteHorizon,
    InfiniteHorizon,
    PathRecord,
    Policy,
    Scaled,
    SimConfig,
    brownian_increments,
    mc_objective,
    simulate_pair,
    simulate_path,
)

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "ValidationReport",
    "validate",
    "phi_from_risk_aversion",
    "IHCoefficients",
    "IHFeedback",
    "IHSolution",
    "solve_ih",
    "optimal_rate_ih",
    "value_ih",
    "FHCoefficientPath",
    "integrate_backward",
    "optimal_rate_fh",
    "value_fh",
    "SimConfig",
    "Policy",
    "InfiniteHorizon",
    "FiniteHorizon",
    "ConstantRate",
    "Scaled",
    "PathRecord",
    "brownian_increments",
    "simulate_path",
    "simulate_pair",
    "mc_objective",
    "BACKEND",
    "__version__",
]
