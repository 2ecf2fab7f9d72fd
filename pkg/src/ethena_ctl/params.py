"""Model parameters, admissibility checks, and SDE right-hand sides.

The controlled state is the basis D (perpetual price minus spot price),
the position N (long staked units, equal short perpetual units), and the
net wealth X.  The control is the trading rate gamma = dN/dt.  Dynamics:

    dD = [-kappa (D - m) - mu gamma] dt + c dW
    dN = gamma dt
    dX = [(q + kappa) D - kappa m + r + mu gamma] N dt - lam gamma^2 dt - c N dW

Only the aggregates mu = mu1 + mu2 (permanent impact) and
lam = lam1 + lam2 (temporary impact) enter the control problem; the
per-leg split is carried for P&L attribution in reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Mapping, Optional

__all__ = [
    "ModelParams",
    "ValidationReport",
    "validate",
    "phi_from_risk_aversion",
    "drift_D",
    "drift_N",
    "drift_X",
    "diffusion_D",
    "diffusion_X",
]


@dataclass(frozen=True)
class ModelParams:
    """All exogenous constants of the control problem.

    ``lamT`` and ``T`` are only needed by the finite-horizon solver and may
    be left as ``None`` when only infinite-horizon commands run.
    """

    rho: float       # discount rate (1/time)
    kappa: float     # basis mean-reversion speed (1/time)
    m: float         # long-run basis level
    mu1: float       # permanent impact, spot leg
    mu2: float       # permanent impact, perpetual leg
    lam1: float      # temporary impact, spot leg
    lam2: float      # temporary impact, perpetual leg
    r: float         # staking yield per unit position (1/time)
    q: float         # funding sensitivity to the basis (1/time)
    c: float         # basis volatility
    phi: float       # inventory penalty weight
    lamT: Optional[float] = None   # terminal liquidation-cost coefficient
    T: Optional[float] = None      # horizon length
    d0: float = 0.0
    n0: float = 0.0
    x0: float = 0.0

    @property
    def mu(self) -> float:
        return self.mu1 + self.mu2

    @property
    def lam(self) -> float:
        return self.lam1 + self.lam2

    @property
    def kappa_star(self) -> float:
        """Stability statistic rho + 2 kappa - c^2 (must be positive)."""
        return self.rho + 2.0 * self.kappa - self.c ** 2

    @classmethod
    def from_mapping(cls, data: Mapping[str, object]) -> "ModelParams":
        """Build from a JSON-style mapping.  Unknown keys are an error."""
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise KeyError(f"unknown model parameter keys: {', '.join(unknown)}")
        kwargs = {}
        for key, value in data.items():
            if value is not None and not isinstance(value, (int, float)):
                raise TypeError(f"model parameter {key!r} must be a number, got {type(value).__name__}")
            kwargs[key] = None if value is None else float(value)
        return cls(**kwargs)


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    kappa_star: float
    violations: tuple  # of (constraint-name, observed-value)

    def __str__(self) -> str:
        if self.passed:
            return f"parameters admissible (kappa_star = {self.kappa_star:.6g})"
        lines = [f"parameters inadmissible (kappa_star = {self.kappa_star:.6g}):"]
        lines += [f"  violated {name} (got {value:.6g})" for name, value in self.violations]
        return "\n".join(lines)


def validate(params: ModelParams) -> ValidationReport:
    """Check every sign/stability constraint; report rather than raise.

    Downstream solvers refuse parameters whose report did not pass;
    simulation of non-optimal policies does not require a passed report.
    """
    checks = [
        ("rho>=0", params.rho, params.rho >= 0),
        ("kappa>0", params.kappa, params.kappa > 0),
        ("m>0", params.m, params.m > 0),
        ("mu1>=0", params.mu1, params.mu1 >= 0),
        ("mu2>=0", params.mu2, params.mu2 >= 0),
        ("lam1>=0", params.lam1, params.lam1 >= 0),
        ("lam2>=0", params.lam2, params.lam2 >= 0),
        ("lam1+lam2>0", params.lam, params.lam > 0),
        ("r>0", params.r, params.r > 0),
        ("q>0", params.q, params.q > 0),
        ("c>0", params.c, params.c > 0),
        ("phi>0", params.phi, params.phi > 0),
        ("kappa_star>0", params.kappa_star, params.kappa_star > 0),
    ]
    if params.lamT is not None:
        checks.append(("lamT>0", params.lamT, params.lamT > 0))
    if params.T is not None:
        checks.append(("T>0", params.T, params.T > 0))
    violations = tuple(
        (name, value)
        for name, value, ok in checks
        if not (ok and math.isfinite(value))
    )
    return ValidationReport(passed=not violations, kappa_star=params.kappa_star, violations=violations)


def phi_from_risk_aversion(c: float, eta: float) -> float:
    """Inventory penalty equivalent to mean-variance risk aversion eta.

    The instantaneous variance of the wealth increment is c^2 N^2 dt, so a
    quadratic penalty phi N^2 with phi = c^2 eta / 2 prices that variance
    at risk-aversion eta.
    """
    if c <= 0 or eta <= 0:
        raise ValueError(f"c and eta must be positive (got c={c}, eta={eta})")
    return 0.5 * c * c * eta


def drift_D(d: float, gamma: float, params: ModelParams) -> float:
    """Basis drift: mean reversion toward m plus permanent-impact compression."""
    return -params.kappa * (d - params.m) - params.mu * gamma


def drift_N(gamma: float) -> float:
    return gamma


def drift_X(d: float, n: float, gamma: float, params: ModelParams) -> float:
    """Wealth drift: carry and impact mark-to-market on N, minus execution cost."""
    carry = (params.q + params.kappa) * d - params.kappa * params.m + params.r + params.mu * gamma
    return carry * n - params.lam * gamma * gamma


def diffusion_D(params: ModelParams) -> float:
    return params.c


def diffusion_X(n: float, params: ModelParams) -> float:
    return -params.c * n
