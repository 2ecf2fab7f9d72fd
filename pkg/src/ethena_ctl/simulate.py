"""Seeded Euler-Maruyama simulation of (D, N, X) under feedback policies.

Discretization (explicit Euler, step dt): at step i the rate gamma_i is
evaluated at the pre-update state (t_i, D_i, N_i), and the X update also
uses the pre-update D_i, N_i:

    D_{i+1} = D_i + [-kappa (D_i - m) - mu gamma_i] dt + c dW_i
    N_{i+1} = N_i + gamma_i dt
    X_{i+1} = X_i + [(q+kappa) D_i - kappa m + r + mu gamma_i] N_i dt
                  - lam gamma_i^2 dt - c N_i dW_i

Noise comes from a counter-based generator (Philox) keyed by
(seed, stream index), so output is identical regardless of evaluation
order, chunking, or thread count, and one increment array can drive both
policies in a paired comparison (common random numbers).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from . import kernels
from .fh import FHCoefficientPath
from .ih import IHFeedback
from .params import ModelParams

__all__ = [
    "SimConfig",
    "InfiniteHorizon",
    "FiniteHorizon",
    "ConstantRate",
    "Scaled",
    "Policy",
    "policy_rate",
    "policy_step_coefficients",
    "policy_horizon_kind",
    "PathRecord",
    "brownian_increments",
    "simulate_path",
    "simulate_pair",
    "mc_objective",
]


@dataclass(frozen=True)
class SimConfig:
    dt: float
    steps: int
    seed: int
    n_paths: int = 1

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be positive (got {self.dt})")
        if self.steps < 1 or self.n_paths < 1:
            raise ValueError("steps and n_paths must be >= 1")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit in 64 unsigned bits")


def grid_covers_horizon(config: SimConfig, T: float) -> bool:
    """Exact check that steps * dt equals T, in decimal rather than binary.

    Configured values like dt = 0.001 are decimal literals; comparing their
    binary float products would reject exact decimal matches, so both sides
    go through the shortest-repr decimal (Fraction(str(x))).
    """
    return Fraction(str(config.dt)) * config.steps == Fraction(str(T))


# ---------------------------------------------------------------------------
# policies

@dataclass(frozen=True)
class InfiniteHorizon:
    feedback: IHFeedback


@dataclass(frozen=True)
class FiniteHorizon:
    path: FHCoefficientPath


@dataclass(frozen=True)
class ConstantRate:
    rate: float


@dataclass(frozen=True)
class Scaled:
    base: "Policy"
    factor: float


Policy = Union[InfiniteHorizon, FiniteHorizon, ConstantRate, Scaled]


def policy_rate(policy: Policy, t: float, d: float, n: float) -> float:
    """Trading rate of the policy at (t, d, n); pure function."""
    if isinstance(policy, InfiniteHorizon):
        fb = policy.feedback
        return fb.gamma_N * n + fb.gamma_D * d + fb.gamma_0
    if isinstance(policy, FiniteHorizon):
        from .fh import optimal_rate_fh

        return optimal_rate_fh(policy.path, t, d, n)
    if isinstance(policy, ConstantRate):
        return policy.rate
    if isinstance(policy, Scaled):
        return policy.factor * policy_rate(policy.base, t, d, n)
    raise TypeError(f"not a policy: {policy!r}")


def policy_step_coefficients(policy: Policy, times: np.ndarray):
    """Per-step affine coefficients (gn, gd, g0) with rate = gn n + gd d + g0.

    Every supported policy is affine in the state at each instant, so the
    stepping kernels only ever see three per-step coefficient arrays.
    """
    times = np.asarray(times, dtype=float)
    if isinstance(policy, InfiniteHorizon):
        fb = policy.feedback
        ones = np.ones_like(times)
        return fb.gamma_N * ones, fb.gamma_D * ones, fb.gamma_0 * ones
    if isinstance(policy, FiniteHorizon):
        path = policy.path
        if times.size and (times.min() < 0.0 or times.max() > path.T):
            raise ValueError(f"policy times outside [0, {path.T}]")
        return (
            np.interp(times, path.grid, path.GammaN),
            np.interp(times, path.grid, path.GammaD),
            np.interp(times, path.grid, path.Gamma0),
        )
    if isinstance(policy, ConstantRate):
        zeros = np.zeros_like(times)
        return zeros, zeros.copy(), np.full_like(times, policy.rate)
    if isinstance(policy, Scaled):
        gn, gd, g0 = policy_step_coefficients(policy.base, times)
        return policy.factor * gn, policy.factor * gd, policy.factor * g0
    raise TypeError(f"not a policy: {policy!r}")


def policy_horizon_kind(policy: Policy) -> str:
    """'fh' for (scaled) finite-horizon policies, 'ih' otherwise."""
    if isinstance(policy, FiniteHorizon):
        return "fh"
    if isinstance(policy, Scaled):
        return policy_horizon_kind(policy.base)
    return "ih"


# ---------------------------------------------------------------------------
# noise

def brownian_increments(seed: int, steps: int, dt: float, stream: int = 0) -> np.ndarray:
    """i.i.d. Normal(0, sqrt(dt)) draws from a Philox generator keyed by (seed, stream)."""
    if dt <= 0:
        raise ValueError(f"dt must be positive (got {dt})")
    key = int(seed) + (int(stream) << 64)
    gen = np.random.Generator(np.random.Philox(key=key))
    return gen.standard_normal(steps) * np.sqrt(dt)


def _increment_matrix(seed: int, n_paths: int, steps: int, dt: float, first_stream: int = 0) -> np.ndarray:
    out = np.empty((n_paths, steps))
    for p in range(n_paths):
        out[p] = brownian_increments(seed, steps, dt, stream=first_stream + p)
    return out


# ---------------------------------------------------------------------------
# paths

@dataclass(frozen=True)
class PathRecord:
    t: np.ndarray        # length steps + 1
    D: np.ndarray
    N: np.ndarray
    X: np.ndarray
    gamma: np.ndarray    # length steps
    realized_objective: float


def _realized_objective(params: ModelParams, kind: str, t, D, N, gamma, dt: float) -> float:
    k, m, mu, lam, q, r, phi = (
        params.kappa, params.m, params.mu, params.lam, params.q, params.r, params.phi,
    )
    steps = len(gamma)
    integrand = ((q + k) * D[:steps] - k * m + r + mu * gamma) * N[:steps] - lam * gamma ** 2 - phi * N[:steps] ** 2
    if kind == "fh":
        if params.lamT is None:
            raise ValueError("finite-horizon objective requires lamT")
        return float(np.sum(integrand) * dt - 0.5 * params.lamT * N[steps] ** 2)
    return float(np.sum(np.exp(-params.rho * t[:steps]) * integrand) * dt)


def simulate_path(
    params: ModelParams,
    policy: Policy,
    increments: np.ndarray,
    dt: float,
    horizon_kind: Optional[str] = None,
) -> PathRecord:
    """One Euler-Maruyama path driven by the given increment array.

    ``horizon_kind`` selects the realized-objective accumulation ('fh' with
    terminal penalty, 'ih' discounted without); defaults to the policy's kind.
    """
    increments = np.atleast_1d(np.asarray(increments, dtype=float))
    steps = increments.shape[0]
    t = np.arange(steps + 1) * dt
    gn, gd, g0 = policy_step_coefficients(policy, t[:steps])
    D, N, X, G = kernels.simulate_batch(
        params.d0, params.n0, params.x0, dt,
        params.kappa, params.m, params.mu, params.lam, params.q, params.r, params.c,
        np.ascontiguousarray(gn), np.ascontiguousarray(gd), np.ascontiguousarray(g0),
        increments[np.newaxis, :],
    )
    kind = horizon_kind or policy_horizon_kind(policy)
    obj = _realized_objective(params, kind, t, D[0], N[0], G[0], dt)
    return PathRecord(t=t, D=D[0], N=N[0], X=X[0], gamma=G[0], realized_objective=obj)


def simulate_pair(
    params: ModelParams,
    ih_feedback: IHFeedback,
    fh_path: FHCoefficientPath,
    config: SimConfig,
):
    """Paired comparison: one increment array drives both policies."""
    if not grid_covers_horizon(config, fh_path.T):
        raise ValueError(
            f"steps*dt must equal T exactly for the finite-horizon policy "
            f"(got {config.steps}*{config.dt} vs T={fh_path.T})"
        )
    dw = brownian_increments(config.seed, config.steps, config.dt, stream=0)
    rec_ih = simulate_path(params, InfiniteHorizon(ih_feedback), dw, config.dt)
    rec_fh = simulate_path(params, FiniteHorizon(fh_path), dw, config.dt)
    return rec_ih, rec_fh


# ---------------------------------------------------------------------------
# Monte Carlo

_CHUNK = 2048  # paths per kernel call; keeps the increment matrix small


def mc_objective(
    params: ModelParams,
    policy: Policy,
    config: SimConfig,
    horizon_kind: str,
):
    """Monte-Carlo estimate of the expected objective under the policy.

    'fh': Riemann sum of the running reward minus the terminal penalty
    0.5 lamT N_T^2, over the exact horizon grid (steps * dt = T required).
    'ih': the same sum weighted by exp(-rho t_i), no terminal term,
    truncated at steps * dt (the truncation bias is a documented
    approximation, not corrected here).

    Per-path noise streams are keyed by (seed, path index), so the estimate
    is independent of chunking or thread count.  Returns (estimate, std_error).
    """
    if config.n_paths < 2:
        raise ValueError("n_paths < 2: no standard error computable")
    if horizon_kind not in ("fh", "ih"):
        raise ValueError(f"horizon_kind must be 'fh' or 'ih' (got {horizon_kind!r})")

    steps, dt = config.steps, config.dt
    t = np.arange(steps) * dt
    gn, gd, g0 = (np.ascontiguousarray(a) for a in policy_step_coefficients(policy, t))
    if horizon_kind == "fh":
        if params.lamT is None or params.T is None:
            raise ValueError("finite-horizon objective requires lamT and T")
        if not grid_covers_horizon(config, params.T):
            raise ValueError(
                f"steps*dt must equal T exactly (got {steps}*{dt} vs T={params.T})"
            )
        weights = np.full(steps, dt)
        terminal = -0.5 * params.lamT
    else:
        weights = dt * np.exp(-params.rho * t)
        terminal = 0.0

    objectives = np.empty(config.n_paths)
    for start in range(0, config.n_paths, _CHUNK):
        stop = min(start + _CHUNK, config.n_paths)
        dw = _increment_matrix(config.seed, stop - start, steps, dt, first_stream=start)
        objectives[start:stop] = kernels.objective_batch(
            params.d0, params.n0, dt,
            params.kappa, params.m, params.mu, params.lam, params.q, params.r,
            params.phi, params.c,
            gn, gd, g0, weights, terminal, dw,
        )
    estimate = float(objectives.mean())
    std_error = float(objectives.std(ddof=1) / np.sqrt(config.n_paths))
    return estimate, std_error
