"""Finite-horizon value function: backward Riccati/linear ODE system.

The time-dependent quadratic ansatz

    V(t, d, n) = A n^2 + B n d + C n + E d^2 + F d + G

turns the (undiscounted) dynamic-programming PDE into a backward system,
collected monomial by monomial:

    A' = phi - lam GN^2                          A(T) = -lamT / 2
    B' = -(q+k) + k B - 2 lam GN GD              B(T) = 0
    C' = -(r - k m) - k m B - GN (C - mu F)      C(T) = 0
    E' = 2 k E - lam GD^2                        E(T) = 0
    F' = k F - 2 k m E - GD (C - mu F)           F(T) = 0
    G' = -lam G0^2 - c^2 E - k m F               G(T) = 0

with time-dependent gains GN = (mu(1-B) + 2A)/(2 lam),
GD = (B - 2 mu E)/(2 lam), G0 = (C - mu F)/(2 lam) and optimal rate
gamma*(t) = GN(t) N + GD(t) D + G0(t).  The (A, E, B) block closes on its
own and drives the linear (C, F) block, which is integrated as a coupled
pair; the scalar reduction of (C, F) to C - mu F alone drops a mu k F
coupling and is kept only as a diagnostic (cc_integral_diagnostic).

Integration is classical fixed-step RK4 backward from t = T, one stacked
6-dimensional state, which keeps runs bit-reproducible for a given step
count and preserves the block hierarchy automatically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import ModelParams, validate

__all__ = [
    "FHCoefficientPath",
    "integrate_backward",
    "feedback_at",
    "optimal_rate_fh",
    "value_fh",
    "closed_form_B_mu0",
    "closed_form_A_mu0_printed",
    "cc_integral_profile",
    "cc_integral_diagnostic",
]


@dataclass(frozen=True)
class FHCoefficientPath:
    """Coefficient and feedback trajectories on a uniform grid 0 = t0 < ... < tK = T."""

    grid: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    GammaN: np.ndarray
    GammaD: np.ndarray
    Gamma0: np.ndarray
    step_count: int

    def __post_init__(self):
        for name in ("grid", "A", "B", "C", "E", "F", "G", "GammaN", "GammaD", "Gamma0"):
            getattr(self, name).flags.writeable = False

    @property
    def T(self) -> float:
        return float(self.grid[-1])


def _rhs(y, p: ModelParams):
    # scalar-tuple right-hand side; hot path of the RK4 loop
    A, B, C, E, F, _ = y
    lam, mu, k, q, m, r, c, phi = p.lam, p.mu, p.kappa, p.q, p.m, p.r, p.c, p.phi
    gn = (mu * (1.0 - B) + 2.0 * A) / (2.0 * lam)
    gd = (B - 2.0 * mu * E) / (2.0 * lam)
    cc = C - mu * F
    g0 = cc / (2.0 * lam)
    return (
        phi - lam * gn * gn,
        -(q + k) + k * B - 2.0 * lam * gn * gd,
        -(r - k * m) - k * m * B - gn * cc,
        2.0 * k * E - lam * gd * gd,
        k * F - 2.0 * k * m * E - gd * cc,
        -lam * g0 * g0 - c * c * E - k * m * F,
    )


def integrate_backward(params: ModelParams, steps: int) -> FHCoefficientPath:
    """Integrate the six coefficient ODEs backward from t = T with RK4.

    The terminal node is assigned exactly (A = -lamT/2, rest zero), never
    integrated.  Raises on non-finite state (Riccati blow-up), which can
    occur when concavity-type conditions fail.
    """
    report = validate(params)
    if not report.passed:
        detail = "; ".join(f"{n} (got {v:.6g})" for n, v in report.violations)
        raise ValueError(f"parameters failed validation: {detail}")
    if params.lamT is None or params.T is None:
        raise ValueError("finite-horizon solve requires lamT and T")
    if steps < 10:
        raise ValueError(f"steps must be >= 10 (got {steps})")

    T = params.T
    h = T / steps
    out = np.empty((steps + 1, 6))
    y = (-params.lamT / 2.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    out[steps] = y
    for i in range(steps, 0, -1):
        k1 = _rhs(y, params)
        k2 = _rhs(tuple(v - 0.5 * h * d for v, d in zip(y, k1)), params)
        k3 = _rhs(tuple(v - 0.5 * h * d for v, d in zip(y, k2)), params)
        k4 = _rhs(tuple(v - h * d for v, d in zip(y, k3)), params)
        y = tuple(
            v - (h / 6.0) * (d1 + 2.0 * d2 + 2.0 * d3 + d4)
            for v, d1, d2, d3, d4 in zip(y, k1, k2, k3, k4)
        )
        if not all(math.isfinite(v) for v in y):
            raise RuntimeError(f"Riccati blow-up at t={(i - 1) * h:.6g}")
        out[i - 1] = y

    grid = np.linspace(0.0, T, steps + 1)
    A, B, C, E, F, G = (out[:, j].copy() for j in range(6))
    lam, mu = params.lam, params.mu
    return FHCoefficientPath(
        grid=grid, A=A, B=B, C=C, E=E, F=F, G=G,
        GammaN=(mu * (1.0 - B) + 2.0 * A) / (2.0 * lam),
        GammaD=(B - 2.0 * mu * E) / (2.0 * lam),
        Gamma0=(C - mu * F) / (2.0 * lam),
        step_count=steps,
    )


def _check_time(path: FHCoefficientPath, t: float) -> None:
    if not 0.0 <= t <= path.T:
        raise ValueError(f"time {t} outside [0, {path.T}]")


def feedback_at(path: FHCoefficientPath, t: float):
    """Feedback gains (GN, GD, G0) at time t; linear interpolation, exact at nodes."""
    _check_time(path, t)
    return (
        float(np.interp(t, path.grid, path.GammaN)),
        float(np.interp(t, path.grid, path.GammaD)),
        float(np.interp(t, path.grid, path.Gamma0)),
    )


def optimal_rate_fh(path: FHCoefficientPath, t: float, d: float, n: float) -> float:
    gn, gd, g0 = feedback_at(path, t)
    return gn * n + gd * d + g0


def value_fh(path: FHCoefficientPath, t: float, d: float, n: float) -> float:
    """Evaluate the time-dependent quadratic with interpolated coefficients."""
    _check_time(path, t)
    a, b, c_, e, f, g = (
        float(np.interp(t, path.grid, arr))
        for arr in (path.A, path.B, path.C, path.E, path.F, path.G)
    )
    return a * n * n + b * n * d + c_ * n + e * d * d + f * d + g


def closed_form_B_mu0(t, params: ModelParams):
    """Printed closed form for B at mu = 0: ((q+k)/k)(1 - exp(-k(T-t))).

    This is the solution of B' = -(q+k) + k B alone.  The full n d balance
    keeps a 2 lam GN GD coupling through A even at mu = 0, so the certified
    solver output differs from this formula; the gap is reported in the
    discrepancy ledger rather than patched.
    """
    if params.mu != 0.0:
        raise ValueError("closed form valid only at mu=0")
    if params.T is None:
        raise ValueError("closed form requires T")
    k, q = params.kappa, params.q
    return (q + k) / k * (1.0 - np.exp(-k * (params.T - np.asarray(t, dtype=float))))


def closed_form_A_mu0_printed(t, params: ModelParams):
    """Printed closed form for A at mu = 0, evaluated exactly as printed.

    At t = T the expression equals -lam phi / lamT, which meets the required
    terminal value -lamT/2 only on the slice lamT^2 = 2 lam phi.  It is a
    diagnostic against the ODE solution, not a source of truth.
    """
    if params.mu != 0.0:
        raise ValueError("closed form valid only at mu=0")
    if params.lamT is None or params.T is None:
        raise ValueError("closed form requires lamT and T")
    lam, phi, lamT = params.lam, params.phi, params.lamT
    root = math.sqrt(lam * phi)
    th = np.tanh(math.sqrt(phi / lam) * (params.T - np.asarray(t, dtype=float)))
    return -root * (root + lamT * th) / (lamT + root * th)


def cc_integral_profile(params: ModelParams, path: FHCoefficientPath) -> np.ndarray:
    """Printed integral formula for C - mu F, by trapezoid on the path grid.

    Uses h(s) = r - k m (1 - B + 2 mu E) and the kernel GN - mu GD + mu k,
    exactly as printed.  The reduction behind it replaces a mu k F coupling
    with mu k (C - mu F), so away from mu = 0 it need not match the coupled
    ODE solve; at mu = 0 it is exact up to quadrature error.
    """
    k, m, mu, r = params.kappa, params.m, params.mu, params.r
    t = path.grid
    dt = t[1] - t[0]
    h_of_s = r - k * m * (1.0 - path.B + 2.0 * mu * path.E)
    kernel = path.GammaN - mu * path.GammaD + mu * k
    # cumulative integral of the kernel from t0 to each node
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (kernel[1:] + kernel[:-1]) * dt)])
    n = len(t)
    out = np.empty(n)
    for i in range(n):
        integrand = h_of_s[i:] * np.exp(cum[i:] - cum[i])
        out[i] = np.trapezoid(integrand, dx=dt)
    return out


def cc_integral_diagnostic(params: ModelParams, path: FHCoefficientPath) -> np.ndarray:
    """Pointwise difference of the printed integral formula against C - mu F."""
    return cc_integral_profile(params, path) - (path.C - params.mu * path.F)
