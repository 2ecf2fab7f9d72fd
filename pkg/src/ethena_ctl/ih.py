"""Infinite-horizon quadratic value function and linear feedback policy.

With a quadratic ansatz

    V(d, n) = a1 n^2 + a2 n d + a3 n + a4 d^2 + a5 d + a6

the stationary dynamic-programming equation

    rho V = [(q+k)d - k m + r] n - phi n^2 - k(d-m) dV/dd
            + (mu n - mu dV/dd + dV/dn)^2 / (4 lam) + (c^2/2) d2V/dd2

collects, monomial by monomial, into a cascade of scalar equations:

    n^2:   rho a1        = -phi + lam gN^2
    n d:   (rho+k) a2    = (q+k) + 2 lam gN gD
    n:     rho a3        = r - k m + k m a2 + gN (a3 - mu a5)
    d^2:   (rho+2k) a4   = lam gD^2
    d:     (rho+k) a5    = 2 k m a4 + gD (a3 - mu a5)
    1:     rho a6        = lam g0^2 + c^2 a4 + k m a5

with feedback gains gN = (mu(1-a2) + 2 a1)/(2 lam), gD = (a2 - 2 mu a4)/(2 lam),
g0 = (a3 - mu a5)/(2 lam), and the optimal rate gamma* = gN N + gD D + g0.
a1 and a4 are admissible roots of quadratics in the single unknown a2, which
solves a scalar fixed-point equation; the linear terms then follow from a
2x2 solve and a6 from direct substitution.  Every equation above is certified
downstream by substituting V back into the dynamic-programming equation and
checking the residual on a grid (see verify.hjb_residual_ih).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.optimize import brentq

from .params import ModelParams, validate

__all__ = [
    "IHCoefficients",
    "IHFeedback",
    "IHSolution",
    "concavity_margin",
    "alpha1_root",
    "alpha4_root",
    "alpha2_fixed_point_map",
    "solve_alpha2",
    "solve_alpha2_bracketed",
    "solve_linear_terms",
    "alpha6",
    "feedback_from_coefficients",
    "solve_ih",
    "optimal_rate_ih",
    "value_ih",
    "drift_matrix",
    "closed_loop_intercept",
    "stationary_moments",
    "coefficient_equation_residuals",
]


@dataclass(frozen=True)
class IHCoefficients:
    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float
    alpha5: float
    alpha6: float


@dataclass(frozen=True)
class IHFeedback:
    gamma_N: float
    gamma_D: float
    gamma_0: float
    c_lin: float  # a3 - mu a5 = 2 lam gamma_0


@dataclass(frozen=True)
class IHSolution:
    coefficients: IHCoefficients
    feedback: IHFeedback
    iterations: int
    fixedpoint_residual: float
    concavity_margin: float
    paper_C_formula: float
    drift_matrix: Tuple[Tuple[float, float], Tuple[float, float]]
    eigen_real_parts: Tuple[float, float]
    stable: bool


def concavity_margin(alpha2: float, params: ModelParams) -> float:
    """4 lam phi - mu^2 (1 - a2)^2; positive margin makes V strictly concave in n."""
    return 4.0 * params.lam * params.phi - (params.mu * (1.0 - alpha2)) ** 2


def _alpha1_minus_root(alpha2: float, params: ModelParams) -> float:
    # minus branch of  4 a1^2 + [4 mu(1-a2) - 4 lam rho] a1 + mu^2(1-a2)^2 - 4 lam phi = 0,
    # in the conjugate form that avoids cancellation when x > 0
    x = params.lam * params.rho - params.mu * (1.0 - alpha2)
    margin = concavity_margin(alpha2, params)
    disc = x * x + margin
    if disc < 0.0:
        raise RuntimeError(f"alpha1 root complex (discriminant = {disc:.6g})")
    if x <= 0.0:
        return 0.5 * (x - math.sqrt(disc))
    return -0.5 * margin / (x + math.sqrt(disc))


def alpha1_root(alpha2: float, params: ModelParams) -> float:
    """Admissible (negative) root of the n^2 coefficient equation.

    Requires a strictly positive concavity margin; otherwise no negative
    root exists and the value function would fail to be concave in n.
    """
    margin = concavity_margin(alpha2, params)
    if margin <= 0.0:
        raise ValueError(f"concavity violated (margin = {margin:.6g} <= 0)")
    root = _alpha1_minus_root(alpha2, params)
    # residual check: minus branch of a positive-margin quadratic is negative
    assert root < 0.0
    return root


def _alpha4_minus_root(alpha2: float, params: ModelParams) -> float:
    # minus branch of  4 mu^2 a4^2 - (4 mu a2 + 4 lam k2) a4 + a2^2 = 0,  k2 = rho + 2 kappa.
    # Conjugate form a2^2 / (2 (s + sqrt(disc))): cancellation-free in mu and
    # continuous through the degenerate linear case 4 lam k2 a4 = a2^2 at mu = 0.
    k2 = params.rho + 2.0 * params.kappa
    lk = params.lam * k2
    disc = lk * (lk + 2.0 * params.mu * alpha2)
    if disc < 0.0:
        raise RuntimeError(f"alpha4 root complex (discriminant = {disc:.6g})")
    s = params.mu * alpha2 + lk
    return alpha2 * alpha2 / (2.0 * (s + math.sqrt(disc)))


def alpha4_root(alpha2: float, params: ModelParams) -> float:
    """Admissible (nonnegative) root of the d^2 coefficient equation.

    The d^2 balance is (rho + 2 kappa) a4 = lam gD^2: the c^2 diffusion term
    is constant for a quadratic ansatz and belongs to the constant equation
    only, so the decay coefficient here is rho + 2 kappa, not the stability
    statistic kappa_star.  The substitution residual certifies the choice.
    """
    return _alpha4_minus_root(alpha2, params)


def alpha2_fixed_point_map(alpha2: float, params: ModelParams) -> float:
    """One application of the fixed-point map G for the n d coefficient.

    G(a2) = [(q+k) + (mu(1-a2) + 2 a1(a2)) (a2 - 2 mu a4(a2)) / (2 lam)] / (rho+k).
    Roots are taken straight from the formulas here; admissibility (sign and
    concavity) is enforced only at the converged point, since intermediate
    iterates may transit regions where the admissible root does not exist.
    """
    a1 = _alpha1_minus_root(alpha2, params)
    a4 = _alpha4_minus_root(alpha2, params)
    coupling = (params.mu * (1.0 - alpha2) + 2.0 * a1) * (alpha2 - 2.0 * params.mu * a4) / (2.0 * params.lam)
    return ((params.q + params.kappa) + coupling) / (params.rho + params.kappa)


def solve_alpha2(
    params: ModelParams,
    damping: float = 0.5,
    tol: float = 1e-12,
    max_iter: int = 10_000,
) -> Tuple[float, int, float]:
    """Solve the scalar fixed-point equation a2 = G(a2).

    Damped iteration a2 <- (1-w) a2 + w G(a2) from a2 = (q+k)/(rho+k), the
    exact solution when the coupling term vanishes.  On non-convergence,
    falls back to a bracketing root-find on a2 - G(a2).

    Returns (alpha2, iterations, residual |a2 - G(a2)|).
    """
    a2 = (params.q + params.kappa) / (params.rho + params.kappa)
    trace = []
    for it in range(1, max_iter + 1):
        try:
            g = alpha2_fixed_point_map(a2, params)
        except RuntimeError:
            break  # iterate left the real-root domain; fall back to bracketing
        residual = abs(a2 - g)
        trace.append(a2)
        if residual <= tol:
            return a2, it, residual
        a2 = (1.0 - damping) * a2 + damping * g
    try:
        a2 = solve_alpha2_bracketed(params, tol=tol)
        return a2, max_iter, abs(a2 - alpha2_fixed_point_map(a2, params))
    except (RuntimeError, ValueError) as exc:
        tail = ", ".join(f"{v:.12g}" for v in trace[-10:])
        raise RuntimeError(
            f"alpha2 fixed point diverged ({exc}); last iterates: [{tail}]"
        ) from exc


def solve_alpha2_bracketed(params: ModelParams, tol: float = 1e-12) -> float:
    """Independent route: bracketing root-find of a2 - G(a2) on [0, 2(q+k)/(rho+k)].

    Either endpoint may fall outside the real domain of the root formulas
    (negative discriminants at extreme a2); such an endpoint is shrunk
    toward the initializer until evaluable.
    """
    init = (params.q + params.kappa) / (params.rho + params.kappa)
    lo, hi = 0.0, 2.0 * init

    def f(a2: float) -> float:
        return a2 - alpha2_fixed_point_map(a2, params)

    def evaluable_endpoint(a2: float) -> Tuple[float, float]:
        for _ in range(60):
            try:
                return a2, f(a2)
            except RuntimeError:
                a2 = 0.5 * (a2 + init)
        raise RuntimeError("alpha2 bracketing failed: no evaluable endpoint")

    lo, f_lo = evaluable_endpoint(lo)
    hi, f_hi = evaluable_endpoint(hi)
    if f_lo == 0.0:
        return lo
    if f_lo * f_hi > 0.0:
        raise RuntimeError(
            f"alpha2 bracketing failed: no sign change on [{lo:.6g}, {hi:.6g}] "
            f"(f = {f_lo:.6g}, {f_hi:.6g})"
        )
    return brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)


def solve_linear_terms(
    alpha1: float, alpha2: float, alpha4: float, params: ModelParams
) -> Tuple[float, float, float]:
    """Solve the 2x2 linear system for (a3, a5); returns (a3, a5, c_lin).

    With gN, gD formed from the inputs and C := a3 - mu a5, the n and d
    coefficient balances read

        rho a3   - gN C = r - k m + k m a2
        (rho+k) a5 - gD C = 2 k m a4

    Solved directly in (a3, a5), which is safe at mu = 0 and certified by
    the dynamic-programming residual.  The single-unknown closed form for C
    is computed elsewhere as a diagnostic only (see verify.compare_C_formula).
    """
    k, m, mu, lam, rho = params.kappa, params.m, params.mu, params.lam, params.rho
    gN = (mu * (1.0 - alpha2) + 2.0 * alpha1) / (2.0 * lam)
    gD = (alpha2 - 2.0 * mu * alpha4) / (2.0 * lam)
    a = np.array([[rho - gN, gN * mu], [-gD, (rho + k) + gD * mu]])
    b = np.array([params.r - k * m + k * m * alpha2, 2.0 * k * m * alpha4])
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    scale = max(abs(a).max(), 1.0) ** 2
    if abs(det) < 1e-14 * scale:
        raise RuntimeError(f"linear-term system singular (det = {det:.6g})")
    a3, a5 = np.linalg.solve(a, b)
    return float(a3), float(a5), float(a3 - mu * a5)


def alpha6(alpha4: float, alpha5: float, gamma_0: float, params: ModelParams) -> float:
    """Constant term (lam g0^2 + c^2 a4 + k m a5) / rho."""
    if params.rho == 0.0:
        raise ValueError("infinite-horizon constant undefined at rho=0")
    return (params.lam * gamma_0 ** 2 + params.c ** 2 * alpha4 + params.kappa * params.m * alpha5) / params.rho


def feedback_from_coefficients(coeffs: IHCoefficients, params: ModelParams) -> IHFeedback:
    mu, lam = params.mu, params.lam
    c_lin = coeffs.alpha3 - mu * coeffs.alpha5
    return IHFeedback(
        gamma_N=(mu * (1.0 - coeffs.alpha2) + 2.0 * coeffs.alpha1) / (2.0 * lam),
        gamma_D=(coeffs.alpha2 - 2.0 * mu * coeffs.alpha4) / (2.0 * lam),
        gamma_0=c_lin / (2.0 * lam),
        c_lin=c_lin,
    )


def drift_matrix(feedback: IHFeedback, params: ModelParams) -> np.ndarray:
    """Closed-loop drift matrix of (D, N) under the optimal feedback."""
    k, mu = params.kappa, params.mu
    return np.array([
        [-(k + mu * feedback.gamma_D), -mu * feedback.gamma_N],
        [feedback.gamma_D, feedback.gamma_N],
    ])


def closed_loop_intercept(feedback: IHFeedback, params: ModelParams) -> np.ndarray:
    return np.array([params.kappa * params.m - params.mu * feedback.gamma_0, feedback.gamma_0])


def solve_ih(params: ModelParams) -> IHSolution:
    """Full cascade: a2 fixed point, then a1 and a4, linear terms, constant.

    Raises if validation fails or the converged point is inadmissible.
    Non-negative closed-loop eigenvalue real parts raise a warning flag
    rather than an error: stability is verified, not assumed.
    """
    report = validate(params)
    if not report.passed:
        detail = "; ".join(f"{n} (got {v:.6g})" for n, v in report.violations)
        raise ValueError(f"parameters failed validation: {detail}")

    a2, iterations, residual = solve_alpha2(params)
    a1 = alpha1_root(a2, params)       # enforces concavity at the solution
    a4 = alpha4_root(a2, params)
    a3, a5, c_lin = solve_linear_terms(a1, a2, a4, params)
    coeffs_wo_a6 = IHCoefficients(a1, a2, a3, a4, a5, 0.0)
    fb = feedback_from_coefficients(coeffs_wo_a6, params)
    a6 = alpha6(a4, a5, fb.gamma_0, params)
    coeffs = IHCoefficients(a1, a2, a3, a4, a5, a6)

    denom = params.rho - fb.gamma_N + params.mu * fb.gamma_D
    if abs(denom) < 1e-14:
        printed_C = math.nan
    else:
        printed_C = (params.r + 2.0 * params.kappa * params.m * params.lam * fb.gamma_D) / denom

    mat = drift_matrix(fb, params)
    eig_re = tuple(sorted(np.linalg.eigvals(mat).real))
    stable = all(e < 0.0 for e in eig_re)
    if not stable:
        warnings.warn(
            f"closed-loop drift matrix not stable (eigenvalue real parts {eig_re})",
            RuntimeWarning,
            stacklevel=2,
        )
    return IHSolution(
        coefficients=coeffs,
        feedback=fb,
        iterations=iterations,
        fixedpoint_residual=residual,
        concavity_margin=concavity_margin(a2, params),
        paper_C_formula=printed_C,
        drift_matrix=((mat[0, 0], mat[0, 1]), (mat[1, 0], mat[1, 1])),
        eigen_real_parts=(float(eig_re[0]), float(eig_re[1])),
        stable=stable,
    )


def optimal_rate_ih(d, n, feedback: IHFeedback):
    """Optimal trading rate gamma* = gN n + gD d + g0 (array-friendly)."""
    return feedback.gamma_N * n + feedback.gamma_D * d + feedback.gamma_0


def value_ih(d, n, coeffs: IHCoefficients):
    """Evaluate the quadratic value function (array-friendly)."""
    return (
        coeffs.alpha1 * n * n
        + coeffs.alpha2 * n * d
        + coeffs.alpha3 * n
        + coeffs.alpha4 * d * d
        + coeffs.alpha5 * d
        + coeffs.alpha6
    )


def stationary_moments(solution: IHSolution, params: ModelParams) -> Tuple[np.ndarray, np.ndarray]:
    """Stationary mean and covariance of (D, N) under the optimal feedback.

    The mean solves M z + b = 0; the covariance solves the continuous
    Lyapunov equation M S + S M' + Q = 0 with Q = diag(c^2, 0), written as
    a 3x3 linear system in the distinct entries (S_DD, S_DN, S_NN).
    """
    if not solution.stable:
        raise RuntimeError(
            f"no stationary distribution: eigenvalue real parts {solution.eigen_real_parts}"
        )
    mat = np.asarray(solution.drift_matrix)
    b = closed_loop_intercept(solution.feedback, params)
    mean = np.linalg.solve(mat, -b)

    m11, m12 = mat[0]
    m21, m22 = mat[1]
    lhs = np.array([
        [2.0 * m11, 2.0 * m12, 0.0],
        [m21, m11 + m22, m12],
        [0.0, 2.0 * m21, 2.0 * m22],
    ])
    rhs = np.array([-params.c ** 2, 0.0, 0.0])
    s_dd, s_dn, s_nn = np.linalg.solve(lhs, rhs)
    cov = np.array([[s_dd, s_dn], [s_dn, s_nn]])
    return mean, cov


def coefficient_equation_residuals(coeffs: IHCoefficients, params: ModelParams) -> dict:
    """Residuals of the six collected-coefficient equations.

    Returns name -> (lhs - rhs, |rhs|); the solution contract is
    |lhs - rhs| <= 1e-10 (1 + |rhs|) for every equation.
    """
    rho, k, m, mu, lam, r, q, c, phi = (
        params.rho, params.kappa, params.m, params.mu, params.lam,
        params.r, params.q, params.c, params.phi,
    )
    a1, a2, a3, a4, a5, a6 = (
        coeffs.alpha1, coeffs.alpha2, coeffs.alpha3, coeffs.alpha4, coeffs.alpha5, coeffs.alpha6,
    )
    fb = feedback_from_coefficients(coeffs, params)
    gN, gD, g0, c_lin = fb.gamma_N, fb.gamma_D, fb.gamma_0, fb.c_lin
    pairs = {
        "n2": (rho * a1, -phi + lam * gN * gN),
        "nd": ((rho + k) * a2, (q + k) + 2.0 * lam * gN * gD),
        "n": (rho * a3, r - k * m + k * m * a2 + gN * c_lin),
        "d2": ((rho + 2.0 * k) * a4, lam * gD * gD),
        "d": ((rho + k) * a5, 2.0 * k * m * a4 + gD * c_lin),
        "const": (rho * a6, lam * g0 * g0 + c * c * a4 + k * m * a5),
    }
    return {name: (lhs - rhs, abs(rhs)) for name, (lhs, rhs) in pairs.items()}
