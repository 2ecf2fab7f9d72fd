"""Numpy fallback for the Euler-Maruyama stepping kernels.

Both kernels advance a batch of paths through the explicit scheme with the
same update order as the single-path recursion: the rate and all drift
terms use the pre-update state, then D, N (and X) advance together.  The
compiled extension in ``_kernels.pyx`` implements identical arithmetic; the
per-element operations are the same IEEE sequences, so the two backends
agree to rounding.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def simulate_batch(d0, n0, x0, dt, kappa, m, mu, lam, q, r, c, gn, gd, g0, dw):
    """Advance P paths over S steps; returns (D, N, X, gamma) path arrays.

    gn, gd, g0 are per-step affine policy coefficients (length S);
    dw is the (P, S) matrix of Brownian increments.
    """
    dw = np.ascontiguousarray(dw, dtype=float)
    n_paths, steps = dw.shape
    D = np.empty((n_paths, steps + 1))
    N = np.empty((n_paths, steps + 1))
    X = np.empty((n_paths, steps + 1))
    G = np.empty((n_paths, steps))
    D[:, 0] = d0
    N[:, 0] = n0
    X[:, 0] = x0
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(steps):
            d, n, w = D[:, i], N[:, i], dw[:, i]
            g = gn[i] * n + gd[i] * d + g0[i]
            G[:, i] = g
            X[:, i + 1] = X[:, i] + ((q + kappa) * d - kappa * m + r + mu * g) * n * dt - lam * g * g * dt - c * n * w
            D[:, i + 1] = d + (-kappa * (d - m) - mu * g) * dt + c * w
            N[:, i + 1] = n + g * dt
            if not (np.isfinite(D[:, i + 1]).all() and np.isfinite(X[:, i + 1]).all()):
                raise RuntimeError(f"simulation diverged at step {i}")
    return D, N, X, G


def objective_batch(d0, n0, dt, kappa, m, mu, lam, q, r, phi, c, gn, gd, g0, weights, terminal_coeff, dw):
    """Accumulate the running objective per path without storing paths.

    weights[i] multiplies the step-i integrand (it already contains dt and
    any discount factor); terminal_coeff multiplies the final N^2.
    Returns the (P,) vector of realized objectives.
    """
    dw = np.ascontiguousarray(dw, dtype=float)
    n_paths, steps = dw.shape
    D = np.full(n_paths, float(d0))
    N = np.full(n_paths, float(n0))
    J = np.zeros(n_paths)
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(steps):
            g = gn[i] * N + gd[i] * D + g0[i]
            J += weights[i] * (((q + kappa) * D - kappa * m + r + mu * g) * N - lam * g * g - phi * N * N)
            D = D + (-kappa * (D - m) - mu * g) * dt + c * dw[:, i]
            N = N + g * dt
            if not np.isfinite(D).all():
                raise RuntimeError(f"simulation diverged at step {i}")
        J += terminal_coeff * N * N
    return J
