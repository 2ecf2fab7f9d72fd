# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Euler-Maruyama stepping kernels.

Same arithmetic and update order as ``_kernels_py``; the inner loops run
over (path, step) with typed memoryviews.
"""

import numpy as np

from libc.math cimport isfinite

BACKEND_NAME = "compiled"


def simulate_batch(double d0, double n0, double x0, double dt,
                   double kappa, double m, double mu, double lam,
                   double q, double r, double c,
                   double[::1] gn, double[::1] gd, double[::1] g0,
                   double[:, ::1] dw):
    """Advance P paths over S steps; returns (D, N, X, gamma) path arrays."""
    cdef Py_ssize_t n_paths = dw.shape[0]
    cdef Py_ssize_t steps = dw.shape[1]
    D_arr = np.empty((n_paths, steps + 1))
    N_arr = np.empty((n_paths, steps + 1))
    X_arr = np.empty((n_paths, steps + 1))
    G_arr = np.empty((n_paths, steps))
    cdef double[:, ::1] D = D_arr
    cdef double[:, ::1] N = N_arr
    cdef double[:, ::1] X = X_arr
    cdef double[:, ::1] G = G_arr
    cdef Py_ssize_t p, i
    cdef double d, n, x, g, w
    for p in range(n_paths):
        d = d0
        n = n0
        x = x0
        D[p, 0] = d
        N[p, 0] = n
        X[p, 0] = x
        for i in range(steps):
            w = dw[p, i]
            g = gn[i] * n + gd[i] * d + g0[i]
            G[p, i] = g
            x = x + ((q + kappa) * d - kappa * m + r + mu * g) * n * dt - lam * g * g * dt - c * n * w
            d = d + (-kappa * (d - m) - mu * g) * dt + c * w
            n = n + g * dt
            if not (isfinite(d) and isfinite(x)):
                raise RuntimeError(f"simulation diverged at step {i}")
            D[p, i + 1] = d
            N[p, i + 1] = n
            X[p, i + 1] = x
    return D_arr, N_arr, X_arr, G_arr


def objective_batch(double d0, double n0, double dt,
                    double kappa, double m, double mu, double lam,
                    double q, double r, double phi, double c,
                    double[::1] gn, double[::1] gd, double[::1] g0,
                    double[::1] weights, double terminal_coeff,
                    double[:, ::1] dw):
    """Accumulate the running objective per path without storing paths."""
    cdef Py_ssize_t n_paths = dw.shape[0]
    cdef Py_ssize_t steps = dw.shape[1]
    J_arr = np.zeros(n_paths)
    cdef double[::1] J = J_arr
    cdef Py_ssize_t p, i
    cdef double d, n, g, acc
    for p in range(n_paths):
        d = d0
        n = n0
        acc = 0.0
        for i in range(steps):
            g = gn[i] * n + gd[i] * d + g0[i]
            acc = acc + weights[i] * (((q + kappa) * d - kappa * m + r + mu * g) * n - lam * g * g - phi * n * n)
            d = d + (-kappa * (d - m) - mu * g) * dt + c * dw[p, i]
            n = n + g * dt
            if not isfinite(d):
                raise RuntimeError(f"simulation diverged at step {i}")
        J[p] = acc + terminal_coeff * n * n
    return J_arr
