"""CSV emission with 17-significant-digit decimal rendering.

17 significant digits round-trip IEEE doubles exactly, so files are
byte-stable across runs and still diff cleanly.
"""

from __future__ import annotations

import csv
import math
from typing import List, Optional, Sequence

import numpy as np

from .fh import FHCoefficientPath
from .ih import IHSolution
from .params import ModelParams
from .simulate import PathRecord
from .verify import DiscrepancyEntry, ResidualReport

__all__ = [
    "fmt",
    "write_ih_solution_csv",
    "write_fh_coefficients_csv",
    "write_paths_csv",
    "write_mc_csv",
    "write_residuals_csv",
    "write_discrepancy_csv",
]

IH_COLUMNS = [
    "alpha1", "alpha2", "alpha3", "alpha4", "alpha5", "alpha6",
    "gamma_N", "gamma_D", "gamma_0", "c_lin", "paper_C_formula", "kappa_star",
    "eig_re_1", "eig_re_2",
    "stat_mean_D", "stat_mean_N", "stat_var_D", "stat_var_N", "stat_cov_DN",
    "fixedpoint_residual", "iterations",
]

FH_COLUMNS = [
    "t", "A", "B", "C", "E", "F", "G",
    "Gamma_N", "Gamma_D", "Gamma_0", "cc_ode", "cc_integral", "A_closed_form_mu0",
]

PATHS_COLUMNS = ["t", "D_ih", "N_ih", "X_ih", "gamma_ih", "D_fh", "N_fh", "X_fh", "gamma_fh"]

MC_COLUMNS = ["policy_label", "horizon_kind", "n_paths", "estimate", "std_error", "analytic_value"]

RESIDUALS_COLUMNS = ["check_name", "max_abs_residual", "tolerance", "passed", "grid_spec", "notes"]

DISCREPANCY_COLUMNS = ["formula", "printed_value_or_profile", "certified_value", "gap"]


def fmt(value) -> str:
    """Render a scalar to 17 significant digits; empty cell for missing."""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    return f"{v:.17g}"


def _write(path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_ih_solution_csv(path, solution: IHSolution, params: ModelParams,
                          moments: Optional[tuple] = None) -> None:
    co, fb = solution.coefficients, solution.feedback
    if moments is not None:
        mean, cov = moments
        stat = [mean[0], mean[1], cov[0, 0], cov[1, 1], cov[0, 1]]
    else:
        stat = [None] * 5
    row = [
        co.alpha1, co.alpha2, co.alpha3, co.alpha4, co.alpha5, co.alpha6,
        fb.gamma_N, fb.gamma_D, fb.gamma_0, fb.c_lin, solution.paper_C_formula,
        params.kappa_star,
        solution.eigen_real_parts[0], solution.eigen_real_parts[1],
        *stat,
        solution.fixedpoint_residual, solution.iterations,
    ]
    _write(path, IH_COLUMNS, [[fmt(v) for v in row]])


def write_fh_coefficients_csv(path, fh_path: FHCoefficientPath, params: ModelParams,
                              cc_integral: np.ndarray,
                              a_closed_form: Optional[np.ndarray]) -> None:
    cc_ode = fh_path.C - params.mu * fh_path.F
    rows = []
    for i, t in enumerate(fh_path.grid):
        rows.append([
            fmt(t), fmt(fh_path.A[i]), fmt(fh_path.B[i]), fmt(fh_path.C[i]),
            fmt(fh_path.E[i]), fmt(fh_path.F[i]), fmt(fh_path.G[i]),
            fmt(fh_path.GammaN[i]), fmt(fh_path.GammaD[i]), fmt(fh_path.Gamma0[i]),
            fmt(cc_ode[i]), fmt(cc_integral[i]),
            fmt(a_closed_form[i]) if a_closed_form is not None else "",
        ])
    _write(path, FH_COLUMNS, rows)


def write_paths_csv(path, rec_ih: PathRecord, rec_fh: PathRecord) -> None:
    rows = []
    steps = len(rec_ih.gamma)
    for i in range(steps + 1):
        rows.append([
            fmt(rec_ih.t[i]),
            fmt(rec_ih.D[i]), fmt(rec_ih.N[i]), fmt(rec_ih.X[i]),
            fmt(rec_ih.gamma[i]) if i < steps else "",
            fmt(rec_fh.D[i]), fmt(rec_fh.N[i]), fmt(rec_fh.X[i]),
            fmt(rec_fh.gamma[i]) if i < steps else "",
        ])
    _write(path, PATHS_COLUMNS, rows)


def write_mc_csv(path, rows: List[dict]) -> None:
    out = []
    for row in rows:
        out.append([
            row["policy_label"], row["horizon_kind"], str(row["n_paths"]),
            fmt(row["estimate"]), fmt(row["std_error"]), fmt(row.get("analytic_value")),
        ])
    _write(path, MC_COLUMNS, out)


def write_residuals_csv(path, reports: List[ResidualReport]) -> None:
    rows = [
        [r.check_name, fmt(r.max_abs_residual), fmt(r.tolerance),
         "true" if r.passed else "false", r.grid_spec, r.notes]
        for r in reports
    ]
    _write(path, RESIDUALS_COLUMNS, rows)


def write_discrepancy_csv(path, entries: List[DiscrepancyEntry]) -> None:
    rows = [
        [e.formula, fmt(e.printed_value_or_profile), fmt(e.certified_value), fmt(e.gap)]
        for e in entries
    ]
    _write(path, DISCREPANCY_COLUMNS, rows)
