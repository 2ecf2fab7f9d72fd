"""Command-line entry point.

Subcommands: validate | solve-ih | solve-fh | simulate | mc | verify |
plot-gamma | reproduce.  Every command takes --config <json>; outputs land
in --out-dir (or the config's out_dir; the ETHENA_CTL_OUT environment
variable overrides both).

Exit codes: 0 success, 1 domain or solver failure, 2 usage/config failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional

import numpy as np

from . import csvio, fh, ih, svgplot, verify
from .params import ModelParams, validate
from .simulate import (
    ConstantRate,
    FiniteHorizon,
    InfiniteHorizon,
    Scaled,
    SimConfig,
    mc_objective,
    simulate_pair,
)

__all__ = ["RunConfig", "load_config", "main", "ConfigError"]


class ConfigError(Exception):
    """Malformed or inconsistent run configuration (maps to exit code 2)."""


@dataclass
class RunConfig:
    model: ModelParams
    sim: SimConfig
    fh_steps: int = 1000
    out_dir: str = "out"
    emit_plots: bool = True
    verify_tolerances: Dict[str, float] = field(default_factory=dict)


_TOP_KEYS = {"model", "sim", "fh_steps", "out_dir", "emit_plots", "verify_tolerances"}
_SIM_KEYS = {"dt", "steps", "seed", "n_paths"}


def load_config(path) -> RunConfig:
    try:
        with open(path) as fp:
            raw = json.load(fp)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc

    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = sorted(set(raw) - _TOP_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    if "model" not in raw:
        raise ConfigError("config is missing the 'model' object")

    try:
        model = ModelParams.from_mapping(raw["model"])
    except (KeyError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc

    sim_raw = dict(raw.get("sim", {}))
    unknown = sorted(set(sim_raw) - _SIM_KEYS)
    if unknown:
        raise ConfigError(f"unknown sim keys: {', '.join(unknown)}")
    dt = float(sim_raw.get("dt", 0.001))
    if "steps" in sim_raw:
        steps = int(sim_raw["steps"])
    elif model.T is not None:
        steps = round(model.T / dt)
    else:
        steps = 1000
    try:
        sim = SimConfig(
            dt=dt,
            steps=steps,
            seed=int(sim_raw.get("seed", 42)),
            n_paths=int(sim_raw.get("n_paths", 10_000)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    fh_steps = int(raw.get("fh_steps", 1000))
    if fh_steps < 10:
        raise ConfigError(f"fh_steps must be >= 10 (got {fh_steps})")
    tolerances = raw.get("verify_tolerances", {})
    if not isinstance(tolerances, dict):
        raise ConfigError("verify_tolerances must be an object of check-name -> tolerance")
    return RunConfig(
        model=model,
        sim=sim,
        fh_steps=fh_steps,
        out_dir=str(raw.get("out_dir", "out")),
        emit_plots=bool(raw.get("emit_plots", True)),
        verify_tolerances={str(k): float(v) for k, v in tolerances.items()},
    )


def _apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    sim = config.sim
    if args.seed is not None:
        sim = dataclasses.replace(sim, seed=args.seed)
    if args.paths is not None:
        sim = dataclasses.replace(sim, n_paths=args.paths)
    fh_steps = config.fh_steps
    if args.steps is not None:
        # --steps drives the grid of the invoked command: the coefficient
        # grid for solve-fh/plot-gamma/verify, the simulation grid otherwise
        if args.command in ("simulate", "mc"):
            sim = dataclasses.replace(sim, steps=args.steps)
        else:
            fh_steps = args.steps
    out_dir = os.environ.get("ETHENA_CTL_OUT") or args.out_dir or config.out_dir
    emit_plots = config.emit_plots and not args.no_plots
    return dataclasses.replace(config, sim=sim, fh_steps=fh_steps, out_dir=out_dir, emit_plots=emit_plots)


def _out_dir(config: RunConfig) -> Path:
    path = Path(config.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _require_fh_fields(config: RunConfig) -> None:
    if config.model.lamT is None or config.model.T is None:
        raise ConfigError("finite-horizon command requires model.lamT and model.T")


# ---------------------------------------------------------------------------
# commands

def cmd_validate(config: RunConfig) -> int:
    report = validate(config.model)
    print(report)
    return 0 if report.passed else 1


def cmd_solve_ih(config: RunConfig) -> int:
    solution = ih.solve_ih(config.model)
    moments = None
    if solution.stable:
        moments = ih.stationary_moments(solution, config.model)
    out = _out_dir(config) / "ih_solution.csv"
    csvio.write_ih_solution_csv(out, solution, config.model, moments)
    fb = solution.feedback
    print(f"wrote {out} (gamma_N={fb.gamma_N:.6g}, gamma_D={fb.gamma_D:.6g}, gamma_0={fb.gamma_0:.6g})")
    return 0


def _solve_fh(config: RunConfig):
    _require_fh_fields(config)
    return fh.integrate_backward(config.model, config.fh_steps)


def cmd_solve_fh(config: RunConfig) -> int:
    path = _solve_fh(config)
    cc_integral = fh.cc_integral_profile(config.model, path)
    a_closed = fh.closed_form_A_mu0_printed(path.grid, config.model) if config.model.mu == 0.0 else None
    out = _out_dir(config) / "fh_coefficients.csv"
    csvio.write_fh_coefficients_csv(out, path, config.model, cc_integral, a_closed)
    print(f"wrote {out} ({path.step_count} steps, GammaN(T)={path.GammaN[-1]:.6g})")
    return 0


def _require_exact_grid(config: RunConfig) -> None:
    from .simulate import grid_covers_horizon

    if not grid_covers_horizon(config.sim, config.model.T):
        raise ConfigError(
            f"sim.steps * sim.dt must equal model.T exactly "
            f"(got {config.sim.steps} * {config.sim.dt} vs T = {config.model.T})"
        )


def cmd_simulate(config: RunConfig) -> int:
    _require_fh_fields(config)
    _require_exact_grid(config)
    solution = ih.solve_ih(config.model)
    path = _solve_fh(config)
    rec_ih, rec_fh = simulate_pair(config.model, solution.feedback, path, config.sim)
    out = _out_dir(config)
    csvio.write_paths_csv(out / "paths.csv", rec_ih, rec_fh)
    print(f"wrote {out / 'paths.csv'} ({config.sim.steps} steps, seed {config.sim.seed})")
    if config.emit_plots:
        panels = [
            ("fig2_D.svg", rec_fh.D, rec_ih.D, "basis D", "D"),
            ("fig2_N.svg", rec_fh.N, rec_ih.N, "position N", "N"),
            ("fig2_X.svg", rec_fh.X, rec_ih.X, "net wealth X", "X"),
        ]
        for name, fh_series, ih_series, title, ylabel in panels:
            svgplot.write_svg(
                out / name,
                [
                    svgplot.SOLID_RED(rec_fh.t, fh_series, "finite horizon"),
                    svgplot.DASHED_BLUE(rec_ih.t, ih_series, "infinite horizon"),
                ],
                f"one sample path: {title}", "t", ylabel,
            )
            print(f"wrote {out / name}")
    return 0


def cmd_mc(config: RunConfig) -> int:
    _require_fh_fields(config)
    _require_exact_grid(config)
    solution = ih.solve_ih(config.model)
    path = _solve_fh(config)
    model = config.model
    optimal = FiniteHorizon(path)
    analytic_fh = fh.value_fh(path, 0.0, model.d0, model.n0)
    rows = []
    for label, policy in [
        ("fh_optimal", optimal),
        ("fh_scaled_0.5", Scaled(optimal, 0.5)),
        ("fh_scaled_0.8", Scaled(optimal, 0.8)),
        ("fh_scaled_1.2", Scaled(optimal, 1.2)),
        ("fh_scaled_1.5", Scaled(optimal, 1.5)),
        ("zero_rate", ConstantRate(0.0)),
    ]:
        est, se = mc_objective(model, policy, config.sim, "fh")
        rows.append(dict(policy_label=label, horizon_kind="fh", n_paths=config.sim.n_paths,
                         estimate=est, std_error=se,
                         analytic_value=analytic_fh if label == "fh_optimal" else None))
    # quick truncated infinite-horizon estimate on a reduced path budget
    ih_paths = min(config.sim.n_paths, 200)
    horizon = 5.0 / model.rho
    ih_steps = max(1, round(horizon / config.sim.dt))
    ih_cfg = SimConfig(dt=config.sim.dt, steps=ih_steps, seed=config.sim.seed, n_paths=ih_paths)
    est, se = mc_objective(model, InfiniteHorizon(solution.feedback), ih_cfg, "ih")
    rows.append(dict(policy_label="ih_optimal_truncated", horizon_kind="ih", n_paths=ih_paths,
                     estimate=est, std_error=se,
                     analytic_value=ih.value_ih(model.d0, model.n0, solution.coefficients)))
    out = _out_dir(config) / "mc_objective.csv"
    csvio.write_mc_csv(out, rows)
    print(f"wrote {out} ({len(rows)} policies)")
    return 0


def cmd_verify(config: RunConfig) -> int:
    _require_fh_fields(config)
    _require_exact_grid(config)
    solution = ih.solve_ih(config.model)
    path = _solve_fh(config)
    reports = verify.run_battery(config.model, solution, path, config.sim,
                                 tolerance_overrides=config.verify_tolerances)
    entries = verify.build_discrepancy_ledger(config.model, solution, path)
    out = _out_dir(config)
    csvio.write_residuals_csv(out / "residuals.csv", reports)
    csvio.write_discrepancy_csv(out / "discrepancy_ledger.csv", entries)
    failed = [r for r in reports if not r.passed]
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.check_name}: "
              f"{r.max_abs_residual:.3e} (tol {r.tolerance:.3e})")
    print(f"wrote {out / 'residuals.csv'} and {out / 'discrepancy_ledger.csv'}")
    return 0 if not failed else 1


def cmd_plot_gamma(config: RunConfig) -> int:
    _require_fh_fields(config)
    solution = ih.solve_ih(config.model)
    path = _solve_fh(config)
    fb = solution.feedback
    out = _out_dir(config)
    t = path.grid
    flat = np.ones_like(t)
    rows = zip(t, path.Gamma0, path.GammaN, path.GammaD)
    with open(out / "fig1_gamma.csv", "w", newline="") as fp:
        fp.write("t,Gamma_0,Gamma_N,Gamma_D,gamma_0_ih,gamma_N_ih,gamma_D_ih\n")
        for ti, g0, gn, gd in rows:
            fp.write(",".join([csvio.fmt(ti), csvio.fmt(g0), csvio.fmt(gn), csvio.fmt(gd),
                               csvio.fmt(fb.gamma_0), csvio.fmt(fb.gamma_N), csvio.fmt(fb.gamma_D)]) + "\n")
    print(f"wrote {out / 'fig1_gamma.csv'}")
    if config.emit_plots:
        panels = [
            ("fig1_gamma0.svg", path.Gamma0, fb.gamma_0, "baseline accumulation gain"),
            ("fig1_gammaN.svg", path.GammaN, fb.gamma_N, "position feedback gain"),
            ("fig1_gammaD.svg", path.GammaD, fb.gamma_D, "basis feedback gain"),
        ]
        for name, series, constant, title in panels:
            svgplot.write_svg(
                out / name,
                [
                    svgplot.SOLID_RED(t, series, "finite horizon"),
                    svgplot.DASHED_BLUE(t, constant * flat, "infinite horizon"),
                ],
                title, "t", "feedback gain",
            )
            print(f"wrote {out / name}")
    return 0


def cmd_reproduce(config: RunConfig) -> int:
    status = 0
    for step in (cmd_solve_ih, cmd_solve_fh, cmd_plot_gamma, cmd_simulate, cmd_verify):
        code = step(config)
        status = max(status, code)
    return status


_COMMANDS = {
    "validate": cmd_validate,
    "solve-ih": cmd_solve_ih,
    "solve-fh": cmd_solve_fh,
    "simulate": cmd_simulate,
    "mc": cmd_mc,
    "verify": cmd_verify,
    "plot-gamma": cmd_plot_gamma,
    "reproduce": cmd_reproduce,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ethena-ctl",
        description="optimal accumulation control for the delta-neutral carry strategy",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="path to JSON run configuration")
        cmd.add_argument("--out-dir", default=None, help="output directory (ETHENA_CTL_OUT overrides)")
        cmd.add_argument("--seed", type=int, default=None, help="override sim.seed")
        cmd.add_argument("--steps", type=int, default=None, help="override the command's step count")
        cmd.add_argument("--paths", type=int, default=None, help="override sim.n_paths")
        cmd.add_argument("--no-plots", action="store_true", help="suppress SVG output")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _apply_overrides(load_config(args.config), args)
        return _COMMANDS[args.command](config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
