"""Acceptance gate: one test per criterion clause, each printing PASS/FAIL.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the line-per-
criterion summary.  Two clauses fail by design: they assert printed
closed-form shortcuts that are inconsistent with the residual-certified
solution (quantified in the discrepancy ledger and the project notes);
the failures are kept honest rather than patched around.
"""

import csv
import time

import numpy as np
import pytest

from ethena_ctl import csvio
from ethena_ctl.fh import (
    closed_form_A_mu0_printed,
    closed_form_B_mu0,
    integrate_backward,
)
from ethena_ctl.ih import (
    alpha1_root,
    solve_alpha2,
    solve_alpha2_bracketed,
    solve_ih,
)
from ethena_ctl.params import validate
from ethena_ctl.simulate import (
    FiniteHorizon,
    InfiniteHorizon,
    SimConfig,
    simulate_pair,
    simulate_path,
)
from ethena_ctl.verify import (
    build_discrepancy_ledger,
    closed_loop_reference,
    coefficient_residuals_ih,
    convergence_to_stationary,
    hjb_residual_fh,
    hjb_residual_ih,
    mc_value_consistency,
)

from conftest import make_reference_params


def report(criterion: str, ok: bool, detail: str = "") -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else ""))


class TestCriterion01ParameterGate:
    def test_validation_and_runtime(self, reference_params):
        validate(reference_params)  # warm up
        t0 = time.perf_counter()
        result = validate(reference_params)
        elapsed = time.perf_counter() - t0
        ok = (
            result.passed
            and abs(result.kappa_star - 4.04) < 1e-12
            and elapsed < 1e-3
        )
        report("01 parameter-gate", ok, f"kappa_star={result.kappa_star}, {elapsed * 1e6:.0f}us")
        assert result.passed
        assert result.kappa_star == pytest.approx(4.04, abs=1e-12)
        assert elapsed < 1e-3


class TestCriterion02InfiniteHorizonCertificate:
    def test_certificate(self, reference_params):
        t0 = time.perf_counter()
        solution = solve_ih(reference_params)
        hjb = hjb_residual_ih(solution, reference_params)
        elapsed = time.perf_counter() - t0
        coeff = coefficient_residuals_ih(solution, reference_params)
        ok = (
            hjb.max_abs_residual <= 1e-8
            and coeff.max_abs_residual <= 1e-10
            and solution.coefficients.alpha1 < 0
            and solution.coefficients.alpha4 >= 0
            and solution.feedback.gamma_D > 0
            and all(e < 0 for e in solution.eigen_real_parts)
            and elapsed < 0.1
        )
        report("02 ih-certificate", ok,
               f"hjb={hjb.max_abs_residual:.2e}, coeff={coeff.max_abs_residual:.2e}, {elapsed * 1e3:.1f}ms")
        assert hjb.max_abs_residual <= 1e-8
        assert coeff.max_abs_residual <= 1e-10
        assert solution.coefficients.alpha1 < 0
        assert solution.coefficients.alpha4 >= 0
        assert solution.feedback.gamma_D > 0
        assert all(e < 0 for e in solution.eigen_real_parts)
        assert elapsed < 0.1


class TestCriterion03Alpha2CrossValidation:
    def test_dual_route_agreement(self, reference_params):
        a2_iter, _, _ = solve_alpha2(reference_params)
        a2_brk = solve_alpha2_bracketed(reference_params)
        gap = abs(a2_iter - a2_brk)
        report("03a alpha2-dual-route", gap <= 1e-10, f"gap={gap:.2e}")
        assert gap <= 1e-10

    def test_mu0_closed_form_sweep(self):
        rng = np.random.Generator(np.random.Philox(key=20240501))
        worst = 0.0
        for _ in range(20):
            p = make_reference_params(
                rho=rng.uniform(0.01, 0.2), kappa=rng.uniform(0.5, 4.0),
                m=rng.uniform(0.01, 0.1), mu1=0.0, mu2=0.0,
                lam1=rng.uniform(0.02, 0.5), lam2=0.0,
                r=rng.uniform(0.01, 0.1), q=rng.uniform(0.5, 6.0),
                c=rng.uniform(0.01, 0.3), phi=rng.uniform(0.05, 2.0),
            )
            a2, _, _ = solve_alpha2(p)
            closed = (p.q + p.kappa) / (p.rho + p.kappa - alpha1_root(a2, p) / p.lam)
            worst = max(worst, abs(a2 - closed))
        report("03b alpha2-mu0-closed-form", worst <= 1e-12, f"worst={worst:.2e}")
        assert worst <= 1e-12


class TestCriterion04FiniteHorizonCertificate:
    def test_certificate(self, reference_params, fh_path_1000, fh_path_2000):
        p = reference_params
        terminal_exact = (
            fh_path_1000.A[-1] == -p.lamT / 2
            and fh_path_1000.B[-1] == 0.0 and fh_path_1000.C[-1] == 0.0
            and fh_path_1000.E[-1] == 0.0 and fh_path_1000.F[-1] == 0.0
            and fh_path_1000.G[-1] == 0.0
        )
        refinement = max(
            float(np.max(np.abs(getattr(fh_path_1000, n) - getattr(fh_path_2000, n)[::2])))
            for n in "ABCEFG"
        )
        t0 = time.perf_counter()
        integrate_backward(p, 2000)
        elapsed = time.perf_counter() - t0
        res_2000 = hjb_residual_fh(fh_path_2000, p).max_abs_residual
        res_4000 = hjb_residual_fh(integrate_backward(p, 4000), p).max_abs_residual
        ok = (
            terminal_exact
            and refinement <= 1e-8
            and res_2000 <= 1e-4
            and res_4000 <= res_2000 / 2.5
            and elapsed < 1.0
        )
        report("04 fh-certificate", ok,
               f"refine={refinement:.2e}, fd={res_2000:.2e}->{res_4000:.2e}, {elapsed * 1e3:.0f}ms")
        assert terminal_exact
        assert refinement <= 1e-8
        assert res_2000 <= 1e-4
        assert res_4000 <= res_2000 / 2.5  # second-order decay
        assert elapsed < 1.0


class TestCriterion05Mu0Oracles:
    def test_position_basis_closed_form(self):
        # printed closed form for the basis-coupling coefficient at mu = 0;
        # the full monomial balance keeps an inventory-gain coupling that the
        # formula omits, so the certified solution cannot reach this bound.
        # Kept honest: the gap is quantified in the discrepancy ledger.
        p = make_reference_params(mu1=0.0, mu2=0.0)
        path = integrate_backward(p, 2000)
        gap = float(np.max(np.abs(path.B - closed_form_B_mu0(path.grid, p))))
        report("05a mu0-B-closed-form", gap <= 1e-8, f"gap={gap:.3e}")
        assert gap <= 1e-8, (
            f"printed mu=0 closed form differs from the certified solve by {gap:.3e}; "
            "the formula drops the inventory-gain coupling (see discrepancy ledger)"
        )

    def test_inventory_coefficient_ode_residual(self):
        # A satisfies its own scalar Riccati equation to FD accuracy at mu = 0
        p = make_reference_params(mu1=0.0, mu2=0.0)
        path = integrate_backward(p, 2000)
        h = path.grid[1] - path.grid[0]
        A = path.A
        fd = (A[2:] - A[:-2]) / (2 * h)
        rhs = p.phi - A[1:-1] ** 2 / p.lam
        residual = np.abs(fd - rhs)
        third = np.abs(A[3:] - 3 * A[2:-1] + 3 * A[1:-2] - A[:-3]) / h**3
        local_scale = np.maximum(np.maximum(third[:-1], third[1:]), 1.0)
        bound = 10.0 * h**2 * local_scale
        ok = bool(np.all(residual[1:-1] <= bound[: len(residual) - 2]))
        report("05b mu0-A-riccati-fd", ok, f"max={residual.max():.2e}")
        assert ok

    def test_printed_inventory_closed_form_terminal_gap(self):
        p = make_reference_params(mu1=0.0, mu2=0.0)
        path = integrate_backward(p, 1000)
        printed_at_T = float(closed_form_A_mu0_printed(p.T, p))
        gap = abs(printed_at_T - path.A[-1])
        expected = abs(-p.lam * p.phi / p.lamT + p.lamT / 2)
        exact = gap == pytest.approx(expected, rel=1e-14)
        # exact agreement recovered on the slice lamT^2 = 2 lam phi
        p_slice = make_reference_params(mu1=0.0, mu2=0.0,
                                        lamT=float(np.sqrt(2 * 0.1 * 0.5)))
        slice_gap = abs(float(closed_form_A_mu0_printed(p_slice.T, p_slice)) + p_slice.lamT / 2)
        ledger = build_discrepancy_ledger(p, solve_ih(p), path)
        logged = any(
            e.formula == "fh_inventory_coefficient_closed_form_mu0"
            and e.gap == pytest.approx(expected, rel=1e-12)
            for e in ledger
        )
        ok = exact and slice_gap < 1e-14 and logged
        report("05c mu0-A-printed-gap", ok, f"gap={gap:.6g} (expected {expected:.6g})")
        assert exact
        assert slice_gap < 1e-14
        assert logged


class TestCriterion06TerminalFeedback:
    def test_terminal_gains(self, reference_params, fh_path_1000):
        p = reference_params
        gn_T = fh_path_1000.GammaN[-1]
        ok = (
            gn_T == (p.mu - p.lamT) / (2 * p.lam)
            and abs(gn_T - (-18.5)) < 1e-12
            and fh_path_1000.GammaD[-1] == 0.0
            and fh_path_1000.Gamma0[-1] == 0.0
        )
        report("06 terminal-feedback", ok, f"GammaN(T)={gn_T}")
        assert gn_T == (p.mu - p.lamT) / (2 * p.lam)
        assert gn_T == pytest.approx(-18.5, abs=1e-12)
        assert fh_path_1000.GammaD[-1] == 0.0
        assert fh_path_1000.Gamma0[-1] == 0.0


@pytest.fixture(scope="module")
def long_runway(ih_solution):
    p = make_reference_params(T=3.0)
    t0 = time.perf_counter()
    path = integrate_backward(p, 3000)
    elapsed = time.perf_counter() - t0
    rep = convergence_to_stationary(path, ih_solution)
    return path, rep, elapsed


class TestCriterion07LongRunwayReproduction:
    def test_position_and_basis_gains_converge(self, long_runway):
        path, rep, elapsed = long_runway
        devs = dict(part.split("=") for part in rep.notes.replace(" ", "").split(","))
        ok = float(devs["GammaN"]) <= 0.10 and float(devs["GammaD"]) <= 0.10 and elapsed < 1.0
        report("07a convergence-GammaN-GammaD", ok,
               f"GammaN dev={devs['GammaN']}, GammaD dev={devs['GammaD']}, {elapsed * 1e3:.0f}ms")
        assert float(devs["GammaN"]) <= 0.10
        assert float(devs["GammaD"]) <= 0.10
        assert elapsed < 1.0

    def test_baseline_gain_converges(self, long_runway):
        # the baseline gain relaxes at the slow closed-loop eigenvalue
        # (about 0.87 here, time constant over one time unit), so halfway
        # through a T=3 horizon it is still far from its stationary value;
        # this bound cannot be met by the certified solution.  Kept honest.
        _, rep, _ = long_runway
        devs = dict(part.split("=") for part in rep.notes.replace(" ", "").split(","))
        dev0 = float(devs["Gamma0"])
        report("07b convergence-Gamma0", dev0 <= 0.10, f"Gamma0 dev={dev0}")
        assert dev0 <= 0.10, (
            f"baseline-gain deviation over the first half is {dev0:.3f}; the linear "
            "coefficient block relaxes at the slow closed-loop rate, so a 10% band "
            "at T=3 is unattainable for it (position/basis gains do satisfy it)"
        )

    def test_liquidation_urgency(self, long_runway):
        path, _, _ = long_runway
        tail = path.grid >= 0.9 * path.T
        decreasing = bool(np.all(np.diff(path.GammaN[tail]) < 0))
        report("07c liquidation-urgency", decreasing)
        assert decreasing


class TestCriterion08PairedSimulation:
    def test_bit_determinism_and_schema(self, reference_params, ih_solution, fh_path_1000, tmp_path):
        cfg = SimConfig(dt=0.001, steps=1000, seed=42)
        rec_a = simulate_pair(reference_params, ih_solution.feedback, fh_path_1000, cfg)
        rec_b = simulate_pair(reference_params, ih_solution.feedback, fh_path_1000, cfg)
        deterministic = all(
            np.array_equal(getattr(rec_a[i], name), getattr(rec_b[i], name))
            for i in (0, 1)
            for name in ("t", "D", "N", "X", "gamma")
        )
        out = tmp_path / "paths.csv"
        csvio.write_paths_csv(out, rec_a[0], rec_a[1])
        with open(out) as fp:
            rows = list(csv.reader(fp))
        schema_ok = rows[0] == csvio.PATHS_COLUMNS and len(rows) == 1 + 1001
        report("08a paired-sim-determinism", deterministic and schema_ok)
        assert deterministic
        assert schema_ok

    def test_noise_free_unwind_comparison(self):
        # c underflows to zero in every c^2 term; dynamics driven noise-free
        p = make_reference_params(c=1e-300)
        sol = solve_ih(p)
        path = integrate_backward(p, 1000)
        zeros = np.zeros(1000)
        rec_ih = simulate_path(p, InfiniteHorizon(sol.feedback), zeros, 1e-3)
        rec_fh = simulate_path(p, FiniteHorizon(path), zeros, 1e-3)
        ok = abs(rec_fh.N[-1]) < abs(rec_ih.N[-1])
        report("08b noise-free-unwind", ok,
               f"|N_T| fh={abs(rec_fh.N[-1]):.4f} < ih={abs(rec_ih.N[-1]):.4f}")
        assert abs(rec_fh.N[-1]) < abs(rec_ih.N[-1])


class TestCriterion09MonteCarloValueConsistency:
    def test_value_and_dominance(self, reference_params, fh_path_1000):
        cfg = SimConfig(dt=0.001, steps=1000, seed=42, n_paths=10_000)
        t0 = time.perf_counter()
        rep = mc_value_consistency(reference_params, fh_path_1000, cfg)
        elapsed = time.perf_counter() - t0
        ok = rep.passed and elapsed < 30.0
        report("09 mc-value-consistency", ok,
               f"stat={rep.max_abs_residual:.3f}x3SE, {elapsed:.1f}s")
        assert rep.passed, rep.notes
        assert elapsed < 30.0


class TestCriterion10EulerConsistency:
    def test_first_order_against_matrix_exponential(self):
        p = make_reference_params(c=1e-300)
        sol = solve_ih(p)
        errs = {}
        for dt in (1e-3, 5e-4):
            steps = round(1.0 / dt)
            rec = simulate_path(p, InfiniteHorizon(sol.feedback), np.zeros(steps), dt,
                                horizon_kind="ih")
            exact = closed_loop_reference(sol, p, rec.t)
            errs[dt] = max(
                float(np.max(np.abs(rec.D - exact[:, 0]))),
                float(np.max(np.abs(rec.N - exact[:, 1]))),
            )
        ratio = errs[1e-3] / errs[5e-4]
        constant = errs[5e-4] / 5e-4
        bound_ok = errs[1e-3] <= 1.3 * constant * 1e-3
        ok = 1.7 <= ratio <= 2.3 and bound_ok
        report("10 euler-consistency", ok, f"ratio={ratio:.3f}, C={constant:.3f}")
        assert 1.7 <= ratio <= 2.3
        assert bound_ok


class TestCriterion11DiscrepancyLedger:
    def test_standing_probes_present(self, reference_params, ih_solution, fh_path_1000):
        entries = build_discrepancy_ledger(reference_params, ih_solution, fh_path_1000)
        formulas = {e.formula for e in entries}
        required = {
            "ih_linear_constant_closed_form",
            "fh_inventory_coefficient_closed_form_mu0",
            "fh_carry_level_scalar_reduction",
        }
        ok = required <= formulas
        report("11 discrepancy-ledger", ok, f"{len(entries)} entries")
        assert required <= formulas
        for e in entries:
            assert np.isfinite(e.gap)
