"""Acceptance suite: one test per criterion, each printing a PASS/FAIL
line (run with ``pytest -s tests/test_acceptance.py`` to see them live).

Every tolerance is pinned here, not configured elsewhere.
"""

import time

import numpy as np
import pytest

from pwlsolve import (
    DiagonalVerdict,
    GenSpec,
    Method,
    SolveOptions,
    SolveStatus,
    ave_to_pwls,
    brute_force_solutions,
    canonical,
    check_cycle,
    diagonal_classify,
    full_fixed_point_map,
    gauss_seidel_fixed_point_map,
    gauss_seidel_newton_step,
    generate,
    jacobi_newton_step,
    kkt_check,
    positive_part,
    pwls_to_ave,
    qp_to_pwls,
    residual,
    sassenfeld,
    solve,
    split_dlu,
    strong_diagonal_dominance,
)
from pwlsolve.bench import performance_profile, run_grid, solved_fraction_at_tau
from pwlsolve.boussinesq import AquiferConfig, initial_state, run_simulation, water_volume
from pwlsolve.transforms import DenseMatrix, QpProblem

from oracles import enumerate_ave_solutions, qp_minimizer_by_enumeration


def _report(num: int, detail: str) -> None:
    print(f"\nACCEPTANCE {num}: PASS - {detail}", flush=True)


def _fail(num: int, detail: str) -> None:
    print(f"\nACCEPTANCE {num}: FAIL - {detail}", flush=True)
    pytest.fail(detail)


def test_criterion_01_counterexample_cycle():
    inst = canonical("spd_3cycle")
    report = solve(inst.problem, "newton", x0=inst.witness[0])
    if report.status is not SolveStatus.CYCLE_DETECTED or report.cycle_length != 3:
        _fail(1, f"expected CycleDetected(3), got {report.status} len={report.cycle_length}")
    if not check_cycle(report.cycle_points, inst.problem, tol=1e-12):
        _fail(1, "detected cycle points violate the cycle equations at 1e-12")
    if not check_cycle(inst.witness, inst.problem, tol=1e-12):
        _fail(1, "stored witnesses violate the cycle equations at 1e-12")
    best = min(
        solve(inst.problem, "newton", x0=inst.witness[0]).wall_time for _ in range(5)
    )
    if best >= 1e-3:
        _fail(1, f"solve took {best * 1e3:.3f} ms >= 1 ms")
    _report(1, f"CycleDetected(3), equations hold at 1e-12, best run {best * 1e6:.0f} us")


def test_criterion_02_diagonal_finite_convergence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(202)
    solvable_checked = 0
    seed = 0
    while solvable_checked < 1000:
        n = int(rng.integers(1, 11))
        p = generate(GenSpec(n=n, kind="diagonal", seed=seed))
        seed += 1
        cls = diagonal_classify(p.T, p.b)
        if cls.verdict is not DiagonalVerdict.SOLUTIONS:
            continue
        solvable_checked += 1
        report = solve(p, "newton", x0=rng.uniform(-5, 5, n))
        if not (report.status is SolveStatus.CONVERGED and report.iterations <= 2):
            _fail(2, f"seed {seed - 1}: {report.status} in {report.iterations} iterations")
        brute = brute_force_solutions(p)
        if len(brute) != 2**cls.r or len(cls.solutions) != 2**cls.r:
            _fail(2, f"seed {seed - 1}: counts differ from 2^r")
        got = np.array(sorted(tuple(s) for s in cls.solutions))
        want = np.array(sorted(tuple(s) for s in brute))
        if np.abs(got - want).max() > 1e-10 * (1.0 + np.abs(p.b).max()):
            _fail(2, f"seed {seed - 1}: solution sets differ")
    mismatches = 0
    for extra in range(1000):
        n = int(rng.integers(1, 11))
        p = generate(GenSpec(n=n, kind="diagonal", seed=10_000 + extra))
        cls = diagonal_classify(p.T, p.b)
        empty = brute_force_solutions(p) == []
        if (cls.verdict is DiagonalVerdict.NO_SOLUTION) != empty:
            mismatches += 1
    elapsed = time.perf_counter() - t0
    if mismatches:
        _fail(2, f"{mismatches} no-solution predicate mismatches")
    if elapsed >= 5.0:
        _fail(2, f"took {elapsed:.1f} s >= 5 s")
    _report(2, f"1000 solvable + 1000 classification checks in {elapsed:.1f} s")


def test_criterion_03_no_solution_example():
    inst = canonical("diagdom_nosolution")
    if brute_force_solutions(inst.problem):
        _fail(3, "brute force found a solution where none exists")
    for i, start in enumerate(inst.witness):
        report = solve(inst.problem, "newton", x0=start)
        if report.status is not SolveStatus.CYCLE_DETECTED or report.cycle_length != 2:
            _fail(3, f"witness {i}: expected CycleDetected(2), got {report.status}")
    for cycle in inst.cycles:
        if not check_cycle(cycle, inst.problem, tol=1e-12):
            _fail(3, "a stored 2-cycle violates its equations at 1e-12")
    _report(3, "no solutions; both 2-cycles detected and verified at 1e-12")


def test_criterion_04_spd_structure_theorems():
    t0 = time.perf_counter()
    rng = np.random.default_rng(404)
    for n in range(2, 7):
        converged = 0
        for trial in range(500):
            p = generate(GenSpec(n=n, kind="spd", seed=n * 10_000 + trial))
            if len(brute_force_solutions(p)) != 1:
                _fail(4, f"n={n} trial={trial}: solution count != 1")
            report = solve(p, "newton", x0=rng.standard_normal(n) * 3)
            if report.status is SolveStatus.CYCLE_DETECTED and report.cycle_length == 2:
                _fail(4, f"n={n} trial={trial}: two-point cycle on SPD data")
            if report.status is SolveStatus.CONVERGED:
                converged += 1
        if n <= 2 and converged != 500:
            _fail(4, f"n={n}: only {converged}/500 converged")
    elapsed = time.perf_counter() - t0
    if elapsed >= 60.0:
        _fail(4, f"took {elapsed:.1f} s >= 60 s")
    _report(4, f"2500 instances: unique solutions, no 2-cycles, n<=2 all converged ({elapsed:.1f} s)")


def test_criterion_05_newton_iteration_bound():
    t0 = time.perf_counter()
    results = {}
    for n in (16, 64, 256):
        fast = 0
        for trial in range(200):
            p = generate(GenSpec(n=n, kind="spd", seed=n * 1000 + trial))
            report = solve(p, "newton")  # x0 = 0
            if report.status is SolveStatus.CONVERGED and report.iterations <= 6:
                fast += 1
        results[n] = fast
        if fast < 0.99 * 200:
            _fail(5, f"n={n}: only {fast}/200 within 6 iterations")
    elapsed = time.perf_counter() - t0
    if elapsed >= 120.0:
        _fail(5, f"took {elapsed:.1f} s >= 120 s")
    _report(5, f"within-6-iterations counts {results} of 200 each ({elapsed:.1f} s)")


def _contraction_run(p, method, xbar, starts_rng, n_starts=5):
    """Manual iteration from random starts measuring the infinity-norm
    error contraction against the certified factor; returns the largest
    quotient excess and the final errors."""
    split = split_dlu(p.T)
    if method == "jacobi-newton":
        step = jacobi_newton_step
        factor = strong_diagonal_dominance(p.T).worst_row_ratio
    else:
        step = gauss_seidel_newton_step
        factor = sassenfeld(p.T).beta
    assert factor < 1.0
    scale = 1.0 + np.abs(xbar).max()
    floor = 1e-10 * scale
    worst_excess = -np.inf
    reached_tolerance = True
    final_errors = []
    for _ in range(n_starts):
        x = starts_rng.uniform(-5.0, 5.0, p.n)
        err = np.abs(x - xbar).max()
        hit = False
        for _ in range(1000):
            x = step(p, split, x)
            new_err = np.abs(x - xbar).max()
            if err > floor:
                worst_excess = max(worst_excess, new_err - factor * err)
            err = new_err
            if not hit and np.linalg.norm(residual(p, x)) <= 1e-5:
                hit = True
            if err <= 0.5 * floor:
                break
        reached_tolerance &= hit
        final_errors.append(err)
    return worst_excess, reached_tolerance, final_errors


def test_criterion_06_sweep_global_convergence():
    rng = np.random.default_rng(606)
    checked = 0
    for kind in ("dense", "sparse"):
        for n in (50, 1000):
            for trial in range(100):
                spec = GenSpec(n=n, kind=kind, seed=trial * 7 + n)
                p = generate(spec)
                newton = solve(p, "newton", opts=SolveOptions(tolerance=1e-10))
                if newton.status is not SolveStatus.CONVERGED:
                    _fail(6, f"{kind} n={n} trial={trial}: Newton reference failed")
                xbar = newton.x
                for method in ("jacobi-newton", "gs-newton"):
                    excess, hit_tol, errors = _contraction_run(p, method, xbar, rng)
                    if excess > 1e-10:
                        _fail(6, f"{kind} n={n} trial={trial} {method}: "
                                 f"contraction exceeded by {excess:.2e}")
                    if not hit_tol:
                        _fail(6, f"{kind} n={n} trial={trial} {method}: ||F|| never <= 1e-5")
                    if n == 50 and max(errors) > 1e-6:
                        _fail(6, f"{kind} n={n} trial={trial} {method}: "
                                 f"limit off Newton by {max(errors):.2e}")
                # the driver agrees on one start per instance
                driver = solve(p, "gs-newton", x0=rng.uniform(-5, 5, n))
                if driver.status is not SolveStatus.CONVERGED:
                    _fail(6, f"{kind} n={n} trial={trial}: driver run failed")
                checked += 1
    _report(6, f"{checked} instances x 2 methods x 5 starts: converged within certified factors")


def test_criterion_07_contraction_oracles():
    rng = np.random.default_rng(707)
    for trial in range(20):
        n = int(rng.integers(2, 9))
        p = generate(GenSpec(n=n, kind="spd", seed=trial))
        xbar = brute_force_solutions(p)
        assert len(xbar) == 1
        x = np.zeros(n)
        for _ in range(5000):
            x_new = full_fixed_point_map(p, x)
            if np.abs(x_new - x).max() <= 1e-14:
                break
            x = x_new
        if np.abs(x - xbar[0]).max() > 1e-8:
            _fail(7, f"full map trial {trial}: off by {np.abs(x - xbar[0]).max():.2e}")
    for trial in range(20):
        n = int(rng.integers(2, 9))
        p = generate(GenSpec(n=n, kind="dense", seed=100 + trial))
        assert sassenfeld(p.T).holds
        xbar = brute_force_solutions(p)
        assert len(xbar) == 1
        split = split_dlu(p.T)
        x = np.zeros(n)
        for _ in range(5000):
            x_new = gauss_seidel_fixed_point_map(p, split, x)
            if np.abs(x_new - x).max() <= 1e-14:
                break
            x = x_new
        if np.abs(x - xbar[0]).max() > 1e-8:
            _fail(7, f"sweep map trial {trial}: off by {np.abs(x - xbar[0]).max():.2e}")
    p = generate(GenSpec(n=8, kind="dense", seed=777))
    beta = sassenfeld(p.T).beta
    split = split_dlu(p.T)
    worst = -np.inf
    for _ in range(10_000):
        x = rng.uniform(-10, 10, 8)
        y = rng.uniform(-10, 10, 8)
        num = np.abs(
            gauss_seidel_fixed_point_map(p, split, x) - gauss_seidel_fixed_point_map(p, split, y)
        ).max()
        worst = max(worst, num - beta * np.abs(x - y).max())
    if worst > 1e-10:
        _fail(7, f"sweep map Lipschitz quotient exceeded beta by {worst:.2e}")
    _report(7, "both fixed-point maps reach the oracle solution; 10^4 Lipschitz quotients under beta")


def test_criterion_08_transforms():
    rng = np.random.default_rng(808)
    for trial in range(100):
        n = int(rng.integers(1, 9))
        p = generate(GenSpec(n=n, kind="spd", seed=trial))
        ave = pwls_to_ave(p)
        back = ave_to_pwls(ave)
        if not np.array_equal(back.b, p.b):
            _fail(8, f"trial {trial}: rhs round trip not exact")
        t0, t1 = p.T.to_dense(), back.T.to_dense()
        if not np.allclose(t1, t0, rtol=3e-16, atol=3e-16):
            _fail(8, f"trial {trial}: matrix round trip beyond one ulp")
        pwls_solutions = brute_force_solutions(p)
        ave_solutions = enumerate_ave_solutions(ave.T_hat.to_dense(), ave.b_hat)
        if len(pwls_solutions) != len(ave_solutions):
            _fail(8, f"trial {trial}: solution counts differ across forms")
        for s in pwls_solutions:
            if not any(np.abs(s - t).max() <= 1e-10 for t in ave_solutions):
                _fail(8, f"trial {trial}: solution sets differ pointwise")
    for trial in range(100):
        n = int(rng.integers(1, 7))
        m = rng.uniform(-1, 1, (n, n))
        q_matrix = m @ m.T / n + 0.2 * np.eye(n)
        if abs(np.linalg.det(q_matrix - np.eye(n))) < 1e-8:
            continue
        qp = QpProblem(DenseMatrix(q_matrix), rng.uniform(-1, 1, n))
        report = solve(qp_to_pwls(qp), "newton")
        z = positive_part(report.x)
        check = kkt_check(qp, z)
        if not check.feasible or check.max_violation > 1e-8:
            _fail(8, f"QP trial {trial}: violation {check.max_violation:.2e}")
        oracle = qp_minimizer_by_enumeration(qp.Q.a, qp.q)
        if np.abs(z - oracle).max() > 1e-8:
            _fail(8, f"QP trial {trial}: minimizer off enumeration by {np.abs(z - oracle).max():.2e}")
    _report(8, "100 AVE equivalences + 100 QP KKT checks against enumeration")


def test_criterion_09_boussinesq_mass_balance():
    t0 = time.perf_counter()
    cfg = AquiferConfig(N=25, days=7)
    results = run_simulation(cfg, "newton")
    v_prev = water_volume(cfg, initial_state(cfg))
    v0 = v_prev
    exact_v0 = 2_000_000.0 * np.pi
    if abs(v0 - exact_v0) / exact_v0 > 0.01:
        _fail(9, f"day-0 volume {v0:,.1f} off 2e6*pi by more than 1%")
    for r in results:
        if r.report.status is not SolveStatus.CONVERGED:
            _fail(9, f"day {r.state.day} did not converge")
        if r.report.iterations > 6:
            _fail(9, f"day {r.state.day} needed {r.report.iterations} Newton iterations")
        drop = v_prev - r.volume
        if abs(drop - 864_000.0) / 864_000.0 > 1e-6:
            _fail(9, f"day {r.state.day}: decrement {drop:,.3f} m^3")
        v_prev = r.volume
    day7 = results[-1].volume
    if abs(day7 - 235_185.3) / 235_185.3 > 0.01:
        _fail(9, f"day-7 volume {day7:,.1f} off 235,185.3 by more than 1%")
    elapsed = time.perf_counter() - t0
    if elapsed >= 120.0:
        _fail(9, f"took {elapsed:.1f} s >= 2 min")
    iters = [r.report.iterations for r in results]
    _report(9, f"V0={v0:,.0f}, day7={day7:,.1f}, iterations {iters}, {elapsed:.1f} s")


def test_criterion_10_performance_profiles():
    t0 = time.perf_counter()
    problems = [
        (f"sparse-{seed}", generate(GenSpec(n=1000, kind="sparse", seed=seed)))
        for seed in range(30)
    ]
    records = run_grid(problems, [m.value for m in Method], repeats=3)
    if not all(r.solved for r in records):
        _fail(10, "some method failed on a strongly dominant sparse instance")
    curves = {c.method: c for c in performance_profile(records)}
    for curve in curves.values():
        rhos = [rho for _, rho in curve.points]
        if any(b < a for a, b in zip(rhos, rhos[1:])) or not all(0 <= r <= 1 for r in rhos):
            _fail(10, f"{curve.method}: profile not monotone in [0,1]")
        solved = sum(1 for r in records if r.method == curve.method and r.solved)
        if abs(rhos[-1] - solved / 30) > 1e-12:
            _fail(10, f"{curve.method}: terminal rho != solved fraction")
    gs = solved_fraction_at_tau(curves["gs-newton"], 0.0)
    newton = solved_fraction_at_tau(curves["newton"], 0.0)
    if gs < newton:
        _fail(10, f"gs-newton fraction at tau=1 ({gs:.2f}) below newton ({newton:.2f})")
    elapsed = time.perf_counter() - t0
    if elapsed >= 300.0:
        _fail(10, f"took {elapsed:.1f} s >= 5 min")
    _report(10, f"profiles valid; at tau=1 gs={gs:.2f} >= newton={newton:.2f} ({elapsed:.1f} s)")
