"""Method-by-problem benchmark grids and Dolan-More performance profiles."""

from __future__ import annotations

import csv
import math
import multiprocessing
from dataclasses import dataclass

from .core import PwlsProblem, SolveOptions
from .errors import EmptyInputError
from .solvers import Method, solve


@dataclass
class BenchRecord:
    problem_id: str
    method: str
    status: str
    iterations: int
    wall_time: float
    final_residual: float

    @property
    def solved(self) -> bool:
        return self.status == "converged"


@dataclass
class ProfileCurve:
    """Cumulative fraction of problems solved within a time ratio tau of
    the per-problem best method; tau recorded in log2 scale."""

    method: str
    points: list[tuple[float, float]]  # (log2 tau, rho(tau)), tau ascending


def _bench_one(args) -> list[BenchRecord]:
    problem_id, problem, methods, opts, repeats = args
    records = []
    for method in methods:
        times = []
        report = None
        for _ in range(repeats):
            report = solve(problem, method, opts=opts)
            times.append(report.wall_time)
        times.sort()
        median = times[len(times) // 2] if len(times) % 2 else 0.5 * (
            times[len(times) // 2 - 1] + times[len(times) // 2]
        )
        records.append(
            BenchRecord(
                problem_id=problem_id,
                method=Method.parse(method).value,
                status=report.status.value,
                iterations=report.iterations,
                wall_time=median,
                final_residual=report.final_residual,
            )
        )
    return records


def run_grid(
    problems: list[tuple[str, PwlsProblem]],
    methods: list[Method | str],
    opts: SolveOptions | None = None,
    repeats: int = 3,
    jobs: int = 1,
) -> list[BenchRecord]:
    """One record per (problem, method), timing the median of ``repeats``
    runs. Failures are data, not errors: their status is recorded and the
    profile later leaves them out of the ratio denominators.

    With jobs > 1, problems are distributed over worker processes; each
    timed run occupies its worker exclusively. Records come back in
    (problem, method) order regardless.
    """
    if not problems or not methods:
        raise EmptyInputError("need at least one problem and one method")
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    tasks = [(pid, p, list(methods), opts, repeats) for pid, p in problems]
    if jobs > 1:
        with multiprocessing.Pool(jobs) as pool:
            chunks = pool.map(_bench_one, tasks)
    else:
        chunks = [_bench_one(t) for t in tasks]
    return [rec for chunk in chunks for rec in chunk]


def performance_profile(records: list[BenchRecord]) -> list[ProfileCurve]:
    """Dolan-More curves: r_{p,m} = t_{p,m} / min_m t_{p,m} over solved
    runs (unsolved pairs get r = inf), rho_m(tau) = |{p : r_{p,m} <= tau}| / |P|.

    Ties at the per-problem minimum credit every tied method. Output is
    deterministic: curves sorted by method name, points by tau, with the
    breakpoint grid shared across methods (tau = 1 always included).
    """
    if not records:
        raise EmptyInputError("no benchmark records")
    methods = sorted({r.method for r in records})
    problems = sorted({r.problem_id for r in records})
    best: dict[str, float] = {}
    for r in records:
        if r.solved:
            best[r.problem_id] = min(best.get(r.problem_id, math.inf), r.wall_time)

    ratios: dict[str, list[float]] = {m: [] for m in methods}
    for r in records:
        if r.solved and r.problem_id in best and best[r.problem_id] > 0:
            ratios[r.method].append(r.wall_time / best[r.problem_id])
        elif r.solved and best.get(r.problem_id) == 0.0:
            ratios[r.method].append(1.0)  # degenerate zero timings tie at the minimum
        else:
            ratios[r.method].append(math.inf)

    breakpoints = sorted({1.0} | {t for ts in ratios.values() for t in ts if math.isfinite(t)})
    n_problems = len(problems)
    curves = []
    for m in methods:
        ts = sorted(ratios[m])
        points = []
        for tau in breakpoints:
            solved = sum(1 for t in ts if t <= tau)
            points.append((math.log2(tau), solved / n_problems))
        curves.append(ProfileCurve(method=m, points=points))
    return curves


def solved_fraction_at_tau(curve: ProfileCurve, log2_tau: float = 0.0) -> float:
    """rho at the given log2(tau) (the largest breakpoint not above it)."""
    value = 0.0
    for t, rho in curve.points:
        if t <= log2_tau + 1e-12:
            value = rho
    return value


def write_records_csv(path, records: list[BenchRecord]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["problem", "method", "status", "iterations", "wall_time_s", "final_residual"])
        for r in records:
            writer.writerow(
                [r.problem_id, r.method, r.status, r.iterations,
                 f"{r.wall_time:.9g}", f"{r.final_residual:.9g}"]
            )


def write_profile_csv(path, curves: list[ProfileCurve]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "log2_tau", "rho"])
        for curve in curves:
            for t, rho in curve.points:
                writer.writerow([curve.method, f"{t:.9g}", f"{rho:.9g}"])
