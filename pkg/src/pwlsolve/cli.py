"""Command-line entry point.

Subcommands: solve, analyze, transform, generate, bench, boussinesq.
stdout carries only machine-readable payloads (JSON/CSV paths); all
human-readable text goes to stderr. Exit codes for solve: 0 converged,
2 cycle detected, 3 iteration limit, 4 singular step; any I/O or parse
problem exits 1 with a diagnostic naming the file.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import analysis, bench, boussinesq, mmio, transforms
from .core import PwlsProblem, SolveOptions
from .errors import PwlsolveError
from .generators import GenSpec, generate
from .solvers import Method, solve

_SOLVE_EXIT = {"converged": 0, "cycle_detected": 2, "max_iterations": 3, "singular_step": 4}


class CliInputError(Exception):
    """User-facing input problem; exits 1 with the message on stderr."""


def _info(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit(payload) -> None:
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def _load_problem(args) -> PwlsProblem:
    if getattr(args, "bundle", None):
        try:
            problem, _ = mmio.load_bundle(args.bundle)
            return problem
        except FileNotFoundError as exc:
            raise CliInputError(f"cannot read bundle: {exc}") from exc
        except (json.JSONDecodeError, ValueError) as exc:
            raise CliInputError(f"cannot parse bundle {args.bundle}: {exc}") from exc
    if not args.matrix:
        raise CliInputError("give a bundle path or --matrix (with --rhs where needed)")
    try:
        T = mmio.read_matrix(args.matrix)
    except FileNotFoundError as exc:
        raise CliInputError(f"cannot read matrix file {args.matrix}: {exc}") from exc
    except ValueError as exc:
        raise CliInputError(f"cannot parse matrix file {args.matrix}: {exc}") from exc
    if getattr(args, "rhs", None) is None:
        raise CliInputError("--rhs is required alongside --matrix")
    try:
        b = mmio.read_vector(args.rhs)
    except FileNotFoundError as exc:
        raise CliInputError(f"cannot read rhs file {args.rhs}: {exc}") from exc
    except ValueError as exc:
        raise CliInputError(f"cannot parse rhs file {args.rhs}: {exc}") from exc
    return PwlsProblem(T, b)


def _load_matrix_only(args):
    if getattr(args, "bundle", None):
        return _load_problem(args).T
    if not args.matrix:
        raise CliInputError("give a bundle path or --matrix")
    try:
        return mmio.read_matrix(args.matrix)
    except FileNotFoundError as exc:
        raise CliInputError(f"cannot read matrix file {args.matrix}: {exc}") from exc
    except ValueError as exc:
        raise CliInputError(f"cannot parse matrix file {args.matrix}: {exc}") from exc


def cmd_solve(args) -> int:
    problem = _load_problem(args)
    x0 = None
    if args.x0:
        try:
            x0 = mmio.read_vector(args.x0)
        except (FileNotFoundError, ValueError) as exc:
            raise CliInputError(f"cannot read x0 file {args.x0}: {exc}") from exc
    opts = SolveOptions(
        tolerance=args.tol, max_iterations=args.max_iter, record_trace=args.trace
    )
    report = solve(problem, args.method, x0=x0, opts=opts)
    payload = report.to_json_dict()
    if args.trace and report.pattern_trace is not None:
        payload["pattern_trace"] = [t.tolist() for t in report.pattern_trace]
    _emit(payload)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    return _SOLVE_EXIT[report.status.value]


def cmd_analyze(args) -> int:
    T = _load_matrix_only(args)
    sdd = analysis.strong_diagonal_dominance(T)
    sas = analysis.sassenfeld(T)
    payload = {
        "sdd": {"holds": sdd.holds, "ratio": sdd.worst_row_ratio},
        "sassenfeld": {"betas": [float(v) for v in sas.betas], "beta": sas.beta, "holds": sas.holds},
        "spd": analysis.is_spd(T),
    }
    _emit(_json_safe(payload))
    return 0


def cmd_transform(args) -> int:
    if not args.out:
        raise CliInputError("--out directory is required")
    problem = _load_problem(args)
    if args.direction == "pwls-to-ave":
        ave = transforms.pwls_to_ave(problem)
        out_problem = PwlsProblem(ave.T_hat, ave.b_hat)  # same file schema: pair of (matrix, vector)
    elif args.direction == "ave-to-pwls":
        out_problem = transforms.ave_to_pwls(transforms.AveProblem(problem.T, problem.b))
    else:  # qp-to-pwls
        from .linalg import DenseMatrix

        Q = problem.T if isinstance(problem.T, DenseMatrix) else None
        if Q is None:
            Q = DenseMatrix(problem.T.to_dense())
        out_problem = transforms.qp_to_pwls(transforms.QpProblem(Q, problem.b))
    manifest = mmio.save_bundle(args.out, out_problem)
    _emit({"out": str(manifest), "direction": args.direction, "n": out_problem.n})
    return 0


def cmd_generate(args) -> int:
    spec = GenSpec(
        n=args.n,
        kind=args.kind,
        density=args.density,
        seed=args.seed,
        diag_offset=args.diag_offset,
        offdiag_scale=args.offdiag_scale,
    )
    problem = generate(spec)
    if not args.out:
        raise CliInputError("--out directory is required")
    manifest = mmio.save_bundle(args.out, problem, genspec=spec)
    _emit({"out": str(manifest), "n": problem.n, "kind": problem.kind})
    return 0


def cmd_bench(args) -> int:
    try:
        with open(args.grid) as fh:
            grid = json.load(fh)
    except FileNotFoundError as exc:
        raise CliInputError(f"cannot read grid file {args.grid}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliInputError(
            f"cannot parse grid file {args.grid}: line {exc.lineno}: {exc.msg}"
        ) from exc
    problems = []
    for entry in grid.get("problems", []):
        if "bundle" in entry:
            problem, _ = mmio.load_bundle(entry["bundle"])
            problems.append((entry["bundle"], problem))
        else:
            spec = GenSpec.from_json_dict(entry)
            pid = f"{spec.kind.value}-n{spec.n}-seed{spec.seed}"
            problems.append((pid, generate(spec)))
    methods = args.method or grid.get("methods", [m.value for m in Method])
    opts = SolveOptions(
        tolerance=args.tol if args.tol is not None else grid.get("tol", 1e-5),
        max_iterations=args.max_iter,
    )
    repeats = args.repeats if args.repeats is not None else grid.get("repeats", 3)
    records = bench.run_grid(problems, methods, opts=opts, repeats=repeats, jobs=args.jobs)
    curves = bench.performance_profile(records)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    bench.write_records_csv(out / "records.csv", records)
    bench.write_profile_csv(out / "profile.csv", curves)
    _emit(
        {
            "records": str(out / "records.csv"),
            "profile": str(out / "profile.csv"),
            "problems": len(problems),
            "methods": list(methods),
            "solved": sum(1 for r in records if r.solved),
            "total_runs": len(records),
        }
    )
    return 0


def cmd_boussinesq(args) -> int:
    cfg = boussinesq.AquiferConfig(N=args.N, days=args.days)
    opts = SolveOptions(tolerance=args.tol, max_iterations=args.max_iter)
    results = boussinesq.run_simulation(cfg, args.method, warm_start=args.warm_start, opts=opts)
    out = Path(args.out or ".")
    summary = boussinesq.save_run(out, cfg, results)
    _info(f"wrote {out / 'days.json'}, {out / 'levels.npz'}, {out / 'profile.csv'}")
    _emit(summary)
    return 0 if all(r.report.converged for r in results) else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pwlsolve",
        description="Solvers and analysis for the piecewise linear system x+ + Tx = b.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_problem_inputs(sp):
        sp.add_argument("bundle", nargs="?", help="bundle directory or manifest.json")
        sp.add_argument("--matrix", help="Matrix Market file for T")
        sp.add_argument("--rhs", help="vector file for b (Matrix Market or plain text)")

    sp = sub.add_parser("solve", help="run one of the three iterations on a problem")
    add_problem_inputs(sp)
    sp.add_argument("--method", default="newton", choices=[m.value for m in Method])
    sp.add_argument("--tol", type=float, default=1e-5)
    sp.add_argument("--max-iter", type=int, default=1000)
    sp.add_argument("--x0", help="starting point file (default: zero vector)")
    sp.add_argument("--trace", action="store_true", help="record the sign-pattern trace")
    sp.add_argument("--out", help="also write the JSON report here")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("analyze", help="solvability conditions for a matrix")
    add_problem_inputs(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("transform", help="convert between problem forms")
    sp.add_argument("direction", choices=["pwls-to-ave", "ave-to-pwls", "qp-to-pwls"])
    add_problem_inputs(sp)
    sp.add_argument("--out", help="output bundle directory")
    sp.set_defaults(func=cmd_transform)

    sp = sub.add_parser("generate", help="write a seeded random instance bundle")
    sp.add_argument("--kind", default="dense", choices=["dense", "sparse", "spd", "diagonal"])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--density", type=float, default=0.003)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--diag-offset", type=float, default=None)
    sp.add_argument("--offdiag-scale", type=float, default=1.0)
    sp.add_argument("--out", help="output bundle directory")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("bench", help="run a method-by-problem grid and emit profiles")
    sp.add_argument("--grid", required=True, help="JSON grid spec file")
    sp.add_argument("--method", action="append", choices=[m.value for m in Method],
                    help="repeatable; default: all three (or the grid file's list)")
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--max-iter", type=int, default=1000)
    sp.add_argument("--repeats", type=int, default=None)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out", help="output directory for records.csv and profile.csv")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("boussinesq", help="simulate the draining aquifer")
    sp.add_argument("--N", type=int, default=25, help="half grid size; grid is (2N+1)^2")
    sp.add_argument("--days", type=int, default=7)
    sp.add_argument("--method", default="newton", choices=[m.value for m in Method])
    sp.add_argument("--warm-start", default="previous-day",
                    help="'previous-day' or 'refine:<path to coarse run>'")
    sp.add_argument("--tol", type=float, default=1e-5)
    sp.add_argument("--max-iter", type=int, default=1000)
    sp.add_argument("--out", help="output directory")
    sp.set_defaults(func=cmd_boussinesq)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliInputError as exc:
        _info(f"error: {exc}")
        return 1
    except (PwlsolveError, ValueError, OSError) as exc:
        _info(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
