"""Implicit time discretization of the Boussinesq phreatic-aquifer model.

Each simulated day yields one pentadiagonal-banded system x+ + Tx = b in
the shifted variable x_ij = h_ij + eta_ij (bottom depth plus surface
offset), where T collects the five-point flux coefficients built from the
previous day's saturated thickness and b = H + (dt/eps)*phi + T h (the
T h term comes from the change of variables). Nodes on the square
boundary simply omit flux terms toward missing neighbors; the wet region
never reaches them and the convention makes the water balance telescope
exactly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import PwlsProblem, SolveOptions, SolveReport, positive_part
from .linalg import PentaBandMatrix, penta_matvec
from .solvers import Method, solve


@dataclass
class AquiferConfig:
    """Aquifer geometry and physics; defaults follow the reference setup
    (paraboloid of revolution, 1000 m radius, 10 m center depth, porosity
    0.4, unit conductivity, one-day steps, 10 m^3/s point sink)."""

    L: float = 1000.0
    depth: float = 10.0
    epsilon: float = 0.4
    kappa: float = 1.0
    dt: float = 86400.0
    q: float = 10.0
    N: int = 25
    days: int = 7

    def __post_init__(self):
        for name in ("L", "depth", "epsilon", "kappa", "dt"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.q < 0:
            raise ValueError("q must be nonnegative")
        if self.N < 1 or self.days < 1:
            raise ValueError("N and days must be at least 1")

    @property
    def dx(self) -> float:
        return self.L / self.N

    dy = dx

    @property
    def grid_side(self) -> int:
        return 2 * self.N + 1


@dataclass
class AquiferState:
    """Grid fields for one simulated day; H = (h + eta)+ is the saturated
    thickness (zero on dry cells)."""

    day: int
    h: np.ndarray
    eta: np.ndarray

    @property
    def H(self) -> np.ndarray:
        return positive_part(self.h + self.eta)


@dataclass
class DayResult:
    state: AquiferState
    report: SolveReport
    volume: float


def bottom_elevation(cfg: AquiferConfig) -> np.ndarray:
    """Paraboloid bottom depth h(x,y) = max(0, depth*(1 - r^2/L^2)) on the
    uniform grid over [-L, L]^2; zero on and outside the rim circle."""
    coords = np.linspace(-cfg.L, cfg.L, cfg.grid_side)
    X, Y = np.meshgrid(coords, coords, indexing="ij")
    return np.maximum(0.0, cfg.depth * (1.0 - (X**2 + Y**2) / cfg.L**2))


def initial_state(cfg: AquiferConfig) -> AquiferState:
    """Day zero: the water level sits at the reference level (eta = 0)."""
    h = bottom_elevation(cfg)
    return AquiferState(day=0, h=h, eta=np.zeros_like(h))


def sink_field(cfg: AquiferConfig) -> np.ndarray:
    """Point sink at the center node: phi_00 = -q/(dx*dy), zero elsewhere."""
    phi = np.zeros((cfg.grid_side, cfg.grid_side))
    phi[cfg.N, cfg.N] = -cfg.q / (cfg.dx * cfg.dy)
    return phi


def assemble_day(cfg: AquiferConfig, state: AquiferState) -> tuple[PwlsProblem, np.ndarray]:
    """Build the day-(l+1) system from the day-l state.

    Half-grid thicknesses are arithmetic means of the two adjacent node
    values, shared between neighboring rows, so T is symmetric positive
    semidefinite with the pseudo-pentadiagonal profile (three vectors).
    Returns the problem and the (i,j) -> linear index map (row-major with
    the second grid axis contiguous).
    """
    m = cfg.grid_side
    n = m * m
    dx2, dy2 = cfg.dx**2, cfg.dy**2
    c = cfg.kappa * cfg.dt / cfg.epsilon
    H = state.H
    Hx = 0.5 * (H[:-1, :] + H[1:, :])  # edge (i,j)-(i+1,j)
    Hy = 0.5 * (H[:, :-1] + H[:, 1:])  # edge (i,j)-(i,j+1)

    diag = np.zeros((m, m))
    diag[:-1, :] += Hx / dx2
    diag[1:, :] += Hx / dx2
    diag[:, :-1] += Hy / dy2
    diag[:, 1:] += Hy / dy2
    diag = c * diag.ravel()

    off1 = np.zeros(n - 1)
    in_block = (np.arange(m)[:, None] * m + np.arange(m - 1)[None, :]).ravel()
    off1[in_block] = (-c * Hy / dy2).ravel()  # j-neighbors; zero across block edges
    offm = (-c * Hx / dx2).ravel()  # i-neighbors

    T = PentaBandMatrix(m, diag, off1, offm)
    hv = state.h.ravel()
    b = H.ravel() + (cfg.dt / cfg.epsilon) * sink_field(cfg).ravel()
    b += penta_matvec(T.diag, T.off1, T.offm, m, hv)
    index_map = np.arange(n).reshape(m, m)
    return PwlsProblem(T, b), index_map


def water_volume(cfg: AquiferConfig, state: AquiferState) -> float:
    """V = epsilon * sum_ij H_ij * dx * dy."""
    return float(cfg.epsilon * state.H.sum() * cfg.dx * cfg.dy)


def step_day(
    cfg: AquiferConfig,
    state: AquiferState,
    method: Method | str = Method.NEWTON,
    opts: SolveOptions | None = None,
    x0: np.ndarray | None = None,
) -> DayResult:
    """Advance one day: solve the assembled system, recover
    eta = x - h and H = x+, and account for the water volume.

    The default start is the previous day's level (x0 = h + eta)."""
    problem, _ = assemble_day(cfg, state)
    if x0 is None:
        x0 = (state.h + state.eta).ravel()
    report = solve(problem, method, x0=x0, opts=opts)
    m = cfg.grid_side
    eta_next = report.x.reshape(m, m) - state.h
    next_state = AquiferState(day=state.day + 1, h=state.h, eta=eta_next)
    return DayResult(state=next_state, report=report, volume=water_volume(cfg, next_state))


def interpolate_refine(coarse: np.ndarray, target_n: int | None = None) -> np.ndarray:
    """Prolong a (2N+1)^2 grid field to the (4N+1)^2 grid of 2N.

    Coincident nodes copy values; new edge midpoints average their two
    coincident neighbors; new cell centers average their four. When given,
    ``target_n`` must be exactly twice the source N.
    """
    coarse = np.asarray(coarse, dtype=np.float64)
    mc = coarse.shape[0]
    if coarse.shape != (mc, mc) or mc < 2 or mc % 2 == 0:
        raise ValueError(f"expected a square (2N+1)^2 grid field, got shape {coarse.shape}")
    if target_n is not None and target_n != mc - 1:  # source N = (mc-1)/2
        raise ValueError(f"target N must be {mc - 1} (twice the source), got {target_n}")
    mf = 2 * mc - 1
    fine = np.empty((mf, mf))
    fine[::2, ::2] = coarse
    fine[1::2, ::2] = 0.5 * (coarse[:-1, :] + coarse[1:, :])
    fine[::2, 1::2] = 0.5 * (coarse[:, :-1] + coarse[:, 1:])
    fine[1::2, 1::2] = 0.25 * (
        coarse[:-1, :-1] + coarse[1:, :-1] + coarse[:-1, 1:] + coarse[1:, 1:]
    )
    return fine


def run_simulation(
    cfg: AquiferConfig,
    method: Method | str = Method.NEWTON,
    warm_start: str = "previous-day",
    opts: SolveOptions | None = None,
) -> list[DayResult]:
    """Simulate cfg.days days from eta = 0.

    ``warm_start`` is either "previous-day" (start each day from the last
    level) or "refine:<path>" where <path> is a prior run's output
    directory (or its levels.npz) for grid size N/2; each day then starts
    from the interpolation of the same day's coarse solution.
    """
    state = initial_state(cfg)
    coarse_etas = None
    if isinstance(warm_start, str) and warm_start.startswith("refine:"):
        coarse_etas = _load_coarse_levels(warm_start[len("refine:"):], cfg)
    elif warm_start != "previous-day":
        raise ValueError(f"unknown warm start policy {warm_start!r}")

    results = []
    for day in range(cfg.days):
        x0 = None
        if coarse_etas is not None:
            x0 = (state.h + interpolate_refine(coarse_etas[day + 1])).ravel()
        result = step_day(cfg, state, method, opts, x0=x0)
        results.append(result)
        state = result.state
    return results


def _load_coarse_levels(path, cfg: AquiferConfig) -> np.ndarray:
    path = Path(path)
    if path.is_dir():
        path = path / "levels.npz"
    with np.load(path) as data:
        etas = np.array(data["eta"])
        coarse_n = int(data["N"])
    if 2 * coarse_n != cfg.N:
        raise ValueError(f"coarse run has N={coarse_n}; refinement needs N={2 * coarse_n}")
    if etas.shape[0] < cfg.days + 1:
        raise ValueError("coarse run covers fewer days than requested")
    return etas


def save_run(directory, cfg: AquiferConfig, results: list[DayResult]) -> dict:
    """Write days.json (volume/iterations/time per day), levels.npz (the
    eta stack, day 0 included, for later refinement warm starts) and
    profile.csv (water level along the central vertical cut)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    day0 = initial_state(cfg)
    days = [
        {
            "day": r.state.day,
            "volume": r.volume,
            "status": r.report.status.value,
            "iterations": r.report.iterations,
            "final_residual": r.report.final_residual,
            "wall_time_s": r.report.wall_time,
        }
        for r in results
    ]
    summary = {
        "N": cfg.N,
        "method": results[0].report.method if results else None,
        "day0_volume": water_volume(cfg, day0),
        "days": days,
    }
    with open(directory / "days.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")

    etas = np.stack([day0.eta] + [r.state.eta for r in results])
    np.savez_compressed(directory / "levels.npz", eta=etas, N=cfg.N)

    coords = np.linspace(-cfg.L, cfg.L, cfg.grid_side)
    center = cfg.N
    bottom = -day0.h[:, center]
    with open(directory / "profile.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "bottom"] + [f"level_day_{d}" for d in range(len(etas))])
        for i, x in enumerate(coords):
            levels = [max(etas[d][i, center], bottom[i]) for d in range(len(etas))]
            writer.writerow([f"{x:.6g}", f"{bottom[i]:.10g}"] + [f"{v:.10g}" for v in levels])
    return summary
