"""Run orchestration: build solvers from a RunConfig, write snapshots, reports and manifest."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import io as _io
from ._validation import n_time_steps, snapshot_steps
from .config import RunConfig, dump_config
from .diagnostics import REPORT_COLUMNS, GridFunctionPair, error_report, estimate_interface
from .estimators import FemSolver, ParticleSolver
from .exact import exact_pair

logger = logging.getLogger(__name__)


@dataclass
class RunResult:
    config: RunConfig
    n_steps: int
    dt: float
    solvers: dict = field(default_factory=dict)
    reports: dict = field(default_factory=dict)
    files: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)


def build_solvers(cfg: RunConfig) -> dict:
    coeffs = cfg.coeffs()
    times = tuple(sorted(set(cfg.snapshot_times) | {cfg.T}))
    solvers = {}
    if cfg.method in ("particle", "both"):
        solvers["particle"] = ParticleSolver(
            coeffs=coeffs, domain=cfg.domain, epsilon=cfg.epsilon, dt=cfg.dt, T=cfg.T,
            epsilon_tilde=cfg.epsilon_tilde, tol=cfg.tol,
            max_fixed_point_iters=cfg.max_fixed_point_iters, init=cfg.init,
            redistribute_every=cfg.redistribute_every or None,
            redistribute_gap=cfg.redistribute_gap or None, snapshot_times=times)
    if cfg.method in ("fem", "both"):
        solvers["fem"] = FemSolver(
            coeffs=coeffs, domain=cfg.domain, dt=cfg.dt, T=cfg.T, delta=cfg.delta,
            cutoff_eps=cfg.cutoff_eps, fp_tol=cfg.fp_tol, max_fp_iters=cfg.max_fp_iters,
            snapshot_times=times)
    return solvers


def initial_samples(cfg: RunConfig) -> np.ndarray:
    grid = np.linspace(cfg.domain[0], cfg.domain[1], cfg.n)
    u10, u20 = cfg.initial_data()
    return np.column_stack([u10(grid), u20(grid)])


def _sample(solver, snapshot, grid):
    U = solver.density(snapshot, grid)
    return GridFunctionPair(grid, U[:, 0], U[:, 1])


def run(cfg: RunConfig, out_dir=None, write=True) -> RunResult:
    """Execute the configured pipeline(s).

    Snapshots of every method go to ``<method>_step<index>.csv``. Error
    reports (time, e1, e2, mrse, m1, m2, entropy) are written against the
    closed-form solution when one exists, and particle-vs-FEM when both
    methods run. The diagnostic grid is the uniform n-point grid.
    """
    out = Path(out_dir if out_dir is not None else cfg.out)
    n_steps, dt = n_time_steps(cfg.T, cfg.dt)
    result = RunResult(cfg, n_steps, dt)
    X = initial_samples(cfg)
    grid = np.linspace(cfg.domain[0], cfg.domain[1], cfg.n)
    solvers = build_solvers(cfg)
    for name, solver in solvers.items():
        logger.info("running %s: %d steps of dt=%.6g", name, n_steps, dt)
        solver.fit(X)
    result.solvers = solvers

    exact = cfg.exact_solution()
    samples = {name: {t: _sample(s, snap, grid) for t, snap in s.snapshots_.items()}
               for name, s in solvers.items()}
    for name, by_time in samples.items():
        if exact is not None:
            rows = [error_report(t, u, GridFunctionPair.from_callable(grid, lambda x, t=t: exact_pair(exact, x, t)))
                    for t, u in by_time.items()]
            result.reports[f"{name}_vs_exact"] = rows
    if len(samples) == 2:
        result.reports["particle_vs_fem"] = [
            error_report(t, samples["particle"][t], samples["fem"][t]) for t in samples["particle"]]

    if exact is not None:
        fine = np.linspace(cfg.domain[0], cfg.domain[1], 20 * cfg.n + 1)
        for name, solver in solvers.items():
            result.extras[f"{name}_interface"] = estimate_interface(solver.grid_function(fine))
        result.extras["exact_interface"] = float(exact.interface(cfg.T))

    if write:
        _write_outputs(out, result)
    return result


def _write_outputs(out: Path, result: RunResult) -> None:
    out.mkdir(parents=True, exist_ok=True)
    steps = snapshot_steps(tuple(sorted(set(result.config.snapshot_times) | {result.config.T})),
                           result.config.T, result.n_steps)
    for name, solver in result.solvers.items():
        by_time = {solver.step_time(k): k for k in steps}
        for t, snap in solver.snapshots_.items():
            path = out / f"{name}_step{by_time[t]:08d}.csv"
            if name == "particle":
                _io.write_particles(path, snap)
            else:
                _io.write_fem(path, snap)
            result.files.append(path.name)
    for key, rows in result.reports.items():
        path = out / f"report_{key}.csv"
        _io.write_report(path, rows, REPORT_COLUMNS)
        result.files.append(path.name)
    (out / "manifest.ini").write_text(manifest_text(result), encoding="utf-8")
    result.files.append("manifest.ini")


def manifest_text(result: RunResult) -> str:
    lines = [dump_config(result.config), "[manifest]", f"version = {__version__}",
             f"n_steps = {result.n_steps}", f"dt_used = {_io.fmt(result.dt)}"]
    for name, solver in result.solvers.items():
        lines.append(f"{name}_seconds = {solver.elapsed_:.3f}")
        lines.append(f"{name}_max_fixed_point_iterations = {solver.stats_.max_iterations}")
        if name == "particle":
            lines.append(f"particle_redistributions = {len(solver.stats_.redistributions)}")
            lines.append("particle_counts = " + ", ".join(str(c) for c in solver.ensemble_.n_particles))
    lines.append("files = " + ", ".join(result.files + ["manifest.ini"]))
    if result.extras or result.reports:
        lines.append("")
        lines.append("[results]")
        for key, value in result.extras.items():
            lines.append(f"{key} = {_io.fmt(value)}")
        for key, rows in result.reports.items():
            final = rows[-1]
            lines.append(f"{key}_final = " + ", ".join(f"{c}:{_io.fmt(final[c])}" for c in REPORT_COLUMNS))
    return "\n".join(lines) + "\n"
