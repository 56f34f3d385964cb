"""Deterministic particle method for the two-population system in 1D.

Each population i is carried by particles with fixed positive weights w^i_k
moving with the velocity

    g~^i_k = -( a_i1 du1/dx + a_i2 du2/dx
               + c_i u_i du_i/dx / (u_i^2 + eps_tilde^2) + b_i q )(y^i_k)

where u_j is the mollified density of population j. Time stepping is the
implicit midpoint rule: the half step is solved by fixed-point iteration,
the second half is explicit, then escaped particles are reflected back into
the domain. Reaction terms are not part of the particle dynamics.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import kernel as _kernel
from .errors import InvalidNError, NonConvergenceError, ValidationError
from .kernel import KernelConfig
from .model import ModelCoefficients
from .nnls import nnls

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ParticleEnsemble:
    domain: tuple
    positions: tuple
    weights: tuple
    time: float = 0.0

    def __post_init__(self):
        a, b = map(float, self.domain)
        if not a < b:
            raise ValidationError("domain must satisfy a < b", ["domain"])
        object.__setattr__(self, "domain", (a, b))
        pos = tuple(np.asarray(p, dtype=float) for p in self.positions)
        wts = tuple(np.asarray(w, dtype=float) for w in self.weights)
        if len(pos) != 2 or len(wts) != 2:
            raise ValidationError("an ensemble holds exactly two populations", ["positions", "weights"])
        bad = []
        for i in range(2):
            if pos[i].shape != wts[i].shape or pos[i].ndim != 1:
                bad.append(f"population {i + 1}: positions/weights shape mismatch")
            elif pos[i].size and (pos[i].min() < a or pos[i].max() > b):
                bad.append(f"population {i + 1}: positions outside domain")
            elif wts[i].size and not np.all(wts[i] > 0):
                bad.append(f"population {i + 1}: nonpositive weights")
        if bad:
            raise ValidationError("; ".join(bad), bad)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "weights", wts)

    @property
    def mass(self) -> tuple:
        return float(self.weights[0].sum()), float(self.weights[1].sum())

    @property
    def n_particles(self) -> tuple:
        return self.positions[0].size, self.positions[1].size

    def density(self, cfg: KernelConfig, x) -> tuple:
        return tuple(_kernel.density(cfg, self.positions[i], self.weights[i], x) for i in range(2))


@dataclass(frozen=True, eq=False)
class StepConfig:
    dt: float
    check_grid: np.ndarray
    fixed_point_tol: float = 4e-6
    max_fixed_point_iters: int = 50

    def __post_init__(self):
        grid = np.atleast_1d(np.asarray(self.check_grid, dtype=float))
        object.__setattr__(self, "check_grid", grid)
        bad = []
        if not self.dt > 0:
            bad.append("dt")
        if not self.fixed_point_tol > 0:
            bad.append("fixed_point_tol")
        if not (int(self.max_fixed_point_iters) == self.max_fixed_point_iters
                and self.max_fixed_point_iters > 0):
            bad.append("max_fixed_point_iters")
        if grid.size == 0:
            bad.append("check_grid")
        if bad:
            raise ValidationError("invalid step configuration: " + ", ".join(bad), bad)

    @classmethod
    def uniform(cls, dt, domain, n, **kw) -> "StepConfig":
        return cls(dt=dt, check_grid=init_positions_uniform(domain, n), **kw)


def velocity(coeffs: ModelCoefficients, cfg: KernelConfig, positions, weights, population: int, t: float):
    """Regularized velocities g~ of every particle of ``population`` (0 or 1)."""
    i = population
    y = np.asarray(positions[i], dtype=float)
    if y.size == 0:
        return np.zeros(0)
    A = coeffs.A
    c = coeffs.c[i]
    out = np.zeros_like(y)
    for j in range(2):
        own = j == i
        if A[i, j] == 0.0 and not (own and c != 0.0):
            continue
        u, du = _kernel.density_and_grad(cfg, positions[j], weights[j], y)
        if A[i, j] != 0.0:
            out += A[i, j] * du
        if own and c != 0.0:
            out += c * u * du / (u * u + cfg.epsilon_tilde ** 2)
    b = coeffs.b[i]
    if b != 0.0:
        out += b * coeffs.q(y, t)
    return -out


def velocities(coeffs, cfg, positions, weights, t) -> tuple:
    return tuple(velocity(coeffs, cfg, positions, weights, i, t) for i in range(2))


def half_step_fixed_point(coeffs: ModelCoefficients, cfg: KernelConfig, step: StepConfig,
                          ensemble: ParticleEnsemble):
    """Solve x_mid = x_n + dt/2 g~(t_n + dt/2, x_mid) by fixed-point iteration.

    Iterates start from x_n. Stops once the mollified densities of two
    consecutive iterates differ by at most ``fixed_point_tol * dt`` on
    ``step.check_grid`` (max over both populations), or once the positions
    stop changing beyond a few ulps (the density criterion can sit below
    round-off when dt is tiny).

    Returns
    -------
    positions : tuple of ndarray
        Midpoint positions, not reflected.
    iterations : int
        Number of velocity evaluations performed.
    """
    dt = step.dt
    t_half = ensemble.time + 0.5 * dt
    x0 = ensemble.positions
    w = ensemble.weights
    grid = step.check_grid
    current = x0
    dens = [_kernel.density(cfg, current[i], w[i], grid) for i in range(2)]
    threshold = step.fixed_point_tol * dt
    # iterates that no longer move beyond round-off have reached the floating-point fixed point
    stagnation = 8.0 * np.finfo(float).eps * max(abs(v) for v in ensemble.domain)
    change = np.inf
    for j in range(1, int(step.max_fixed_point_iters) + 1):
        g = velocities(coeffs, cfg, current, w, t_half)
        new = tuple(x0[i] + 0.5 * dt * g[i] for i in range(2))
        new_dens = [_kernel.density(cfg, new[i], w[i], grid) for i in range(2)]
        change = max(float(np.abs(new_dens[i] - dens[i]).max(initial=0.0)) for i in range(2))
        moved = max(float(np.abs(new[i] - current[i]).max(initial=0.0)) for i in range(2))
        current, dens = new, new_dens
        if change <= threshold or moved <= stagnation:
            return current, j
    raise NonConvergenceError(
        f"midpoint fixed point did not converge in {step.max_fixed_point_iters} iterations "
        f"(last change {change:.3e} > {threshold:.3e}); reduce dt relative to epsilon**2",
        iterations=step.max_fixed_point_iters)


def reflect(domain, x):
    """Fold ``x`` back into [a, b] by repeated mirror reflection at the endpoints."""
    a, b = map(float, domain)
    x = np.asarray(x, dtype=float)
    length = b - a
    y = np.mod(x - a, 2.0 * length)
    folded = a + np.where(y > length, 2.0 * length - y, y)
    out = np.where((x >= a) & (x <= b), x, np.clip(folded, a, b))
    return out if out.ndim else float(out)


def _step(coeffs, cfg, step, ensemble):
    mid, iters = half_step_fixed_point(coeffs, cfg, step, ensemble)
    g = velocities(coeffs, cfg, mid, ensemble.weights, ensemble.time + 0.5 * step.dt)
    new = tuple(reflect(ensemble.domain, mid[i] + 0.5 * step.dt * g[i]) for i in range(2))
    return replace(ensemble, positions=new, time=ensemble.time + step.dt), iters


def full_step(coeffs: ModelCoefficients, cfg: KernelConfig, step: StepConfig,
              ensemble: ParticleEnsemble) -> ParticleEnsemble:
    """Advance the ensemble by one implicit-midpoint step; weights are shared, not copied."""
    return _step(coeffs, cfg, step, ensemble)[0]


def init_positions_uniform(domain, n: int) -> np.ndarray:
    if int(n) != n or n < 2:
        raise InvalidNError(f"need at least 2 grid points, got {n}", ["N"])
    a, b = map(float, domain)
    return np.linspace(a, b, int(n))


def _samples(positions, u0):
    if callable(u0):
        return np.asarray(u0(positions), dtype=float) * np.ones_like(positions)
    samples = np.asarray(u0, dtype=float)
    if samples.shape != positions.shape:
        raise ValidationError("u0 samples must match the positions", ["u0"])
    return samples


def _drop_zero(positions, weights):
    keep = weights > 0.0
    return positions[keep].copy(), weights[keep].copy()


def init_weights_simple(positions, u0):
    """w_k = dx * u0(x_k) on a uniform grid; returns (positions, weights) without zero weights."""
    positions = np.asarray(positions, dtype=float)
    if positions.size < 2:
        raise InvalidNError("simple weights need at least 2 uniform positions", ["N"])
    dx = (positions[-1] - positions[0]) / (positions.size - 1)
    w = np.maximum(dx * _samples(positions, u0), 0.0)
    return _drop_zero(positions, w)


def fit_weights_nnls(cfg: KernelConfig, positions, u0, maxiter=None):
    """Nonnegative weights minimizing ||K w - u0(x)||_2 with K[k, l] = xi_eps(x_k - x_l).

    Returns the full-length weight vector and the residual norm.
    """
    positions = np.asarray(positions, dtype=float)
    target = _samples(positions, u0)
    K = _kernel.kernel_matrix(cfg, positions, positions)
    return nnls(K, target, maxiter=maxiter)


def init_weights_nnls(cfg: KernelConfig, positions, u0, maxiter=None):
    """Like :func:`fit_weights_nnls` but returns (positions, weights) without zero weights."""
    positions = np.asarray(positions, dtype=float)
    w, _ = fit_weights_nnls(cfg, positions, u0, maxiter=maxiter)
    return _drop_zero(positions, w)


def max_gap(ensemble: ParticleEnsemble) -> float:
    """Largest distance between neighbouring particles of the same population."""
    gaps = [np.diff(np.sort(p)).max(initial=0.0) for p in ensemble.positions]
    return float(max(gaps))


def redistribute(coeffs: ModelCoefficients, cfg: KernelConfig, ensemble: ParticleEnsemble,
                 n: int, mass_rtol: float = 1e-3) -> ParticleEnsemble:
    """Re-seed every population on the uniform n-point grid.

    New weights are the NNLS fit of the current mollified density on that
    grid, rescaled so each population keeps exactly its previous mass.
    """
    grid = init_positions_uniform(ensemble.domain, n)
    positions, weights = [], []
    for i in range(2):
        y, w = ensemble.positions[i], ensemble.weights[i]
        if y.size == 0:
            positions.append(y)
            weights.append(w)
            continue
        target = _kernel.density(cfg, y, w, grid)
        new_y, new_w = init_weights_nnls(cfg, grid, target)
        old_mass, new_mass = w.sum(), new_w.sum()
        if new_mass <= 0:
            logger.warning("population %d: redistribution produced no particles; keeping old ones", i + 1)
            positions.append(y)
            weights.append(w)
            continue
        rel = abs(new_mass - old_mass) / old_mass
        if rel > mass_rtol:
            logger.warning("population %d: NNLS redistribution mass drift %.3e (rescaled)", i + 1, rel)
        positions.append(new_y)
        weights.append(new_w * (old_mass / new_mass))
    return replace(ensemble, positions=tuple(positions), weights=tuple(weights))


@dataclass
class RunStats:
    fixed_point_iterations: list = field(default_factory=list)
    redistributions: list = field(default_factory=list)

    @property
    def max_iterations(self) -> int:
        return max(self.fixed_point_iterations, default=0)


def particle_run(coeffs: ModelCoefficients, cfg: KernelConfig, step: StepConfig,
                 ensemble: ParticleEnsemble, n_steps: int, snapshot_steps=(),
                 redistribute_every: Optional[int] = None, redistribute_gap: Optional[float] = None,
                 redistribute_n: Optional[int] = None,
                 callback: Optional[Callable] = None):
    """March ``n_steps`` implicit-midpoint steps.

    Redistribution runs after a step when ``redistribute_every`` divides the
    step count, or when the largest same-population gap exceeds
    ``redistribute_gap * epsilon``. Both are off by default.

    Returns the final ensemble, a dict {step index: ensemble} for the
    requested snapshot steps (0 allowed), and a :class:`RunStats`.
    """
    wanted = set(int(s) for s in snapshot_steps)
    snapshots = {0: ensemble} if 0 in wanted else {}
    stats = RunStats()
    n_redis = redistribute_n or step.check_grid.size
    for n in range(1, int(n_steps) + 1):
        try:
            ensemble, iters = _step(coeffs, cfg, step, ensemble)
        except NonConvergenceError as exc:
            exc.step = n
            raise
        stats.fixed_point_iterations.append(iters)
        due = redistribute_every is not None and redistribute_every > 0 and n % redistribute_every == 0
        if not due and redistribute_gap is not None:
            due = max_gap(ensemble) > redistribute_gap * cfg.epsilon
        if due:
            ensemble = redistribute(coeffs, cfg, ensemble, n_redis)
            stats.redistributions.append(n)
        if n in wanted:
            snapshots[n] = ensemble
        if callback is not None:
            callback(n, ensemble)
    return ensemble, snapshots, stats
