"""Mass-lumped P1 finite elements for the two-population system.

Semi-implicit Euler in time. Within a time step the nonlinear system is
solved by a fixed point: mobilities and the drift term use the clamped
previous iterate, gradients of both populations are implicit, and the
reaction splits into an implicit growth term and a lagged competition term.
Each inner pass is one linear solve for both populations together; with
node-interleaved unknowns the matrix has bandwidth 3.

The optional artificial viscosity adds (delta/2) d/dx(u_i (u1 + u2)) to the
flux, linearized as (delta/2) (S du_i/dx + L_i d(u1 + u2)/dx) with S, L_i
the frozen total and own mobilities.

Boundary conditions are zero flux (natural), so no boundary terms appear.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from .errors import NonConvergenceError, SingularSystemError, ValidationError
from .model import ModelCoefficients


@dataclass(frozen=True, eq=False)
class FemState:
    nodes: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        u1 = np.asarray(self.u1, dtype=float)
        u2 = np.asarray(self.u2, dtype=float)
        bad = []
        if nodes.ndim != 1 or nodes.size < 2:
            bad.append("nodes")
        elif not np.all(np.diff(nodes) > 0):
            bad.append("nodes")
        if u1.shape != nodes.shape:
            bad.append("u1")
        if u2.shape != nodes.shape:
            bad.append("u2")
        if not (np.all(np.isfinite(u1)) and np.all(np.isfinite(u2))):
            bad.append("finite values")
        if bad:
            raise ValidationError("invalid FEM state: " + ", ".join(bad), bad)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "u1", u1)
        object.__setattr__(self, "u2", u2)

    @classmethod
    def uniform(cls, domain, n, u10, u20, time=0.0) -> "FemState":
        nodes = np.linspace(float(domain[0]), float(domain[1]), int(n))
        u1 = u10(nodes) if callable(u10) else u10
        u2 = u20(nodes) if callable(u20) else u20
        return cls(nodes, u1, u2, time)

    @property
    def lumped_mass(self) -> np.ndarray:
        return lumped_mass(self.nodes)

    @property
    def mass(self) -> tuple:
        m = self.lumped_mass
        return float(m @ self.u1), float(m @ self.u2)


@dataclass(frozen=True)
class FemConfig:
    dt: float
    delta: float = 0.0
    cutoff_eps: float = 1e-6
    fp_tol: float = 1e-8
    max_fp_iters: int = 100

    def __post_init__(self):
        bad = [name for name, ok in (
            ("dt", self.dt > 0), ("delta", self.delta >= 0), ("cutoff_eps", self.cutoff_eps > 0),
            ("fp_tol", self.fp_tol > 0), ("max_fp_iters", self.max_fp_iters >= 1)) if not ok]
        if bad:
            raise ValidationError("invalid FEM configuration: " + ", ".join(bad), bad)


def cutoff(cutoff_eps, s):
    """Clamp to [0, 1/cutoff_eps]; used for both regularizations of the mobilities."""
    out = np.clip(np.asarray(s, dtype=float), 0.0, 1.0 / cutoff_eps)
    return out if out.ndim else float(out)


def lumped_mass(nodes) -> np.ndarray:
    h = np.diff(nodes)
    m = np.zeros(nodes.size)
    m[:-1] += 0.5 * h
    m[1:] += 0.5 * h
    return m


def _assemble(coeffs, cfg, nodes, frozen, t):
    """Banded matrix (ab form, l=u=3) of the flux part and the known drift terms.

    Unknown ordering: index 2*j + i for node j, population i.
    """
    h = np.diff(nodes)
    L = [0.5 * (f[:-1] + f[1:]) for f in frozen]  # elementwise mobilities
    S = L[0] + L[1]
    A = coeffs.A
    c = coeffs.c
    half_delta = 0.5 * cfg.delta
    # D[i][l]: flux coefficient of d u_l/dx in J_i, per element
    D = [[A[i, l] * L[i] + half_delta * L[i] for l in range(2)] for i in range(2)]
    for i in range(2):
        D[i][i] = D[i][i] + c[i] + half_delta * S
    q_nodes = np.asarray(coeffs.q(nodes, t), dtype=float) * np.ones_like(nodes)
    q_el = 0.5 * (q_nodes[:-1] + q_nodes[1:])

    n = nodes.size
    size = 2 * n
    ab = np.zeros((7, size))

    def add(rows, cols, vals):
        # ab[3 + r - c, c] holds M[r, c]
        np.add.at(ab, (3 + rows - cols, cols), vals)

    load = np.zeros(size)
    left = np.arange(n - 1)
    right = left + 1
    for i in range(2):
        for l in range(2):
            k = D[i][l] / h
            # row (left, i): -J_i ; row (right, i): +J_i ; J_i contains k*(u_l[right]-u_l[left])
            add(2 * left + i, 2 * left + l, k)
            add(2 * left + i, 2 * right + l, -k)
            add(2 * right + i, 2 * left + l, -k)
            add(2 * right + i, 2 * right + l, k)
        drift = coeffs.b[i] * L[i] * q_el
        np.add.at(load, 2 * left + i, -drift)
        np.add.at(load, 2 * right + i, drift)
    return ab, load


def fem_step(coeffs: ModelCoefficients, cfg: FemConfig, state: FemState) -> FemState:
    return _fem_step(coeffs, cfg, state)[0]


def _fem_step(coeffs, cfg, state):
    nodes = state.nodes
    m = lumped_mass(nodes)
    dt = cfg.dt
    t_new = state.time + dt
    old = (state.u1, state.u2)
    lam_old = [cutoff(cfg.cutoff_eps, u) for u in old]
    n = nodes.size
    alpha = coeffs.alpha
    beta = coeffs.beta
    current = old
    for k in range(1, int(cfg.max_fp_iters) + 1):
        frozen = [cutoff(cfg.cutoff_eps, u) for u in current]
        ab, load = _assemble(coeffs, cfg, nodes, frozen, t_new)
        rhs = np.zeros(2 * n)
        for i in range(2):
            diag = m / dt - alpha[i] * m
            ab[3, i::2] += diag
            competition = frozen[i] * (beta[i, 0] * lam_old[0] + beta[i, 1] * lam_old[1])
            rhs[i::2] = m * old[i] / dt - m * competition
        rhs -= load
        try:
            sol = solve_banded((3, 3), ab, rhs)
        except (LinAlgError, ValueError) as exc:
            raise SingularSystemError(f"banded solve failed: {exc}") from exc
        if not np.all(np.isfinite(sol)):
            raise SingularSystemError("banded solve produced non-finite values")
        new = (sol[0::2], sol[1::2])
        change = max(float(np.abs(new[i] - current[i]).max()) for i in range(2))
        current = new
        if change < cfg.fp_tol:
            return FemState(nodes, new[0], new[1], t_new), k
    raise NonConvergenceError(
        f"FEM fixed point did not converge in {cfg.max_fp_iters} iterations (last change {change:.3e})",
        iterations=cfg.max_fp_iters)


@dataclass
class FemRunStats:
    fixed_point_iterations: list = field(default_factory=list)

    @property
    def max_iterations(self) -> int:
        return max(self.fixed_point_iterations, default=0)


def fem_run(coeffs: ModelCoefficients, cfg: FemConfig, state: FemState, n_steps: int,
            snapshot_steps=(), callback: Optional[Callable] = None):
    """Iterate :func:`fem_step`; returns (final state, {step: state}, stats)."""
    wanted = set(int(s) for s in snapshot_steps)
    snapshots = {0: state} if 0 in wanted else {}
    stats = FemRunStats()
    for n in range(1, int(n_steps) + 1):
        try:
            state, iters = _fem_step(coeffs, cfg, state)
        except (NonConvergenceError, SingularSystemError) as exc:
            exc.step = n
            raise
        stats.fixed_point_iterations.append(iters)
        if n in wanted:
            snapshots[n] = state
        if callback is not None:
            callback(n, state)
    return state, snapshots, stats
