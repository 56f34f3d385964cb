"""Estimator-style wrappers around the particle and FEM solvers.

``fit(X)`` takes initial densities sampled on the uniform grid over
``domain`` (shape ``(n_points, 2)``) and integrates to ``T``;
``predict(x)`` returns both population densities at the final time,
shape ``(len(x), 2)``.

    >>> solver = FemSolver(coeffs=coeffs, domain=(0, 1), dt=1e-5, T=1e-3)
    >>> solver.fit(U0).predict(np.linspace(0, 1, 11))
"""
from __future__ import annotations

import time

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import fem as _fem
from . import particles as _particles
from ._validation import check_domain, check_initial_samples, check_points, n_time_steps, snapshot_steps
from .errors import ValidationError
from .kernel import KernelConfig
from .model import ModelCoefficients


class _SolverMixin:
    def _prepare_fit(self, X):
        if not isinstance(self.coeffs, ModelCoefficients):
            raise ValidationError("coeffs must be a ModelCoefficients instance", ["coeffs"])
        domain = check_domain(self.domain)
        X = check_initial_samples(X)
        n_steps, dt = n_time_steps(float(self.T), float(self.dt))
        steps = snapshot_steps(self.snapshot_times, float(self.T), n_steps)
        grid = np.linspace(domain[0], domain[1], X.shape[0])
        self.n_steps_ = n_steps
        self.dt_ = dt
        self.grid_ = grid
        self.domain_ = domain
        return X, grid, steps

    def step_time(self, k: int) -> float:
        """Time reached after ``k`` steps; exactly T at the last step."""
        return float(self.T) if k == self.n_steps_ else k * self.dt_

    def grid_function(self, x=None):
        """Final-time densities as a :class:`~crossdiff.diagnostics.GridFunctionPair`."""
        from .diagnostics import GridFunctionPair
        x = self.grid_ if x is None else check_points(x)
        U = self.predict(x)
        return GridFunctionPair(x, U[:, 0], U[:, 1])


class ParticleSolver(_SolverMixin, BaseEstimator):
    """Deterministic particle method (implicit midpoint, Gaussian mollifier).

    Parameters
    ----------
    coeffs : ModelCoefficients
        Reaction coefficients are ignored by the particle dynamics.
    domain : tuple of float
    epsilon : float
        Mollifier width.
    dt : float
        Nominal time step; the step used is ``T / ceil(T / dt)``.
    T : float
        Final time.
    epsilon_tilde : float
        Guard in the nonlinear-diffusion velocity term.
    tol : float
        Fixed-point tolerance; iteration stops when densities on the grid
        change by at most ``tol * dt``.
    max_fixed_point_iters : int
    init : {"nnls", "simple"}
        Weight initialization on the uniform grid.
    redistribute_every : int or None
    redistribute_gap : float or None
        Redistribute when a same-population gap exceeds this many epsilons.
    snapshot_times : sequence of float
    """

    def __init__(self, coeffs=None, domain=(0.0, 1.0), epsilon=0.01, dt=1e-5, T=0.01,
                 epsilon_tilde=1e-6, tol=4e-6, max_fixed_point_iters=50, init="nnls",
                 redistribute_every=None, redistribute_gap=None, snapshot_times=()):
        self.coeffs = coeffs
        self.domain = domain
        self.epsilon = epsilon
        self.dt = dt
        self.T = T
        self.epsilon_tilde = epsilon_tilde
        self.tol = tol
        self.max_fixed_point_iters = max_fixed_point_iters
        self.init = init
        self.redistribute_every = redistribute_every
        self.redistribute_gap = redistribute_gap
        self.snapshot_times = snapshot_times

    def initial_ensemble(self, X):
        """Seed particles from initial samples without integrating (sets ``kernel_``)."""
        X, grid, _ = self._prepare_fit(X)
        self.kernel_ = KernelConfig(float(self.epsilon), float(self.epsilon_tilde))
        if self.init == "nnls":
            pops = [_particles.init_weights_nnls(self.kernel_, grid, X[:, i]) for i in range(2)]
        elif self.init == "simple":
            pops = [_particles.init_weights_simple(grid, X[:, i]) for i in range(2)]
        else:
            raise ValidationError(f"init must be 'nnls' or 'simple', got {self.init!r}", ["init"])
        return _particles.ParticleEnsemble(self.domain_, tuple(p[0] for p in pops),
                                           tuple(p[1] for p in pops), 0.0)

    def fit(self, X, y=None):
        ensemble = self.initial_ensemble(X)
        step = _particles.StepConfig(self.dt_, self.grid_, float(self.tol), int(self.max_fixed_point_iters))
        steps = snapshot_steps(self.snapshot_times, float(self.T), self.n_steps_)
        self.initial_ensemble_ = ensemble
        start = time.perf_counter()
        final, snaps, stats = _particles.particle_run(
            self.coeffs, self.kernel_, step, ensemble, self.n_steps_, snapshot_steps=steps,
            redistribute_every=self.redistribute_every, redistribute_gap=self.redistribute_gap)
        self.elapsed_ = time.perf_counter() - start
        self.ensemble_ = final
        self.snapshots_ = {self.step_time(k): v for k, v in sorted(snaps.items())}
        self.stats_ = stats
        return self

    def predict(self, X):
        check_is_fitted(self, "ensemble_")
        return self.density(self.ensemble_, X)

    def density(self, ensemble, X):
        x = check_points(X)
        u1, u2 = ensemble.density(self.kernel_, x)
        return np.column_stack([u1, u2])


class FemSolver(_SolverMixin, BaseEstimator):
    """Mass-lumped P1 finite elements with semi-implicit Euler stepping.

    Parameters mirror :class:`crossdiff.fem.FemConfig`; ``predict`` is
    piecewise linear interpolation of the nodal values.
    """

    def __init__(self, coeffs=None, domain=(0.0, 1.0), dt=1e-5, T=0.01, delta=0.0,
                 cutoff_eps=1e-6, fp_tol=1e-8, max_fp_iters=100, snapshot_times=()):
        self.coeffs = coeffs
        self.domain = domain
        self.dt = dt
        self.T = T
        self.delta = delta
        self.cutoff_eps = cutoff_eps
        self.fp_tol = fp_tol
        self.max_fp_iters = max_fp_iters
        self.snapshot_times = snapshot_times

    def fit(self, X, y=None):
        X, grid, steps = self._prepare_fit(X)
        self.config_ = _fem.FemConfig(self.dt_, float(self.delta), float(self.cutoff_eps),
                                      float(self.fp_tol), int(self.max_fp_iters))
        state = _fem.FemState(grid, X[:, 0], X[:, 1], 0.0)
        self.initial_state_ = state
        start = time.perf_counter()
        final, snaps, stats = _fem.fem_run(self.coeffs, self.config_, state, self.n_steps_,
                                           snapshot_steps=steps)
        self.elapsed_ = time.perf_counter() - start
        self.state_ = final
        self.snapshots_ = {self.step_time(k): v for k, v in sorted(snaps.items())}
        self.stats_ = stats
        return self

    def predict(self, X):
        check_is_fitted(self, "state_")
        return self.density(self.state_, X)

    @staticmethod
    def density(state, X):
        x = check_points(X)
        return np.column_stack([np.interp(x, state.nodes, state.u1), np.interp(x, state.nodes, state.u2)])
