"""Gaussian mollifier and mollified particle densities in 1D.

Sums over particles are truncated at ``|x - y_k| > TRUNCATION * epsilon``
(relative contribution below 1e-14 of the peak), which lets evaluation touch
only the particles inside a window around each point. ``exact=True`` keeps
the full O(N) sum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

GAUSSIAN = "gaussian"
FAMILIES = (GAUSSIAN,)
TRUNCATION = 8.0
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class KernelConfig:
    epsilon: float
    epsilon_tilde: float = 1e-6
    family: str = GAUSSIAN

    def __post_init__(self):
        bad = []
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            bad.append("epsilon")
        if not (np.isfinite(self.epsilon_tilde) and self.epsilon_tilde > 0):
            bad.append("epsilon_tilde")
        if self.family not in FAMILIES:
            bad.append("family")
        if bad:
            raise ValidationError("invalid kernel configuration: " + ", ".join(bad), bad)

    @property
    def support(self) -> float:
        return TRUNCATION * self.epsilon


def mollifier(cfg: KernelConfig, x):
    """xi_eps(x) = exp(-(x/eps)**2 / 2) / (eps * sqrt(2 pi))."""
    z = np.asarray(x, dtype=float) / cfg.epsilon
    return (_INV_SQRT_2PI / cfg.epsilon) * np.exp(-0.5 * z * z)


def mollifier_grad(cfg: KernelConfig, x):
    x = np.asarray(x, dtype=float)
    return -(x / cfg.epsilon ** 2) * mollifier(cfg, x)


def kernel_matrix(cfg: KernelConfig, points, centers) -> np.ndarray:
    """Dense matrix M[k, l] = xi_eps(points[k] - centers[l])."""
    points = np.asarray(points, dtype=float)
    centers = np.asarray(centers, dtype=float)
    return mollifier(cfg, points[:, None] - centers[None, :])


def _window(cfg, positions, weights, x, exact):
    """Return (offsets x - y, weights) as 2D arrays, one row per evaluation point.

    Entries outside the truncation window carry zero weight.
    """
    if exact or positions.size == 0:
        return x[:, None] - positions[None, :], np.broadcast_to(weights, (x.size, positions.size))
    order = np.argsort(positions, kind="stable")
    ys = positions[order]
    ws = weights[order]
    r = cfg.support
    lo = np.searchsorted(ys, x - r, side="left")
    hi = np.searchsorted(ys, x + r, side="right")
    width = int((hi - lo).max(initial=0))
    if width == 0:
        return np.zeros((x.size, 0)), np.zeros((x.size, 0))
    idx = lo[:, None] + np.arange(width)[None, :]
    inside = idx < hi[:, None]
    idx = np.minimum(idx, ys.size - 1)
    return x[:, None] - ys[idx], np.where(inside, ws[idx], 0.0)


def _prepare(positions, weights, x):
    positions = np.asarray(positions, dtype=float).ravel()
    weights = np.asarray(weights, dtype=float).ravel()
    if positions.shape != weights.shape:
        raise ValidationError("positions and weights must have equal length", ["positions", "weights"])
    x = np.asarray(x, dtype=float)
    return positions, weights, x


def density(cfg: KernelConfig, positions, weights, x, exact: bool = False):
    """Mollified density sum_k w_k xi_eps(x - y_k); scalar or array ``x``."""
    positions, weights, x = _prepare(positions, weights, x)
    flat = np.atleast_1d(x).ravel()
    d, w = _window(cfg, positions, weights, flat, exact)
    out = (w * mollifier(cfg, d)).sum(axis=1)
    return out.reshape(x.shape) if x.ndim else float(out[0])


def density_grad(cfg: KernelConfig, positions, weights, x, exact: bool = False):
    positions, weights, x = _prepare(positions, weights, x)
    flat = np.atleast_1d(x).ravel()
    d, w = _window(cfg, positions, weights, flat, exact)
    out = (w * mollifier_grad(cfg, d)).sum(axis=1)
    return out.reshape(x.shape) if x.ndim else float(out[0])


def density_and_grad(cfg: KernelConfig, positions, weights, x, exact: bool = False):
    """Density and its derivative from one window gather; ``x`` must be 1D."""
    positions, weights, x = _prepare(positions, weights, x)
    d, w = _window(cfg, positions, weights, np.atleast_1d(x), exact)
    k = w * mollifier(cfg, d)
    return k.sum(axis=1), -(k * d).sum(axis=1) / cfg.epsilon ** 2
