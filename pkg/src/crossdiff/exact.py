"""Closed-form segregated solution built from the Barenblatt profile.

For A = [[1, 1], [1, 1]] and c = b = 0 the total density s = u1 + u2 solves
the porous medium equation s_t = (s s_x)_x. Starting from the Barenblatt
profile split at x0, the two populations stay segregated and the contact
point moves with the total-density velocity -s_x, i.e. eta' = eta / (3 (t + t*)).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

# integral of B(., t) over its support, independent of t and t*
BARENBLATT_MASS = 16.0 * np.sqrt(3.0) / 3.0


def barenblatt(t_star, x, t):
    """B(x, t) = 2 (t+t*)^(-1/3) [1 - x^2 (t+t*)^(-2/3) / 12]_+."""
    s = t + t_star
    if np.any(np.asarray(s) <= 0):
        raise ValidationError("barenblatt requires t + t_star > 0", ["t", "t_star"])
    x = np.asarray(x, dtype=float)
    val = 2.0 * s ** (-1.0 / 3.0) * np.maximum(0.0, 1.0 - x * x * s ** (-2.0 / 3.0) / 12.0)
    return val if val.ndim else float(val)


def barenblatt_dx(t_star, x, t):
    """Spatial derivative of the Barenblatt profile (zero outside the support)."""
    s = t + t_star
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < support_radius(t_star, t)
    val = np.where(inside, -x * s ** (-1.0) / 3.0, 0.0)
    return val if val.ndim else float(val)


def support_radius(t_star, t):
    return np.sqrt(12.0) * (t + t_star) ** (1.0 / 3.0)


def interface(t_star, x0, t):
    """Contact point eta(t) = x0 ((t + t*) / t*)^(1/3), so that eta(0) = x0."""
    return x0 * ((t + t_star) / t_star) ** (1.0 / 3.0)


@dataclass(frozen=True)
class ExactContactSolution:
    t_star: float = 0.01
    x0: float = 0.0
    R: float = 1.0

    def __post_init__(self):
        bad = []
        if not self.t_star > 0:
            bad.append("t_star")
        if not self.R > 0:
            bad.append("R")
        elif not abs(self.x0) < support_radius(self.t_star, 0.0):
            bad.append("x0")
        if bad:
            raise ValidationError("invalid contact solution parameters: " + ", ".join(bad), bad)

    def check_horizon(self, T: float) -> None:
        """Raise unless the support stays strictly inside (-R, R) on [0, T]."""
        if not support_radius(self.t_star, T) < self.R:
            raise ValidationError(
                f"support radius {support_radius(self.t_star, T):.6g} reaches the boundary R={self.R}",
                ["T"])

    def interface(self, t):
        return interface(self.t_star, self.x0, t)

    def total(self, x, t):
        return barenblatt(self.t_star, x, t)

    def __call__(self, x, t):
        return exact_pair(self, x, t)


def exact_pair(sol: ExactContactSolution, x, t):
    """Return (u1, u2): u1 lives right of eta(t), u2 left of it.

    At x == eta(t) each population takes half of B so u1 + u2 == B everywhere.
    """
    x = np.asarray(x, dtype=float)
    B = np.asarray(barenblatt(sol.t_star, x, t))
    eta = sol.interface(t)
    h1 = np.where(x > eta, 1.0, np.where(x == eta, 0.5, 0.0))
    u1 = h1 * B
    u2 = B - u1
    if x.ndim == 0:
        return float(u1), float(u2)
    return u1, u2
