"""Entropy, error norms and mass audits on a common sampling grid."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, NegativeInputError, ValidationError

NEGATIVE_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class GridFunctionPair:
    """Two population densities sampled on a strictly increasing grid."""

    grid: np.ndarray
    u1: np.ndarray
    u2: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        u1 = np.asarray(self.u1, dtype=float)
        u2 = np.asarray(self.u2, dtype=float)
        bad = []
        if grid.ndim != 1 or grid.size < 2 or not np.all(np.diff(grid) > 0):
            bad.append("grid")
        if u1.shape != grid.shape:
            bad.append("u1")
        if u2.shape != grid.shape:
            bad.append("u2")
        if bad:
            raise ValidationError("invalid grid function: " + ", ".join(bad), bad)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "u1", u1)
        object.__setattr__(self, "u2", u2)

    @property
    def components(self) -> tuple:
        return self.u1, self.u2

    @classmethod
    def from_callable(cls, grid, fn) -> "GridFunctionPair":
        u1, u2 = fn(np.asarray(grid, dtype=float))
        return cls(grid, u1, u2)


def _integrate(grid, values):
    return float(np.trapezoid(values, grid))


def entropy_density(s):
    """F(s) = s (ln s - 1) + 1 with F(0) = 1."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(s > 0, s * (np.log(np.where(s > 0, s, 1.0)) - 1.0) + 1.0, 1.0)
    return out


def entropy(sample: GridFunctionPair) -> float:
    """Trapezoidal integral of F(u1) + F(u2).

    Values down to -1e-12 are treated as round-off and clamped to zero.
    """
    total = 0.0
    for u in sample.components:
        if u.size and u.min() < -NEGATIVE_SLACK:
            raise NegativeInputError(f"entropy needs nonnegative densities, min = {u.min():.3e}")
        total += _integrate(sample.grid, entropy_density(np.maximum(u, 0.0)))
    return total


def _check_grids(approx, reference):
    if approx.grid.shape != reference.grid.shape or not np.array_equal(approx.grid, reference.grid):
        raise GridMismatchError("approximation and reference are sampled on different grids")


def l2_relative_error(approx: GridFunctionPair, reference: GridFunctionPair, mask=None) -> tuple:
    """Relative L2 errors (e1, e2) by trapezoidal quadrature.

    ``mask`` (boolean, same shape as the grid) restricts both norms to the
    selected points. Where a reference component has zero norm the absolute
    error is returned instead and a RuntimeWarning is issued.
    """
    _check_grids(approx, reference)
    grid = reference.grid
    weight = np.ones_like(grid) if mask is None else np.asarray(mask, dtype=float)
    out = []
    for i, (u, r) in enumerate(zip(approx.components, reference.components), start=1):
        num = np.sqrt(_integrate(grid, weight * (u - r) ** 2))
        den = np.sqrt(_integrate(grid, weight * r ** 2))
        if den == 0.0:
            warnings.warn(f"population {i}: reference has zero L2 norm; returning absolute error",
                          RuntimeWarning, stacklevel=2)
            out.append(float(num))
        else:
            out.append(float(num / den))
    return tuple(out)


def mean_relative_square_error(approx: GridFunctionPair, reference: GridFunctionPair, mask=None) -> float:
    """Mean over both populations of the squared relative L2 error."""
    e1, e2 = l2_relative_error(approx, reference, mask)
    return 0.5 * (e1 * e1 + e2 * e2)


def mass(sample: GridFunctionPair) -> tuple:
    return tuple(_integrate(sample.grid, u) for u in sample.components)


REPORT_COLUMNS = ("time", "e1", "e2", "mrse", "m1", "m2", "entropy")


def error_report(time: float, approx: GridFunctionPair, reference: GridFunctionPair, mask=None) -> dict:
    """One row of the error report; entropy is that of ``approx`` (NaN if it has negative values)."""
    e1, e2 = l2_relative_error(approx, reference, mask)
    m1, m2 = mass(approx)
    try:
        ent = entropy(approx)
    except NegativeInputError:
        ent = float("nan")
    return {"time": time, "e1": e1, "e2": e2, "mrse": 0.5 * (e1 * e1 + e2 * e2),
            "m1": m1, "m2": m2, "entropy": ent}


def estimate_interface(sample: GridFunctionPair) -> float:
    """Contact point where u1 stops dominating u2, scanning from the right.

    Returns the leftmost grid point of the rightmost run of points with
    u1 > u2, i.e. the contact point of a configuration with population 1
    on the right. NaN if u1 never exceeds u2.
    """
    above = sample.u1 > sample.u2
    if not above.any():
        return float("nan")
    idx = sample.grid.size - 1
    while idx >= 0 and not above[idx]:
        idx -= 1
    while idx > 0 and above[idx - 1]:
        idx -= 1
    return float(sample.grid[idx])
