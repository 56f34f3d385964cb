"""Input validation helpers shared by the estimators and the CLI."""
from __future__ import annotations

import math

import numpy as np
from sklearn.utils.validation import check_array

from .errors import ValidationError


def check_domain(domain) -> tuple:
    try:
        a, b = (float(v) for v in domain)
    except (TypeError, ValueError):
        raise ValidationError(f"domain must be a pair (a, b), got {domain!r}", ["domain"]) from None
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise ValidationError(f"domain must satisfy a < b, got ({a}, {b})", ["domain"])
    return a, b


def check_initial_samples(X, min_points: int = 2) -> np.ndarray:
    """Validate initial densities sampled on a uniform grid: shape (n_points, 2), finite, >= 0."""
    X = check_array(X, dtype=np.float64, ensure_min_samples=min_points)
    if X.shape[1] != 2:
        raise ValidationError(f"expected 2 columns (one per population), got {X.shape[1]}", ["X"])
    if X.min() < 0:
        raise ValidationError("initial densities must be nonnegative", ["X"])
    return X


def check_points(X) -> np.ndarray:
    """Evaluation points as a 1D array; accepts shape (m,) or (m, 1)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 2 and X.shape[1] == 1:
        X = X[:, 0]
    X = check_array(X, ensure_2d=False, dtype=np.float64)
    if X.ndim != 1:
        raise ValidationError("evaluation points must be one-dimensional", ["X"])
    return X


def n_time_steps(T: float, dt: float) -> tuple:
    """Number of steps M and the step T / M actually used (T = M * dt exactly).

    M is the smallest integer with T / M <= dt, so the nominal dt is never exceeded.
    """
    if not (T >= 0 and dt > 0):
        raise ValidationError("need T >= 0 and dt > 0", ["T", "dt"])
    if T == 0:
        return 0, float(dt)
    M = max(1, math.ceil(T / dt * (1.0 - 1e-12)))
    return M, T / M


def snapshot_steps(times, T: float, n_steps: int) -> dict:
    """Map requested snapshot times to step indices (nearest step)."""
    out = {}
    for t in times:
        t = float(t)
        if not 0 <= t <= T * (1 + 1e-12):
            raise ValidationError(f"snapshot time {t} outside [0, {T}]", ["snapshot_times"])
        step = 0 if T == 0 else int(round(t / T * n_steps))
        out[step] = t
    return out
