"""Active-set nonnegative least squares (Lawson & Hanson, 1974).

    minimize ||A x - b||_2  subject to  x >= 0

The dual vector A^T (b - A x) is updated through the cached Gram matrix
A^T A and A^T b; the passive-set subproblems are solved on the columns of
A itself, which keeps the conditioning of A rather than of A^T A.
"""
from __future__ import annotations

import numpy as np

from .errors import SolverFailure


def nnls(A, b, maxiter=None, tol=None):
    """Solve the NNLS problem.

    Parameters
    ----------
    A : array_like, shape (m, n)
    b : array_like, shape (m,)
    maxiter : int, optional
        Cap on inner iterations; defaults to ``10 * n``. Kernel matrices
        with epsilon close to the grid spacing routinely need more than 3 n.
    tol : float, optional
        Dual feasibility tolerance.

    Returns
    -------
    x : ndarray, shape (n,)
    rnorm : float
        ``||A x - b||_2`` at the solution.

    Raises
    ------
    SolverFailure
        If the iteration cap is exceeded.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    if b.shape != (m,):
        raise ValueError(f"b must have shape ({m},), got {b.shape}")
    if maxiter is None:
        maxiter = 10 * n
    if tol is None:
        scale = max(1.0, np.abs(A).max(initial=0.0)) * max(1.0, np.abs(b).max(initial=0.0))
        tol = 10.0 * np.finfo(float).eps * max(m, n) * scale

    gram = A.T @ A
    atb = A.T @ b
    x = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    excluded = np.zeros(n, dtype=bool)
    it = 0

    while n:
        dual = atb - gram @ x
        candidates = np.where(passive | excluded, -np.inf, dual)
        j = int(np.argmax(candidates))
        if candidates[j] <= tol:
            break
        passive[j] = True
        first = True
        while True:
            it += 1
            if it > maxiter:
                raise SolverFailure(f"NNLS exceeded {maxiter} iterations")
            cols = np.flatnonzero(passive)
            z = np.zeros(n)
            z[cols] = np.linalg.lstsq(A[:, cols], b, rcond=None)[0]
            if first and z[j] <= 0.0:
                # column is numerically useless at this point; skip it until x changes
                passive[j] = False
                excluded[j] = True
                break
            first = False
            if np.all(z[cols] > 0.0):
                x = z
                excluded[:] = False
                break
            neg = passive & (z <= 0.0)
            step = np.min(x[neg] / (x[neg] - z[neg]))
            x = x + step * (z - x)
            passive &= x > 0.0
            x[~passive] = 0.0

    rnorm = float(np.linalg.norm(A @ x - b))
    return x, rnorm


def kkt_violation(A, b, x) -> dict:
    """Measure how far ``x`` is from satisfying the NNLS optimality conditions.

    Returns the most negative entry of x, the most negative gradient entry
    on the active (zero) set, and the largest complementarity product, each
    as a nonnegative violation size.
    """
    A = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float)
    grad = A.T @ (A @ x - np.asarray(b, dtype=float))
    return {
        "primal": float(max(0.0, -x.min(initial=0.0))),
        "dual": float(max(0.0, -grad[x <= 0.0].min(initial=0.0))),
        "complementarity": float(np.abs(x * grad).max(initial=0.0)),
    }
