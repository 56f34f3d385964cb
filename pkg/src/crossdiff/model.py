"""Coefficients, flux and reaction terms of the two-population system

    du_i/dt - div J_i(u1, u2) = f_i(u1, u2),   i = 1, 2

with

    J_i = u_i (a_i1 du1/dx + a_i2 du2/dx + b_i q) + c_i du_i/dx
    f_i = u_i (alpha_i - beta_i1 u1 - beta_i2 u2)
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ValidationError

DriftField = Callable[[np.ndarray, float], np.ndarray]


def zero_drift(x, t=0.0):
    return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class ConstantDrift:
    value: float = 0.0

    def __call__(self, x, t=0.0):
        return np.full_like(np.asarray(x, dtype=float), self.value)


@dataclass(frozen=True)
class LinearDrift:
    """q(x) = slope * (x - center); the second experiment uses slope=-3, center=0.5."""

    slope: float
    center: float = 0.0

    def __call__(self, x, t=0.0):
        return self.slope * (np.asarray(x, dtype=float) - self.center)


DRIFT_PRESETS = {
    "zero": lambda **kw: ConstantDrift(0.0),
    "constant": lambda value=0.0, **kw: ConstantDrift(float(value)),
    "linear": lambda slope=0.0, center=0.0, **kw: LinearDrift(float(slope), float(center)),
}


def make_drift(name: str, **params) -> DriftField:
    try:
        factory = DRIFT_PRESETS[name]
    except KeyError:
        raise ValidationError(f"unknown drift preset {name!r}", ["drift"]) from None
    return factory(**params)


@dataclass(frozen=True)
class ModelCoefficients:
    a11: float = 0.0
    a12: float = 0.0
    a21: float = 0.0
    a22: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    b1: float = 0.0
    b2: float = 0.0
    alpha1: float = 0.0
    alpha2: float = 0.0
    beta11: float = 0.0
    beta12: float = 0.0
    beta21: float = 0.0
    beta22: float = 0.0
    q: DriftField = field(default=ConstantDrift(0.0), compare=False)

    def __post_init__(self):
        nonneg = ("a11", "a12", "a21", "a22", "c1", "c2", "alpha1", "alpha2",
                  "beta11", "beta12", "beta21", "beta22")
        bad = [name for name in nonneg if not 0.0 <= getattr(self, name) < np.inf]
        bad += [name for name in ("b1", "b2") if not np.isfinite(getattr(self, name))]
        if bad:
            raise ValidationError("coefficients must be finite and nonnegative: " + ", ".join(bad), bad)
        if not callable(self.q):
            raise ValidationError("drift field q must be callable", ["q"])

    @classmethod
    def from_matrix(cls, A, c=(0.0, 0.0), b=(0.0, 0.0), alpha=(0.0, 0.0),
                    beta=((0.0, 0.0), (0.0, 0.0)), q=None) -> "ModelCoefficients":
        A = np.asarray(A, dtype=float)
        beta = np.asarray(beta, dtype=float)
        return cls(a11=A[0, 0], a12=A[0, 1], a21=A[1, 0], a22=A[1, 1],
                   c1=float(c[0]), c2=float(c[1]), b1=float(b[0]), b2=float(b[1]),
                   alpha1=float(alpha[0]), alpha2=float(alpha[1]),
                   beta11=beta[0, 0], beta12=beta[0, 1], beta21=beta[1, 0], beta22=beta[1, 1],
                   q=ConstantDrift(0.0) if q is None else q)

    @property
    def A(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])

    @property
    def c(self) -> np.ndarray:
        return np.array([self.c1, self.c2])

    @property
    def b(self) -> np.ndarray:
        return np.array([self.b1, self.b2])

    @property
    def alpha(self) -> np.ndarray:
        return np.array([self.alpha1, self.alpha2])

    @property
    def beta(self) -> np.ndarray:
        return np.array([[self.beta11, self.beta12], [self.beta21, self.beta22]])

    def as_dict(self) -> dict:
        names = ("a11", "a12", "a21", "a22", "c1", "c2", "b1", "b2", "alpha1", "alpha2",
                 "beta11", "beta12", "beta21", "beta22")
        return {name: float(getattr(self, name)) for name in names}


class Ellipticity(enum.Enum):
    ELLIPTIC = "elliptic"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class EllipticityClass:
    discriminant: float
    detA: float
    eigenvalues: tuple
    label: Ellipticity


def classify_matrix(coeffs: ModelCoefficients) -> EllipticityClass:
    """Classify A by the sign of 4*a11*a22 - (a12 + a21)**2.

    A strictly positive discriminant is the uniform ellipticity condition
    under which the entropy estimate holds; zero or negative values are
    reported as DEGENERATE. ``eigenvalues`` are those of A itself (possibly
    complex), not of its symmetric part.
    """
    A = coeffs.A
    disc = 4.0 * coeffs.a11 * coeffs.a22 - (coeffs.a12 + coeffs.a21) ** 2
    det = coeffs.a11 * coeffs.a22 - coeffs.a12 * coeffs.a21
    eig = tuple(np.linalg.eigvals(A).tolist())
    label = Ellipticity.ELLIPTIC if disc > 0 else Ellipticity.DEGENERATE
    return EllipticityClass(float(disc), float(det), eig, label)


def flux(coeffs: ModelCoefficients, u1, u2, grad_u1, grad_u2, q_val):
    """Return (J1, J2); works elementwise on arrays."""
    J1 = u1 * (coeffs.a11 * grad_u1 + coeffs.a12 * grad_u2 + coeffs.b1 * q_val) + coeffs.c1 * grad_u1
    J2 = u2 * (coeffs.a21 * grad_u1 + coeffs.a22 * grad_u2 + coeffs.b2 * q_val) + coeffs.c2 * grad_u2
    return J1, J2


def reaction(coeffs: ModelCoefficients, u1, u2):
    f1 = u1 * (coeffs.alpha1 - coeffs.beta11 * u1 - coeffs.beta12 * u2)
    f2 = u2 * (coeffs.alpha2 - coeffs.beta21 * u1 - coeffs.beta22 * u2)
    return f1, f2
