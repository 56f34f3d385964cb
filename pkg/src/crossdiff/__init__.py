"""Particle and finite-element solvers for a two-population cross-diffusion system in 1D."""

__version__ = "0.1.0"

from .errors import (CrossDiffError, GridMismatchError, InvalidNError, NegativeInputError,
                     NonConvergenceError, ParseError, SingularSystemError, SolverFailure,
                     ValidationError)
from .estimators import FemSolver, ParticleSolver
from .exact import ExactContactSolution, barenblatt, exact_pair, interface, support_radius
from .kernel import KernelConfig
from .model import ModelCoefficients, classify_matrix, flux, reaction

__all__ = [
    "CrossDiffError", "ExactContactSolution", "FemSolver", "GridMismatchError", "InvalidNError",
    "KernelConfig", "ModelCoefficients", "NegativeInputError", "NonConvergenceError", "ParseError",
    "ParticleSolver", "SingularSystemError", "SolverFailure", "ValidationError", "barenblatt",
    "classify_matrix", "exact_pair", "flux", "interface", "reaction", "support_radius",
]
