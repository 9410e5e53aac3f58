"""Strict positivity of linear maps on matrices and D-majorization.

Submodules:

* :mod:`dmajor.linalg` - hermitian eigensolvers, trace norm, PSD tools
* :mod:`dmajor.channels` - Choi and Kraus forms, strict positivity, block form
* :mod:`dmajor.vector` - d-majorization of real vectors and stochastic witnesses
* :mod:`dmajor.matrix` - D-majorization of matrices
* :mod:`dmajor.cli` - the ``dmajor`` command
"""
from . import catalog, channels, linalg, matrix, sampling, solver, vector
from .channels import ChoiMatrix, KrausSet
from .exceptions import DMajorError
from .matrix import DMajInstance, construct_channel_pair, d_maj_feasibility, qubit_check
from .solver import FeasibilityReport, SolverParams, Verdict
from .vector import StochasticMatrix, d_majorization_check, transfer_matrix

__version__ = "0.1.0"

__all__ = [
    "ChoiMatrix", "KrausSet", "DMajorError", "DMajInstance", "FeasibilityReport", "SolverParams",
    "StochasticMatrix", "Verdict", "catalog", "channels", "construct_channel_pair",
    "d_maj_feasibility", "d_majorization_check", "linalg", "matrix", "qubit_check", "sampling",
    "solver", "transfer_matrix", "vector",
]
