"""Numerical toolkit for the elliptic quantum group E_{tau,gamma/2}(gl_N).

Dynamical R-matrices, fusion into symmetric and exterior powers of the
vector representation, the associated transfer matrices, and the
Ruijsenaars commuting difference operators, with the defining identities
exposed as machine-checkable properties (see ``ellqg.verify`` and the
``ellqg`` command line tool).
"""

__version__ = "0.1.0"

from .rmatrix import (
    ModelParams,
    PoleError,
    default_params,
    flip_operator,
    rmatrix,
    rmatrix_gamma_zero_limit,
    rmatrix_residue,
)
from .tensorspace import (
    GradedOperator,
    basis_weight,
    numeric_rank,
    permutation_operator,
    projector_antisym,
    projector_sym,
    same_column_space,
    shift_lambda,
)
from .theta import ThetaConvergenceError, ThetaParams, jtheta, jtheta_dz

__all__ = [
    "GradedOperator",
    "ModelParams",
    "PoleError",
    "ThetaConvergenceError",
    "ThetaParams",
    "basis_weight",
    "default_params",
    "flip_operator",
    "jtheta",
    "jtheta_dz",
    "numeric_rank",
    "permutation_operator",
    "projector_antisym",
    "projector_sym",
    "rmatrix",
    "rmatrix_gamma_zero_limit",
    "rmatrix_residue",
    "same_column_space",
    "shift_lambda",
    "__version__",
]
