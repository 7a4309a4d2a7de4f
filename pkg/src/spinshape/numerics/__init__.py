from .eigen import (
    EigenSolverError,
    Eigenpairs,
    FactorizationBreakdown,
    count_below,
    eigen_lowest,
    eigenvalues_in,
    eigenvalues_lowest,
    worker_count,
)
from .grid import Grid, GridMismatchError, SpinorField, inner_product, sample
from .operators import (
    BandedSymmetricOperator,
    LoweringOperator,
    discretize_direct,
    discretize_factorized,
    laplacian_dirichlet,
    lowering_operator,
)
from .spectrum import KERNEL_CUTOFF, BoundSpectrum, bound_spectrum, edge_weight

__all__ = [
    "BandedSymmetricOperator",
    "BoundSpectrum",
    "EigenSolverError",
    "Eigenpairs",
    "FactorizationBreakdown",
    "Grid",
    "GridMismatchError",
    "KERNEL_CUTOFF",
    "LoweringOperator",
    "SpinorField",
    "bound_spectrum",
    "count_below",
    "discretize_direct",
    "discretize_factorized",
    "edge_weight",
    "eigen_lowest",
    "eigenvalues_in",
    "eigenvalues_lowest",
    "inner_product",
    "laplacian_dirichlet",
    "lowering_operator",
    "sample",
    "worker_count",
]
