"""
Linear algebra and state primitives for XpookyNet
"""

from .linalg import (
    ComplexMatrix,
    DimensionMismatchError,
    NotHermitianError,
    as_matrix,
    tensor_product,
    tensor_all,
    partial_trace,
    partial_transpose,
    hermitian_eigenvalues,
    hermitian_eigh,
    hermitian_function,
)
from .states import (
    DensityMatrix,
    StateVector,
    InvalidDensityMatrixError,
    density_violations,
    qubits_for_dim,
    purity,
    von_neumann_entropy,
    PSD_TOL,
)

__all__ = [
    'ComplexMatrix',
    'DimensionMismatchError',
    'NotHermitianError',
    'as_matrix',
    'tensor_product',
    'tensor_all',
    'partial_trace',
    'partial_transpose',
    'hermitian_eigenvalues',
    'hermitian_eigh',
    'hermitian_function',
    'DensityMatrix',
    'StateVector',
    'InvalidDensityMatrixError',
    'density_violations',
    'qubits_for_dim',
    'purity',
    'von_neumann_entropy',
    'PSD_TOL',
]
