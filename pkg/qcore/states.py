"""
Quantum state types and the scalar functionals defined on them.
"""
from dataclasses import dataclass

import numpy as np

from .linalg import ComplexMatrix, as_matrix, hermitian_eigenvalues

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
NORM_TOL = 1e-12
PSD_TOL = -1e-10
MAX_QUBITS = 3


class InvalidDensityMatrixError(ValueError):
    """Matrix violates Hermiticity, unit trace or positivity"""


def qubits_for_dim(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or 2 ** n != dim:
        raise ValueError(f"Dimension {dim} is not a power of two")
    if n > MAX_QUBITS:
        raise ValueError(f"At most {MAX_QUBITS} qubits are supported, got {n}")
    return n


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        a = np.asarray(amplitudes, dtype=np.complex128).ravel()
        norm = np.linalg.norm(a)
        if norm == 0.0:
            raise ValueError("Cannot normalize the zero vector")
        return cls(a / norm)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def n_qubits(self) -> int:
        return qubits_for_dim(self.dim)

    def projector(self) -> ComplexMatrix:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def is_normalized(self) -> bool:
        return abs(float(np.vdot(self.amplitudes, self.amplitudes).real) - 1.0) < NORM_TOL

    def __array__(self, dtype=None, copy=None):
        return self.amplitudes if dtype is None else self.amplitudes.astype(dtype)


def density_violations(m: ComplexMatrix) -> list:
    """Human-readable list of the density-matrix invariants ``m`` breaks"""
    problems = []
    herm_err = float(np.max(np.abs(m - m.conj().T), initial=0.0))
    if herm_err >= HERMITIAN_TOL:
        problems.append(f"not Hermitian (max deviation {herm_err:.3e})")
        return problems
    trace_err = abs(complex(np.trace(m)) - 1.0)
    if trace_err >= TRACE_TOL:
        problems.append(f"trace off by {trace_err:.3e}")
    min_eig = float(hermitian_eigenvalues(m)[-1])
    if min_eig < PSD_TOL:
        problems.append(f"negative eigenvalue {min_eig:.3e}")
    return problems


@dataclass(frozen=True)
class DensityMatrix:
    matrix: ComplexMatrix
    n_qubits: int

    @classmethod
    def from_matrix(cls, matrix, validate: bool = True) -> "DensityMatrix":
        m = as_matrix(matrix)
        n = qubits_for_dim(m.shape[0])
        if validate:
            problems = density_violations(m)
            if problems:
                raise InvalidDensityMatrixError("; ".join(problems))
        return cls(m, n)

    @classmethod
    def from_state(cls, state: StateVector) -> "DensityMatrix":
        return cls(state.projector(), state.n_qubits)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def purity(rho) -> float:
    """Tr(rho^2)"""
    m = as_matrix(rho)
    return float(np.vdot(m, m).real)


def von_neumann_entropy(rho) -> float:
    """Entropy in bits, with 0 log 0 taken as 0"""
    values = hermitian_eigenvalues(rho)
    values = values[values > 0.0]
    return max(0.0, float(-np.sum(values * np.log2(values))))
