"""
Pauli-basis decomposition, reconstruction and incomplete density matrices.

A basis index is a tuple (v_1, ..., v_N) with v_k in {0, 1, 2, 3} naming
I, X, Y, Z on qubit k; qubit A comes first, matching the tensor ordering.
"""
import logging
from functools import lru_cache
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from qcore import as_matrix, qubits_for_dim

logger = logging.getLogger(__name__)

PauliIndex = Tuple[int, ...]

PAULI_MATRICES = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=np.complex128)
PAULI_LABELS = 'IXYZ'
IMAGINARY_TOL = 1e-10


def pauli_indices(n_qubits: int) -> List[PauliIndex]:
    """All 4^N indices in lexicographic order, identity first"""
    return list(product(range(4), repeat=n_qubits))


def non_identity_indices(n_qubits: int) -> List[PauliIndex]:
    return pauli_indices(n_qubits)[1:]


def pauli_label(index: PauliIndex) -> str:
    return ''.join(PAULI_LABELS[v] for v in index)


def parse_pauli_label(label: str) -> PauliIndex:
    try:
        return tuple(PAULI_LABELS.index(ch) for ch in label.upper())
    except ValueError:
        raise ValueError(f"Invalid Pauli label '{label}', expected letters from {PAULI_LABELS}")


def pauli_operator(index: Sequence[int]) -> np.ndarray:
    result = np.ones((1, 1), dtype=np.complex128)
    for v in index:
        if v not in (0, 1, 2, 3):
            raise ValueError(f"Invalid Pauli index {tuple(index)}")
        result = np.kron(result, PAULI_MATRICES[v])
    return result


@lru_cache(maxsize=None)
def _operator_stack(n_qubits: int) -> np.ndarray:
    stack = np.array([pauli_operator(v) for v in pauli_indices(n_qubits)])
    stack.setflags(write=False)
    return stack


def pauli_coefficients(rho) -> Dict[PauliIndex, float]:
    """c(v) = Tr(sigma_v rho) for every basis index"""
    m = as_matrix(rho)
    n = qubits_for_dim(m.shape[0])
    # Tr(P rho) = sum_ij P_ij rho_ji
    values = np.einsum('kij,ji->k', _operator_stack(n), m)
    worst = float(np.max(np.abs(values.imag)))
    if worst > IMAGINARY_TOL:
        logger.warning(f"Pauli coefficients carry imaginary parts up to {worst:.2e}; input is not Hermitian")
    return dict(zip(pauli_indices(n), values.real.tolist()))


def reconstruct(coefficients: Dict[PauliIndex, float]) -> np.ndarray:
    """rho = 2^-N sum_v c(v) sigma_v"""
    if not coefficients:
        raise ValueError("No coefficients to reconstruct from")
    n = len(next(iter(coefficients)))
    dim = 2 ** n
    rho = np.zeros((dim, dim), dtype=np.complex128)
    for index, c in coefficients.items():
        if len(index) != n:
            raise ValueError(f"Mixed index lengths in coefficient map ({index})")
        rho += c * pauli_operator(index)
    return rho / dim


def _check_ignored(ignored: Iterable[Sequence[int]], n: int, allow_identity: bool) -> List[PauliIndex]:
    result = []
    for index in ignored:
        index = tuple(int(v) for v in index)
        if len(index) != n or any(v not in (0, 1, 2, 3) for v in index):
            raise ValueError(f"Invalid Pauli index {index} for {n} qubits")
        if not allow_identity and not any(index):
            raise ValueError("The all-identity term is never measured and cannot be ignored "
                             "(pass allow_identity=True to drop it anyway)")
        result.append(index)
    return sorted(set(result))


def incomplete_density(rho, ignored: Iterable[Sequence[int]], allow_identity: bool = False) -> np.ndarray:
    """rho - 2^-N sum over ignored v of c(v) sigma_v; no renormalisation"""
    m = as_matrix(rho)
    n = qubits_for_dim(m.shape[0])
    ignored = _check_ignored(ignored, n, allow_identity)
    result = m.copy()
    for index in ignored:
        op = pauli_operator(index)
        c = float(np.real(np.einsum('ij,ji->', op, m)))
        result -= c * op / m.shape[0]
    return result


def incomplete_batch(matrices, ignored: Iterable[Sequence[int]], allow_identity: bool = False) -> np.ndarray:
    """``incomplete_density`` applied to a (n, d, d) stack with one shared ignored set"""
    stack = np.asarray(matrices, dtype=np.complex128)
    if stack.ndim != 3:
        raise ValueError(f"Expected a (n, d, d) stack, got shape {stack.shape}")
    n = qubits_for_dim(stack.shape[1])
    ignored = _check_ignored(ignored, n, allow_identity)
    if not ignored:
        return stack.copy()
    lookup = {v: k for k, v in enumerate(pauli_indices(n))}
    ops = _operator_stack(n)[[lookup[v] for v in ignored]]
    coeffs = np.einsum('kij,bji->bk', ops, stack).real
    return stack - np.einsum('bk,kij->bij', coeffs, ops) / stack.shape[1]


def retained_to_ignored(retained: Iterable[Sequence[int]], n_qubits: int) -> List[PauliIndex]:
    """Non-identity indices not in ``retained``"""
    keep = {tuple(int(v) for v in r) for r in retained}
    return [v for v in non_identity_indices(n_qubits) if v not in keep]


def random_retained_subset(n_qubits: int, budget: int, rng: np.random.Generator) -> List[PauliIndex]:
    """``budget`` non-identity bases drawn without replacement"""
    pool = non_identity_indices(n_qubits)
    if not 0 <= budget <= len(pool):
        raise ValueError(f"Measurement budget must lie in [0, {len(pool)}], got {budget}")
    picks = rng.choice(len(pool), size=budget, replace=False) if budget else []
    return [pool[int(i)] for i in sorted(picks)]


def measurement_count(ignored: Optional[Iterable[Sequence[int]]], n_qubits: int) -> int:
    ignored = {tuple(v) for v in (ignored or [])}
    return sum(1 for v in non_identity_indices(n_qubits) if v not in ignored)
