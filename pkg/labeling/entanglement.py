"""
Entanglement quantities and ground-truth labels.

Two-qubit EoF goes through the closed-form concurrence; negativity of the
partial transpose is kept as an independent criterion (exact for 2x2).
"""
import logging
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Dict, Optional, Tuple, Union

import numpy as np

from qcore import (
    as_matrix,
    hermitian_eigenvalues,
    hermitian_function,
    partial_transpose,
    qubits_for_dim,
)

logger = logging.getLogger(__name__)

EOF_THRESHOLD = 1e-9
PT_THRESHOLD = -1e-9
# relative to the largest eigenvalue; below it a spectral value is round-off
SPECTRAL_FLOOR = 1e-14

SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
YY = np.kron(SIGMA_Y, SIGMA_Y)

# cut name -> qubit whose indices get transposed
CUTS = {
    2: {'A|B': 0},
    3: {'A|BC': 0, 'B|AC': 1, 'C|AB': 2},
}


class TwoQubitClass(IntEnum):
    SEP = 0
    ENT = 1

    @property
    def label(self) -> str:
        return ('Sep', 'Ent')[self.value]


class ThreeQubitClass(IntEnum):
    SEP = 0
    AB_C = 1
    A_BC = 2
    AC_B = 3
    ABC = 4

    @property
    def label(self) -> str:
        return ('Sep', 'AB|C', 'A|BC', 'AC|B', 'ABC')[self.value]


StateClass = Union[TwoQubitClass, ThreeQubitClass]


def class_enum(n_qubits: int):
    if n_qubits == 2:
        return TwoQubitClass
    if n_qubits == 3:
        return ThreeQubitClass
    raise ValueError(f"No state classes defined for {n_qubits} qubits")


def class_names(n_qubits: int) -> list:
    return [c.label for c in class_enum(n_qubits)]


@dataclass
class EntanglementReport:
    eof: Optional[float]
    concurrence: Optional[float]
    negativity_by_cut: Dict[str, float] = field(default_factory=dict)
    is_entangled: bool = False


def _require_two_qubits(m: np.ndarray) -> None:
    if m.shape != (4, 4):
        raise ValueError(f"Two-qubit state expected, got a {m.shape[0]}x{m.shape[1]} matrix")


def floored_sqrt(values, scale: Optional[float] = None) -> np.ndarray:
    """Square roots of a spectrum; values below SPECTRAL_FLOOR * scale (default max|v|) count as exact zeros"""
    values = np.asarray(values, dtype=np.float64)
    if scale is None:
        scale = np.max(np.abs(values), initial=0.0)
    cutoff = SPECTRAL_FLOOR * scale
    return np.sqrt(np.where(values > cutoff, values, 0.0))


def concurrence_two_qubit(rho) -> float:
    """Wootters concurrence via the Hermitian form sqrt(rho) rho~ sqrt(rho)"""
    m = as_matrix(rho)
    _require_two_qubits(m)
    rho_tilde = YY @ m.conj() @ YY
    root = hermitian_function(m, floored_sqrt)
    r = root @ rho_tilde @ root
    r = 0.5 * (r + r.conj().T)
    # R scales with Tr(rho)^2 whatever the size of its spectrum
    lambdas = floored_sqrt(hermitian_eigenvalues(r), scale=np.trace(m).real ** 2)
    c = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]
    return float(min(1.0, max(0.0, c)))


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1.0 - x) * np.log2(1.0 - x))


def eof_from_concurrence(c: float) -> float:
    c = min(1.0, max(0.0, c))
    return min(1.0, binary_entropy(0.5 * (1.0 + np.sqrt(1.0 - c * c))))


def eof_two_qubit(rho) -> float:
    """Entanglement of formation in bits"""
    return eof_from_concurrence(concurrence_two_qubit(rho))


def label_two_qubit(rho) -> Tuple[TwoQubitClass, float]:
    """Ent when EoF exceeds the numerical-zero threshold, otherwise Sep"""
    eof = eof_two_qubit(rho)
    return label_from_eof(eof), eof


def label_from_eof(eof: float) -> TwoQubitClass:
    return TwoQubitClass.ENT if eof > EOF_THRESHOLD else TwoQubitClass.SEP


def _cut_subsystem(n_qubits: int, cut) -> int:
    cuts = CUTS.get(n_qubits)
    if cuts is None:
        raise ValueError(f"No cuts defined for {n_qubits} qubits")
    if isinstance(cut, str):
        if cut not in cuts:
            raise ValueError(f"Invalid cut '{cut}' for {n_qubits} qubits, expected one of {list(cuts)}")
        return cuts[cut]
    if isinstance(cut, (int, np.integer)) and 0 <= int(cut) < n_qubits:
        return int(cut)
    raise ValueError(f"Invalid cut {cut!r} for {n_qubits} qubits")


def min_pt_eigenvalue(rho, cut) -> float:
    m = as_matrix(rho)
    n = qubits_for_dim(m.shape[0])
    pt = partial_transpose(m, _cut_subsystem(n, cut), [2] * n)
    return float(hermitian_eigenvalues(pt)[-1])


def negativity(rho, cut) -> float:
    """Sum of |negative eigenvalues| of the partial transpose across ``cut``"""
    m = as_matrix(rho)
    n = qubits_for_dim(m.shape[0])
    pt = partial_transpose(m, _cut_subsystem(n, cut), [2] * n)
    values = hermitian_eigenvalues(pt)
    return float(-np.sum(values[values < 0.0]))


def is_npt(rho, cut) -> bool:
    return min_pt_eigenvalue(rho, cut) < PT_THRESHOLD


def entanglement_report(rho) -> EntanglementReport:
    m = as_matrix(rho)
    n = qubits_for_dim(m.shape[0])
    negativities = {name: negativity(m, name) for name in CUTS[n]}
    if n == 2:
        c = concurrence_two_qubit(m)
        eof = eof_from_concurrence(c)
        return EntanglementReport(eof, c, negativities, eof > EOF_THRESHOLD)
    entangled = any(-v < PT_THRESHOLD for v in negativities.values())
    return EntanglementReport(None, None, negativities, entangled)
