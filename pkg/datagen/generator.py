"""
Random states, mixtures and the per-class construction recipes for two- and
three-qubit datasets.
"""
import logging
from dataclasses import asdict, dataclass, field
from enum import Enum, IntEnum
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from labeling import (
    EOF_THRESHOLD,
    ThreeQubitClass,
    TwoQubitClass,
    StateClass,
    class_enum,
    eof_two_qubit,
    is_npt,
    label_two_qubit,
)
from qcore import (
    ComplexMatrix,
    DensityMatrix,
    StateVector,
    hermitian_eigenvalues,
    purity,
    tensor_all,
)

from .special_states import SpecialKind, special_state

logger = logging.getLogger(__name__)

DEFAULT_M_RANGE = (1, 10)
DEFAULT_NONZERO_FRACTION = 0.75
DEFAULT_PURITY_HALF_WIDTH = 0.02
DEFAULT_PURITY_TARGETS = (1.0, 0.83, 0.56, 0.37)
NONZERO_EPS = 1e-8
REJECTION_DRAW_BUDGET = 100_000

TermFactory = Callable[[np.random.Generator], ComplexMatrix]


class RetryBudgetExceeded(RuntimeError):
    """A rejection loop ran out of candidates"""


class GeneratorMode(str, Enum):
    PSD_GUARANTEED = 'psd-guaranteed'
    HERMITIAN_REJECTION = 'hermitian-rejection'

    @classmethod
    def _missing_(cls, value):
        if value == 'paper-literal':
            return cls.HERMITIAN_REJECTION
        return None


class TwoQubitSource(str, Enum):
    RECIPE = 'recipe'
    RANDOM = 'random'


@dataclass
class GenSpec:
    n_qubits: int
    count_per_class: int
    m_range: Tuple[int, int] = DEFAULT_M_RANGE
    target_purity: Optional[Tuple[float, float]] = None
    nonzero_fraction: Optional[float] = None
    seed: int = 0
    generator_mode: GeneratorMode = GeneratorMode.PSD_GUARANTEED
    two_qubit_source: TwoQubitSource = TwoQubitSource.RECIPE
    retry_budget: int = 10_000
    audit_samples: int = 100

    def __post_init__(self):
        if self.n_qubits not in (2, 3):
            raise ValueError(f"n_qubits must be 2 or 3, got {self.n_qubits}")
        if self.count_per_class < 1:
            raise ValueError("count_per_class must be positive")
        if isinstance(self.m_range, (int, np.integer)):
            self.m_range = (int(self.m_range), int(self.m_range))
        self.m_range = (int(self.m_range[0]), int(self.m_range[1]))
        if not 1 <= self.m_range[0] <= self.m_range[1]:
            raise ValueError(f"Invalid mixture-term range {self.m_range}")
        if self.target_purity is not None:
            if isinstance(self.target_purity, (int, float)):
                self.target_purity = (float(self.target_purity), DEFAULT_PURITY_HALF_WIDTH)
            self.target_purity = (float(self.target_purity[0]), float(self.target_purity[1]))
        if self.nonzero_fraction is None:
            self.nonzero_fraction = DEFAULT_NONZERO_FRACTION if self.n_qubits == 2 else 0.0
        if not 0.0 <= self.nonzero_fraction <= 1.0:
            raise ValueError("nonzero_fraction must lie in [0, 1]")
        self.generator_mode = GeneratorMode(self.generator_mode)
        self.two_qubit_source = TwoQubitSource(self.two_qubit_source)
        self.seed = int(self.seed) & 0xFFFFFFFFFFFFFFFF

    def purity_bin(self) -> Optional[Tuple[float, float]]:
        if self.target_purity is None:
            return None
        centre, half_width = self.target_purity
        floor = 1.0 / 2 ** self.n_qubits
        lo, hi = max(floor, centre - half_width), min(1.0, centre + half_width)
        if lo > hi:
            raise ValueError(f"Purity bin around {centre} is empty for {self.n_qubits} qubits")
        return lo, hi

    def classes(self):
        return list(class_enum(self.n_qubits))

    def to_dict(self) -> dict:
        d = asdict(self)
        d['generator_mode'] = self.generator_mode.value
        d['two_qubit_source'] = self.two_qubit_source.value
        d['m_range'] = list(self.m_range)
        d['target_purity'] = list(self.target_purity) if self.target_purity else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GenSpec":
        return cls(**d)


@dataclass
class LabeledState:
    rho: DensityMatrix
    label: StateClass
    eof: Optional[float]
    purity: float
    m_used: int = 1
    seed_used: int = 0


@dataclass
class MixtureResult:
    matrix: ComplexMatrix
    m_used: int
    weights: np.ndarray = field(repr=False)
    attempts: int = 1


def random_pure_state(n_qubits: int, rng: np.random.Generator) -> StateVector:
    """Haar-random direction: i.i.d. complex Gaussians, normalised"""
    if n_qubits not in (1, 2, 3):
        raise ValueError(f"n_qubits must be 1, 2 or 3, got {n_qubits}")
    dim = 2 ** n_qubits
    return StateVector.normalized(rng.standard_normal(dim) + 1j * rng.standard_normal(dim))


def haar_unitary(dim: int, rng: np.random.Generator) -> ComplexMatrix:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _ginibre(dim: int, rng: np.random.Generator) -> ComplexMatrix:
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def random_density_matrix(n_qubits: int, mode, rng: np.random.Generator) -> ComplexMatrix:
    """psd-guaranteed: M M^dag / Tr. hermitian-rejection: H = M + M^dag, rejected unless PSD."""
    mode = GeneratorMode(mode)
    dim = 2 ** n_qubits
    if mode is GeneratorMode.PSD_GUARANTEED:
        m = _ginibre(dim, rng)
        w = m @ m.conj().T
        return w / np.trace(w).real

    for draw in range(REJECTION_DRAW_BUDGET):
        m = _ginibre(dim, rng)
        h = m + m.conj().T
        trace = np.trace(h).real
        if trace > 0 and hermitian_eigenvalues(h)[-1] >= 0.0:
            logger.debug(f"hermitian-rejection draw accepted after {draw + 1} attempts")
            return h / trace
    raise RetryBudgetExceeded(
        f"hermitian-rejection generation found no PSD matrix in {REJECTION_DRAW_BUDGET} draws ({n_qubits} qubits)"
    )


def draw_weights(m: int, rng: np.random.Generator) -> np.ndarray:
    """Flat Dirichlet over the m-simplex"""
    if m == 1:
        return np.ones(1)
    return rng.dirichlet(np.ones(m))


def _draw_m(m: Union[int, Sequence[int]], rng: np.random.Generator) -> int:
    if isinstance(m, (int, np.integer)):
        return int(m)
    lo, hi = m
    return int(rng.integers(lo, hi + 1))


def mix_to_purity(
    term_factory: TermFactory,
    m: Union[int, Sequence[int]],
    rng: np.random.Generator,
    weights: Optional[Sequence[float]] = None,
    target: Optional[Tuple[float, float]] = None,
    retry_budget: int = 10_000,
) -> MixtureResult:
    """rho = sum_i lambda_i term_i, resampled until purity(rho) lies in ``target``.

    ``m`` is a fixed term count or an inclusive (lo, hi) range; fixed ``weights``
    must lie on the simplex and imply a fixed ``m``.
    """
    if weights is not None:
        weights = np.asarray(weights, dtype=np.float64)
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError("Mixture weights must be non-negative and sum to 1")

    for attempt in range(1, retry_budget + 1):
        m_used = len(weights) if weights is not None else _draw_m(m, rng)
        lam = weights if weights is not None else draw_weights(m_used, rng)
        rho = sum(l * term_factory(rng) for l in lam)
        if target is None:
            return MixtureResult(rho, m_used, lam, attempt)
        p = purity(rho)
        if target[0] <= p <= target[1]:
            return MixtureResult(rho, m_used, lam, attempt)
    raise RetryBudgetExceeded(f"Purity bin {target} not reached in {retry_budget} mixtures")


def _projector(amplitudes) -> ComplexMatrix:
    a = np.asarray(amplitudes, dtype=np.complex128)
    return np.outer(a, a.conj())


def _product_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    v = random_pure_state(1, rng).amplitudes
    for _ in range(n - 1):
        v = np.kron(v, random_pure_state(1, rng).amplitudes)
    return v


def interleave_ac_b(psi_ac, psi_b) -> np.ndarray:
    """Embed |psi_AC> (a0..a3) and |psi_B> (b0, b1) into the A,B,C ordering"""
    a = np.asarray(psi_ac, dtype=np.complex128)
    b = np.asarray(psi_b, dtype=np.complex128)
    return np.array([
        a[0] * b[0], a[1] * b[0], a[0] * b[1], a[1] * b[1],
        a[2] * b[0], a[3] * b[0], a[2] * b[1], a[3] * b[1],
    ])


def _abc_vector(rng: np.random.Generator) -> np.ndarray:
    kind = list(SpecialKind)[int(rng.integers(len(SpecialKind)))]
    psi = special_state(kind, rng).amplitudes
    local = tensor_all(haar_unitary(2, rng) for _ in range(3))
    return local @ psi


def term_factory(state_class: StateClass, spec: GenSpec) -> TermFactory:
    """Density-matrix source for one mixture term of ``state_class``"""
    if spec.n_qubits == 2:
        if state_class == TwoQubitClass.ENT:
            return lambda rng: _projector(random_pure_state(2, rng).amplitudes)
        if spec.target_purity is not None:
            return lambda rng: _projector(_product_vector(rng, 2))
        return lambda rng: tensor_all(
            random_density_matrix(1, spec.generator_mode, rng) for _ in range(2)
        )

    cls = ThreeQubitClass(state_class)
    if cls is ThreeQubitClass.SEP:
        return lambda rng: _projector(_product_vector(rng, 3))
    if cls is ThreeQubitClass.AB_C:
        return lambda rng: _projector(np.kron(random_pure_state(2, rng).amplitudes,
                                              random_pure_state(1, rng).amplitudes))
    if cls is ThreeQubitClass.A_BC:
        return lambda rng: _projector(np.kron(random_pure_state(1, rng).amplitudes,
                                              random_pure_state(2, rng).amplitudes))
    if cls is ThreeQubitClass.AC_B:
        return lambda rng: _projector(interleave_ac_b(random_pure_state(2, rng).amplitudes,
                                                      random_pure_state(1, rng).amplitudes))
    return lambda rng: _projector(_abc_vector(rng))


def class_confirmed(state_class: StateClass, rho: ComplexMatrix, n_qubits: int) -> bool:
    """Entanglement oracle for the class a candidate was built for"""
    if n_qubits == 2:
        if state_class == TwoQubitClass.ENT:
            return eof_two_qubit(rho) > EOF_THRESHOLD and is_npt(rho, 'A|B')
        return True
    cls = ThreeQubitClass(state_class)
    if cls is ThreeQubitClass.SEP:
        return True
    if cls is ThreeQubitClass.AB_C:
        return is_npt(rho, 'A|BC')
    if cls is ThreeQubitClass.A_BC:
        return is_npt(rho, 'C|AB')
    if cls is ThreeQubitClass.AC_B:
        return is_npt(rho, 'A|BC')
    return all(is_npt(rho, cut) for cut in ('A|BC', 'B|AC', 'C|AB'))


def nonzero_fraction(rho: ComplexMatrix) -> float:
    return float(np.mean(np.abs(rho) > NONZERO_EPS))


def generate_class(
    state_class: StateClass,
    spec: GenSpec,
    rng: np.random.Generator,
    seed_used: int = 0,
) -> LabeledState:
    """One labelled state built with the recipe of ``state_class``"""
    enum = class_enum(spec.n_qubits)
    if isinstance(state_class, IntEnum) and not isinstance(state_class, enum):
        raise ValueError(f"Class {state_class!r} does not belong to {spec.n_qubits}-qubit data")
    if state_class not in spec.classes():
        raise ValueError(f"Class {state_class!r} does not belong to {spec.n_qubits}-qubit data")
    state_class = enum(state_class)
    factory = term_factory(state_class, spec)
    target = spec.purity_bin()

    budget = spec.retry_budget
    while budget > 0:
        mixture = mix_to_purity(factory, spec.m_range, rng, target=target, retry_budget=budget)
        budget -= mixture.attempts
        rho = 0.5 * (mixture.matrix + mixture.matrix.conj().T)
        rho = rho / np.trace(rho).real
        if nonzero_fraction(rho) < spec.nonzero_fraction:
            continue
        if not class_confirmed(state_class, rho, spec.n_qubits):
            logger.debug(f"{state_class.label} candidate rejected by the entanglement oracle")
            continue
        eof = eof_two_qubit(rho) if spec.n_qubits == 2 else None
        return LabeledState(
            rho=DensityMatrix.from_matrix(rho),
            label=state_class,
            eof=eof,
            purity=purity(rho),
            m_used=mixture.m_used,
            seed_used=seed_used,
        )
    raise RetryBudgetExceeded(
        f"No acceptable {state_class.label} state within {spec.retry_budget} candidates"
    )


def generate_random_two_qubit(spec: GenSpec, rng: np.random.Generator, seed_used: int = 0) -> LabeledState:
    """Draw a random two-qubit matrix and label it by its EoF"""
    for _ in range(spec.retry_budget):
        rho = random_density_matrix(2, spec.generator_mode, rng)
        rho = 0.5 * (rho + rho.conj().T)
        if nonzero_fraction(rho) < spec.nonzero_fraction:
            continue
        p = purity(rho)
        target = spec.purity_bin()
        if target is not None and not target[0] <= p <= target[1]:
            continue
        label, eof = label_two_qubit(rho)
        return LabeledState(DensityMatrix.from_matrix(rho), label, eof, p, 1, seed_used)
    raise RetryBudgetExceeded(f"No random two-qubit state passed the filters in {spec.retry_budget} draws")
