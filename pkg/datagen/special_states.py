"""
Parametrised three-qubit families used for the fully entangled (ABC) class:
GHZ, W and graph states. Basis order is |q_A q_B q_C>.
"""
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from qcore import StateVector

GRAPH_SIGNS = np.array([1, 1, 1, -1, 1, 1, -1, 1], dtype=np.float64)
W_TRIPLE = (1, 2, 4)          # |001>, |010>, |100>
W_REMAINDER = (0, 3, 5, 6, 7)


class SpecialKind(str, Enum):
    GHZ = 'ghz'
    W = 'w'
    GRAPH = 'graph'


def _half_open(rng: np.random.Generator, upper: float) -> float:
    # uniform on (0, upper]
    return upper * (1.0 - rng.random())


def _qubit(theta: float, phase: float) -> np.ndarray:
    return np.array([np.cos(theta), np.exp(1j * phase) * np.sin(theta)], dtype=np.complex128)


def _complex_gaussian(rng: np.random.Generator, size) -> np.ndarray:
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def ghz_state(
    rng: Optional[np.random.Generator] = None,
    epsilon: Optional[float] = None,
    phi: Optional[float] = None,
    thetas: Optional[Sequence[float]] = None,
    phases: Optional[Sequence[float]] = None,
) -> StateVector:
    """cos(e)|000> + sin(e) e^{i phi} |phi_A phi_B phi_C>, normalised.

    Parameters left as None are drawn from rng: epsilon in (0, pi/4],
    thetas in (0, pi/2], phi and the local phases in [0, 2 pi).
    """
    if rng is None and any(p is None for p in (epsilon, phi, thetas, phases)):
        raise ValueError("rng is required when any GHZ parameter is left unset")
    if epsilon is None:
        epsilon = _half_open(rng, np.pi / 4)
    if thetas is None:
        thetas = [_half_open(rng, np.pi / 2) for _ in range(3)]
    if phi is None:
        phi = 2 * np.pi * rng.random()
    if phases is None:
        phases = 2 * np.pi * rng.random(3)

    product = np.kron(np.kron(_qubit(thetas[0], phases[0]), _qubit(thetas[1], phases[1])),
                      _qubit(thetas[2], phases[2]))
    amplitudes = np.sin(epsilon) * np.exp(1j * phi) * product
    amplitudes[0] += np.cos(epsilon)
    return StateVector.normalized(amplitudes)


def w_state(
    rng: Optional[np.random.Generator] = None,
    coefficients: Optional[Sequence[complex]] = None,
    remainder: Optional[Sequence[complex]] = None,
) -> StateVector:
    """a|001> + b|010> + c|100> - d|phi>, normalised.

    |phi> is a normalised superposition of the five basis states outside the W triple.
    """
    if coefficients is None:
        coefficients = _complex_gaussian(rng, 4)
    a, b, c, d = coefficients
    if remainder is None:
        remainder = _complex_gaussian(rng, len(W_REMAINDER)) if d != 0 else np.zeros(len(W_REMAINDER))
    remainder = np.asarray(remainder, dtype=np.complex128)
    norm = np.linalg.norm(remainder)
    if norm > 0:
        remainder = remainder / norm

    amplitudes = np.zeros(8, dtype=np.complex128)
    amplitudes[list(W_TRIPLE)] = (a, b, c)
    amplitudes[list(W_REMAINDER)] = -d * remainder
    return StateVector.normalized(amplitudes)


def graph_state(
    rng: Optional[np.random.Generator] = None,
    alphas: Optional[Sequence[float]] = None,
) -> StateVector:
    """Signed superposition (+,+,+,-,+,+,-,+) with weights alpha_i in (0, 1]"""
    if alphas is None:
        alphas = 1.0 - rng.random(8)
    return StateVector.normalized(GRAPH_SIGNS * np.asarray(alphas, dtype=np.float64))


def special_state(kind, rng: np.random.Generator) -> StateVector:
    kind = SpecialKind(kind)
    if kind is SpecialKind.GHZ:
        return ghz_state(rng)
    if kind is SpecialKind.W:
        return w_state(rng)
    return graph_state(rng)
