"""
Two-channel real tensors (real part, imaginary part) fed to the network
"""
from typing import Iterable, Sequence

import numpy as np

from qcore import as_matrix

EXTENDED_CHANNELS = 2
SYMMETRY_TOL = 1e-12


def to_extended_tensor(rho) -> np.ndarray:
    """(d, d) complex -> (d, d, 2) float64; channel 0 real parts, channel 1 imaginary parts"""
    m = as_matrix(rho)
    return np.stack([m.real, m.imag], axis=-1)


def from_extended_tensor(tensor) -> np.ndarray:
    t = np.asarray(tensor, dtype=np.float64)
    if t.ndim != 3 or t.shape[0] != t.shape[1] or t.shape[2] != EXTENDED_CHANNELS:
        raise ValueError(f"Expected a (d, d, 2) tensor, got shape {t.shape}")
    return t[..., 0] + 1j * t[..., 1]


def to_extended_batch(matrices: Iterable) -> np.ndarray:
    """Stack of extended tensors, shape (n, d, d, 2)"""
    stacked = np.asarray([as_matrix(m) for m in matrices], dtype=np.complex128)
    if stacked.ndim != 3:
        raise ValueError("Batch is empty or holds matrices of different sizes")
    return np.stack([stacked.real, stacked.imag], axis=-1)


def channel_symmetry_error(tensor) -> float:
    """max deviation of channel 0 from symmetry and channel 1 from antisymmetry"""
    t = np.asarray(tensor, dtype=np.float64)
    real, imag = t[..., 0], t[..., 1]
    return float(max(np.max(np.abs(real - real.T), initial=0.0),
                     np.max(np.abs(imag + imag.T), initial=0.0)))


def records_to_arrays(records: Sequence):
    """Network inputs plus class ids and EoF targets from labelled records"""
    x = to_extended_batch(r.rho.matrix for r in records)
    labels = np.array([int(r.label) for r in records], dtype=np.int64)
    eof = np.array([np.nan if r.eof is None else r.eof for r in records], dtype=np.float64)
    return x, labels, eof
