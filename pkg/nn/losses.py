"""
Loss functions returning (value, gradient w.r.t. predictions). Natural log.
"""
from enum import Enum
from typing import Tuple

import numpy as np

PROB_CLAMP = 1e-12


class LossKind(str, Enum):
    CCE = 'cce'
    BCE = 'bce'
    MSE = 'mse'


def one_hot(labels, k: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise ValueError(f"Labels must lie in [0, {k}), got range [{labels.min()}, {labels.max()}]")
    out = np.zeros((labels.shape[0], k))
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


def _pair(predictions, targets) -> Tuple[np.ndarray, np.ndarray]:
    p = np.asarray(predictions, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if p.shape != t.shape:
        raise ValueError(f"Predictions {p.shape} and targets {t.shape} differ in shape")
    if p.size == 0:
        raise ValueError("Cannot compute a loss on an empty batch")
    return p, t


def categorical_cross_entropy(predictions, targets) -> Tuple[float, np.ndarray]:
    """-mean_b sum_k t log p over (batch, k) probabilities and one-hot targets"""
    p, t = _pair(predictions, targets)
    batch = p.shape[0]
    clipped = np.clip(p, PROB_CLAMP, 1.0)
    loss = -np.sum(t * np.log(clipped)) / batch
    return float(loss), -t / clipped / batch


def binary_cross_entropy(predictions, targets) -> Tuple[float, np.ndarray]:
    p, t = _pair(predictions, targets)
    n = p.size
    clipped = np.clip(p, PROB_CLAMP, 1.0 - PROB_CLAMP)
    loss = -np.sum(t * np.log(clipped) + (1.0 - t) * np.log(1.0 - clipped)) / n
    grad = (-t / clipped + (1.0 - t) / (1.0 - clipped)) / n
    return float(loss), grad


def mean_squared_error(predictions, targets) -> Tuple[float, np.ndarray]:
    p, t = _pair(predictions, targets)
    diff = p - t
    return float(np.mean(diff ** 2)), 2.0 * diff / p.size


LOSSES = {
    LossKind.CCE: categorical_cross_entropy,
    LossKind.BCE: binary_cross_entropy,
    LossKind.MSE: mean_squared_error,
}


def compute_loss(kind, predictions, targets) -> Tuple[float, np.ndarray]:
    return LOSSES[LossKind(kind)](predictions, targets)
