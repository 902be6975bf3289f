"""
SGD with classical momentum and a reduce-on-plateau learning-rate schedule
"""
import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

logger = logging.getLogger(__name__)


def sgd_step(params: np.ndarray, grads: np.ndarray, velocity: np.ndarray, lr: float, momentum: float) -> None:
    """In place: v <- mu v + g; theta <- theta - lr v"""
    if params.shape != grads.shape or params.shape != velocity.shape:
        raise ValueError(
            f"Parameter {params.shape}, gradient {grads.shape} and velocity {velocity.shape} shapes differ"
        )
    velocity *= momentum
    velocity += grads
    params -= lr * velocity


class SGD:
    def __init__(self, params: np.ndarray, grads: np.ndarray, lr: float, momentum: float = 0.0):
        if lr <= 0:
            raise ValueError("Learning rate must be positive")
        if not 0.0 <= momentum < 1.0:
            raise ValueError("Momentum must lie in [0, 1)")
        self.params = params
        self.grads = grads
        self.lr = float(lr)
        self.momentum = float(momentum)
        self.velocity = np.zeros_like(params)

    def step(self) -> None:
        sgd_step(self.params, self.grads, self.velocity, self.lr, self.momentum)


@dataclass
class PlateauScheduler:
    """Multiply lr by ``factor`` after ``patience`` epochs without an improvement above ``min_delta``"""
    lr: float
    patience: int = 2
    factor: float = 0.5
    min_lr: float = 1e-5
    min_delta: float = 1e-4
    best: float = float('inf')
    wait: int = 0
    history: List[float] = field(default_factory=list)

    def __post_init__(self):
        if not 0.0 < self.factor < 1.0:
            raise ValueError("Plateau factor must lie in (0, 1)")
        if self.patience < 1:
            raise ValueError("Plateau patience must be at least 1")

    def update(self, val_loss: float) -> float:
        if val_loss < self.best - self.min_delta:
            self.best = val_loss
            self.wait = 0
        else:
            self.wait += 1
            if self.wait >= self.patience:
                new_lr = max(self.lr * self.factor, self.min_lr)
                if new_lr < self.lr:
                    logger.info(f"Validation loss plateaued, learning rate {self.lr:.3g} -> {new_lr:.3g}")
                self.lr = new_lr
                self.wait = 0
        self.history.append(self.lr)
        return self.lr


def plateau_update(scheduler: PlateauScheduler, val_loss: float) -> float:
    return scheduler.update(val_loss)
