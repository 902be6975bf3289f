"""
Mini-batch training loop with plateau scheduling and best-by-validation checkpointing
"""
import logging
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
import pandas as pd

from .layers import ShapeMismatchError
from .losses import LossKind, compute_loss, one_hot
from .model import Head, Model
from .optim import SGD, PlateauScheduler

logger = logging.getLogger(__name__)

HISTORY_COLUMNS = ['epoch', 'train_loss', 'val_loss', 'train_metric', 'val_metric', 'lr']


@dataclass
class TrainConfig:
    lr: float = 0.01
    momentum: float = 0.9
    batch_size: int = 64
    epochs: int = 20
    plateau: bool = False
    patience: int = 2
    factor: float = 0.5
    min_lr: float = 1e-5
    min_delta: float = 1e-4
    loss: Optional[LossKind] = None
    seed: int = 0
    save_best: bool = True

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError("momentum must lie in [0, 1)")
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("batch_size and epochs must be positive")
        if not 0.0 < self.factor < 1.0:
            raise ValueError("plateau factor must lie in (0, 1)")
        if self.patience < 1:
            raise ValueError("plateau patience must be at least 1")
        if self.loss is not None:
            self.loss = LossKind(self.loss)

    def to_dict(self) -> dict:
        d = asdict(self)
        d['loss'] = self.loss.value if self.loss else None
        return d


@dataclass
class TrainResult:
    model: Model
    history: pd.DataFrame
    best_epoch: int
    best_val_loss: float


def prepare_targets(model: Model, y) -> np.ndarray:
    """Labels or EoF values in the layout the model's head is trained against"""
    y = np.asarray(y)
    head = model.spec.head
    if head is Head.SOFTMAX:
        return one_hot(y.astype(np.int64), model.output_size)
    if np.any(np.isnan(y.astype(np.float64))):
        raise ValueError("Targets contain NaN (three-qubit records carry no EoF)")
    return y.astype(np.float64).reshape(-1, 1)


def _metric(model: Model, outputs: np.ndarray, targets: np.ndarray) -> float:
    """Accuracy for classifiers, MAE for the regression head"""
    head = model.spec.head
    if head is Head.SOFTMAX:
        return float(np.mean(np.argmax(outputs, axis=1) == np.argmax(targets, axis=1)))
    if head is Head.SIGMOID:
        return float(np.mean((outputs[:, 0] > 0.5) == (targets[:, 0] > 0.5)))
    return float(np.mean(np.abs(np.clip(outputs[:, 0], 0.0, 1.0) - targets[:, 0])))


def evaluate_loss(model: Model, x: np.ndarray, targets: np.ndarray, loss_kind: LossKind,
                  batch_size: int = 1024):
    outputs = np.concatenate([model.forward(x[i:i + batch_size]) for i in range(0, len(x), batch_size)])
    loss, _ = compute_loss(loss_kind, outputs, targets)
    return loss, _metric(model, outputs, targets)


def train(
    model: Model,
    train_x: np.ndarray,
    train_y: np.ndarray,
    val_x: Optional[np.ndarray] = None,
    val_y: Optional[np.ndarray] = None,
    config: Optional[TrainConfig] = None,
) -> TrainResult:
    """Epoch-shuffled SGD; the returned model holds the lowest-validation-loss parameters"""
    config = config or TrainConfig()
    loss_kind = config.loss or model.spec.loss
    if loss_kind is not model.spec.loss:
        raise ValueError(f"Loss {loss_kind.value} does not match the {model.spec.head.value} head")

    train_x = np.asarray(train_x, dtype=np.float64)
    if len(train_x) == 0:
        raise ValueError("Training set is empty")
    if train_x.shape[1:] != model.input_shape:
        raise ShapeMismatchError(f"Model expects inputs of shape {model.input_shape}, got {train_x.shape[1:]}")
    if len(train_x) != len(train_y):
        raise ValueError(f"{len(train_x)} inputs but {len(train_y)} targets")
    train_t = prepare_targets(model, train_y)

    if val_x is None or len(val_x) == 0:
        logger.warning("No validation set given, validating on the training set")
        val_x, val_t = train_x, train_t
    else:
        val_x = model.check_batch(val_x)
        val_t = prepare_targets(model, val_y)

    rng = np.random.default_rng(config.seed)
    optimizer = SGD(model.params, model.grads, config.lr, config.momentum)
    scheduler = PlateauScheduler(config.lr, config.patience, config.factor, config.min_lr, config.min_delta)

    rows = []
    best_loss, best_epoch = np.inf, 0
    best_params = model.params.copy()
    n = len(train_x)
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        total_loss, outputs = 0.0, np.empty((n, model.output_size))
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            batch_loss, outputs[start:start + len(idx)] = model.loss_and_grad(train_x[idx], train_t[idx])
            optimizer.step()
            total_loss += batch_loss * len(idx)
        train_loss = total_loss / n
        train_metric = _metric(model, outputs, train_t[order])
        val_loss, val_metric = evaluate_loss(model, val_x, val_t, loss_kind)

        lr_used = optimizer.lr
        if config.plateau:
            optimizer.lr = scheduler.update(val_loss)
        rows.append([epoch, train_loss, val_loss, train_metric, val_metric, lr_used])
        logger.info(
            f"Epoch {epoch}/{config.epochs}: loss {train_loss:.4f}, val loss {val_loss:.4f}, "
            f"val metric {val_metric:.4f}, lr {lr_used:.3g}"
        )

        if not np.isfinite(train_loss):
            logger.warning(f"Training loss diverged at epoch {epoch}, stopping")
            break
        if val_loss < best_loss:
            best_loss, best_epoch = val_loss, epoch
            best_params = model.params.copy()

    if config.save_best and best_epoch:
        model.params[...] = best_params
        logger.info(f"Restored parameters from epoch {best_epoch} (val loss {best_loss:.4f})")

    model.trained = True
    history = pd.DataFrame(rows, columns=HISTORY_COLUMNS)
    return TrainResult(model, history, best_epoch, float(best_loss))


def predict(model: Model, tensors: np.ndarray) -> np.ndarray:
    return model.predict(tensors)
