"""
Measurement-budget and purity sweeps over a trained model
"""
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from datagen import GenSpec, TwoQubitClass, build_dataset, derive_seed, haar_unitary
from encoding import (
    incomplete_batch,
    non_identity_indices,
    random_retained_subset,
    records_to_arrays,
    retained_to_ignored,
    to_extended_batch,
)
from labeling import class_names
from nn import Model, Task

from .metrics import ConfusionMatrix, MetricSet, classification_metrics, confusion_matrix

logger = logging.getLogger(__name__)

PHI_PLUS = np.array([1.0, 0.0, 0.0, 1.0], dtype=np.complex128) / np.sqrt(2.0)
DEFAULT_BUDGETS = tuple(range(1, 16))
DEFAULT_TRIALS = 20


class SweepSpace(str, Enum):
    ENTIRE = 'entire'
    BELL = 'bell'


@dataclass
class SweepCurve:
    kind: str
    x: List[float]
    y: List[float]
    metric: str = 'acc'
    extras: Dict[str, List[float]] = field(default_factory=dict)
    metadata: Dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise ValueError("Sweep x and metric lists differ in length")
        steps = np.diff(np.asarray(self.x, dtype=np.float64))
        if len(steps) and not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValueError(f"Sweep x values must be strictly monotone, got {self.x}")

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({'x': self.x, self.metric: self.y})
        for name, values in self.extras.items():
            frame[name] = values
        return frame


@dataclass
class PuritySweepResult:
    curve: SweepCurve
    confusion: Dict[float, ConfusionMatrix]
    metrics: Dict[float, MetricSet]


def _require_classifier(model: Model, n_qubits: int) -> None:
    if not model.trained:
        raise ValueError("Sweeps need a trained model")
    if model.spec.task is Task.REGRESS:
        raise ValueError("Sweeps evaluate classifiers, got a regression model")
    dim = 2 ** n_qubits
    if model.input_shape != (dim, dim, 2):
        raise ValueError(f"Sweep needs a {n_qubits}-qubit model, got input shape {model.input_shape}")


def bell_space_states(count: int, rng: np.random.Generator) -> np.ndarray:
    """(U_A x U_B)|Phi+> projectors with Haar-random local unitaries"""
    out = np.empty((count, 4, 4), dtype=np.complex128)
    for i in range(count):
        psi = np.kron(haar_unitary(2, rng), haar_unitary(2, rng)) @ PHI_PLUS
        out[i] = np.outer(psi, psi.conj())
    return out


def _sweep_inputs(records: Sequence, space: SweepSpace, seed: int):
    matrices = np.array([r.rho.matrix for r in records])
    labels = np.array([int(r.label) for r in records], dtype=np.int64)
    if space is SweepSpace.ENTIRE:
        return matrices, labels
    negatives = matrices[labels == TwoQubitClass.SEP]
    if len(negatives) == 0:
        raise ValueError("Bell-space sweep needs separable test states")
    positives = bell_space_states(len(negatives), np.random.default_rng(derive_seed(seed, 0xBE11)))
    return (np.concatenate([negatives, positives]),
            np.concatenate([np.zeros(len(negatives), np.int64), np.ones(len(positives), np.int64)]))


def _require_seed(seed: int) -> None:
    if int(seed) < 0:
        raise ValueError(f"Sweep seed must be non-negative, got {seed}")


def incomplete_sweep(
    model: Model,
    test_records: Sequence,
    budgets: Sequence[int] = DEFAULT_BUDGETS,
    trials: int = DEFAULT_TRIALS,
    space=SweepSpace.ENTIRE,
    seed: int = 0,
) -> SweepCurve:
    """Mean accuracy per number of retained non-identity Pauli bases"""
    _require_classifier(model, 2)
    space = SweepSpace(space)
    budgets = sorted(int(b) for b in budgets)
    if len(set(budgets)) != len(budgets):
        raise ValueError(f"Duplicate measurement budgets in {budgets}")
    limit = len(non_identity_indices(2))
    if budgets and (budgets[0] < 0 or budgets[-1] > limit):
        raise ValueError(f"Budgets must lie in [0, {limit}]")
    if trials < 1:
        raise ValueError("trials must be positive")
    _require_seed(seed)

    matrices, labels = _sweep_inputs(test_records, space, seed)
    means, stds = [], []
    for budget in budgets:
        accuracies = []
        for trial in range(trials):
            rng = np.random.default_rng(np.random.SeedSequence([seed, budget, trial]))
            ignored = retained_to_ignored(random_retained_subset(2, budget, rng), 2)
            x = to_extended_batch(incomplete_batch(matrices, ignored))
            accuracies.append(float(np.mean(model.predict_classes(x) == labels)))
        means.append(float(np.mean(accuracies)))
        stds.append(float(np.std(accuracies)))
        logger.info(f"{space.value} space, {budget} measurements: accuracy {means[-1]:.4f}")

    return SweepCurve(
        kind='incomplete',
        x=budgets,
        y=means,
        extras={'std': stds},
        metadata={'space': space.value, 'seed': seed, 'trials': trials, 'samples': int(len(labels))},
    )


def purity_sweep(
    model: Model,
    spec: GenSpec,
    purity_targets: Sequence[float],
    seed: int = 0,
    half_width: Optional[float] = None,
    workers: int = 1,
) -> PuritySweepResult:
    """Fresh balanced test sets per purity bin, with per-class metrics"""
    _require_classifier(model, spec.n_qubits)
    _require_seed(seed)
    names = class_names(spec.n_qubits)
    width = half_width if half_width is not None else (spec.target_purity[1] if spec.target_purity else 0.02)

    confusion, metrics, acc, fnr, mcc = {}, {}, [], [], []
    for i, target in enumerate(purity_targets):
        bin_spec = replace(spec, target_purity=(float(target), width), seed=derive_seed(seed, i))
        dataset = build_dataset(bin_spec, workers=workers)
        x, labels, _ = records_to_arrays(dataset.records)
        cm = confusion_matrix(labels, model.predict_classes(x), len(names), names)
        result = classification_metrics(cm)
        confusion[float(target)] = cm
        metrics[float(target)] = result
        acc.append(result.acc)
        fnr.append(result.fnr)
        mcc.append(result.mcc)
        logger.info(f"Purity {target}: ACC {result.acc:.4f}, FNR {result.fnr:.4f}, MCC {result.mcc:.4f}")

    curve = SweepCurve(
        kind='purity',
        x=[float(t) for t in purity_targets],
        y=acc,
        extras={'fnr': fnr, 'mcc': mcc},
        metadata={'seed': seed, 'count_per_class': spec.count_per_class, 'half_width': width},
    )
    return PuritySweepResult(curve, confusion, metrics)
