"""
Confusion matrices and classification / regression metrics
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd


@dataclass
class ConfusionMatrix:
    """Rows are actual classes, columns predicted classes"""
    counts: np.ndarray
    labels: List[str] = field(default_factory=list)

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        k = self.counts.shape[0]
        if self.counts.ndim != 2 or self.counts.shape[1] != k:
            raise ValueError(f"Confusion matrix must be square, got shape {self.counts.shape}")
        if np.any(self.counts < 0):
            raise ValueError("Confusion matrix counts must be non-negative")
        if not self.labels:
            self.labels = [str(i) for i in range(k)]

    @property
    def k(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def one_vs_rest(self, c: int) -> Dict[str, int]:
        tp = int(self.counts[c, c])
        fn = int(self.counts[c, :].sum()) - tp
        fp = int(self.counts[:, c].sum()) - tp
        return {'tp': tp, 'fn': fn, 'fp': fp, 'tn': self.total - tp - fn - fp}

    def to_frame(self) -> pd.DataFrame:
        """One row per cell"""
        rows = [
            {'actual': self.labels[i], 'predicted': self.labels[j], 'count': int(self.counts[i, j])}
            for i in range(self.k) for j in range(self.k)
        ]
        return pd.DataFrame(rows, columns=['actual', 'predicted', 'count'])


@dataclass
class ClassMetrics:
    acc: float
    fnr: float
    mcc: float


@dataclass
class MetricSet:
    acc: float
    fnr: float
    mcc: float
    mae: Optional[float] = None
    mcc_per_class_mean: Optional[float] = None
    per_class: Dict[str, ClassMetrics] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            'acc': self.acc,
            'fnr': self.fnr,
            'mcc': self.mcc,
            'mae': self.mae,
            'mcc_per_class_mean': self.mcc_per_class_mean,
            'per_class': {name: vars(m).copy() for name, m in self.per_class.items()},
        }


def confusion_matrix(actual: Sequence[int], predicted: Sequence[int], k: int,
                     labels: Optional[List[str]] = None) -> ConfusionMatrix:
    actual = np.asarray(actual, dtype=np.int64)
    predicted = np.asarray(predicted, dtype=np.int64)
    if actual.shape != predicted.shape:
        raise ValueError(f"{actual.size} actual labels but {predicted.size} predictions")
    for name, values in (('actual', actual), ('predicted', predicted)):
        if values.size and (values.min() < 0 or values.max() >= k):
            raise ValueError(f"{name} labels must lie in [0, {k})")
    counts = np.zeros((k, k), dtype=np.int64)
    np.add.at(counts, (actual, predicted), 1)
    return ConfusionMatrix(counts, list(labels) if labels else [])


def _ratio(num: float, den: float) -> float:
    return float(num / den) if den else 0.0


def _clamp_mcc(value: float) -> float:
    return float(min(1.0, max(-1.0, value)))


def binary_mcc(tp: int, tn: int, fp: int, fn: int) -> float:
    den = float(tp + fp) * float(tp + fn) * float(tn + fp) * float(tn + fn)
    return _clamp_mcc(_ratio(float(tp) * tn - float(fp) * fn, np.sqrt(den)))


def multiclass_mcc(cm: ConfusionMatrix) -> float:
    """k-class covariance form; 0 when either marginal is degenerate"""
    c = cm.counts.astype(np.float64)
    s = c.sum()
    correct = np.trace(c)
    t = c.sum(axis=1)
    p = c.sum(axis=0)
    den = np.sqrt((s * s - np.dot(p, p)) * (s * s - np.dot(t, t)))
    return _clamp_mcc(_ratio(correct * s - np.dot(t, p), den))


def class_metrics(cm: ConfusionMatrix, c: int) -> ClassMetrics:
    o = cm.one_vs_rest(c)
    return ClassMetrics(
        acc=_ratio(o['tp'] + o['tn'], cm.total),
        fnr=_ratio(o['fn'], o['tp'] + o['fn']),
        mcc=binary_mcc(o['tp'], o['tn'], o['fp'], o['fn']),
    )


def classification_metrics(cm: ConfusionMatrix) -> MetricSet:
    """Overall and per-class ACC, FNR, MCC.

    Two classes: class 1 (Ent) is the positive class. More classes: overall ACC
    is the micro average, FNR the macro average of one-vs-rest rates and MCC the
    k-class form.
    """
    if cm.total == 0:
        raise ValueError("Cannot compute metrics from an empty confusion matrix")
    per_class = {cm.labels[c]: class_metrics(cm, c) for c in range(cm.k)}
    acc = _ratio(np.trace(cm.counts), cm.total)
    if cm.k == 2:
        positive = per_class[cm.labels[1]]
        fnr, mcc = positive.fnr, positive.mcc
    else:
        fnr = float(np.mean([m.fnr for m in per_class.values()]))
        mcc = multiclass_mcc(cm)
    return MetricSet(
        acc=acc,
        fnr=fnr,
        mcc=mcc,
        mcc_per_class_mean=float(np.mean([m.mcc for m in per_class.values()])),
        per_class=per_class,
    )


def mae(predicted: Sequence[float], actual: Sequence[float]) -> float:
    """(1/N) sum |y - y_hat|"""
    predicted = np.asarray(predicted, dtype=np.float64)
    actual = np.asarray(actual, dtype=np.float64)
    if predicted.shape != actual.shape:
        raise ValueError(f"{predicted.size} predictions but {actual.size} targets")
    if predicted.size == 0:
        raise ValueError("MAE of an empty set is undefined")
    return float(np.mean(np.abs(predicted - actual)))


def metrics_table(results: Dict[float, MetricSet]) -> pd.DataFrame:
    """Per-class and overall ACC/FNR/MCC, one row per (purity, class)"""
    rows = []
    for key, metrics in results.items():
        for name, m in metrics.per_class.items():
            rows.append({'purity': key, 'class': name, 'acc': m.acc, 'fnr': m.fnr, 'mcc': m.mcc})
        rows.append({'purity': key, 'class': 'overall', 'acc': metrics.acc,
                     'fnr': metrics.fnr, 'mcc': metrics.mcc})
    return pd.DataFrame(rows, columns=['purity', 'class', 'acc', 'fnr', 'mcc'])
