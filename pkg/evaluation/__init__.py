"""
Metrics, experiment sweeps and report files
"""

from .metrics import (
    ConfusionMatrix,
    ClassMetrics,
    MetricSet,
    confusion_matrix,
    binary_mcc,
    multiclass_mcc,
    class_metrics,
    classification_metrics,
    mae,
    metrics_table,
)
from .sweeps import (
    SweepSpace,
    SweepCurve,
    PuritySweepResult,
    DEFAULT_BUDGETS,
    bell_space_states,
    incomplete_sweep,
    purity_sweep,
)
from .reports import (
    report_stem,
    write_json,
    write_sweep_csv,
    write_confusion_csv,
    write_metrics_json,
    write_purity_report,
    write_sweep_summary,
)

__all__ = [
    'ConfusionMatrix',
    'ClassMetrics',
    'MetricSet',
    'confusion_matrix',
    'binary_mcc',
    'multiclass_mcc',
    'class_metrics',
    'classification_metrics',
    'mae',
    'metrics_table',
    'SweepSpace',
    'SweepCurve',
    'PuritySweepResult',
    'DEFAULT_BUDGETS',
    'bell_space_states',
    'incomplete_sweep',
    'purity_sweep',
    'report_stem',
    'write_json',
    'write_sweep_csv',
    'write_confusion_csv',
    'write_metrics_json',
    'write_purity_report',
    'write_sweep_summary',
]
