"""
CSV and JSON report files
"""
import json
import logging
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np
import pandas as pd

from .metrics import ConfusionMatrix, MetricSet, metrics_table
from .sweeps import PuritySweepResult, SweepCurve

logger = logging.getLogger(__name__)


def report_stem(kind: str, seed: int, model_checksum: str) -> str:
    return f"{kind}_seed{seed}_{model_checksum[:12]}"


def _json_default(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serialisable")


def write_json(data: Dict, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, default=_json_default))
    return path


def write_sweep_csv(curve: SweepCurve, out_dir: Union[str, Path], seed: int, model_checksum: str) -> Path:
    """One row per sweep point"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    kind = curve.kind if 'space' not in curve.metadata else f"{curve.kind}_{curve.metadata['space']}"
    path = out_dir / f"sweep_{report_stem(kind, seed, model_checksum)}.csv"
    curve.to_frame().to_csv(path, index=False)
    logger.info(f"Wrote {len(curve.x)} sweep points to {path}")
    return path


def write_confusion_csv(cm: ConfusionMatrix, path: Union[str, Path]) -> Path:
    """One row per confusion cell"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    cm.to_frame().to_csv(path, index=False)
    return path


def write_metrics_json(metrics: MetricSet, path: Union[str, Path], extra: Optional[Dict] = None) -> Path:
    return write_json({**metrics.to_dict(), **(extra or {})}, path)


def write_purity_report(
    result: PuritySweepResult,
    out_dir: Union[str, Path],
    seed: int,
    model_checksum: str,
    extra: Optional[Dict] = None,
) -> Dict[str, Path]:
    """Curve CSV, per-class metric grid CSV, per-purity confusion CSVs and a JSON summary"""
    out_dir = Path(out_dir)
    stem = report_stem('purity', seed, model_checksum)
    paths = {'curve': write_sweep_csv(result.curve, out_dir, seed, model_checksum)}

    grid = metrics_table(result.metrics)
    paths['grid'] = out_dir / f"metrics_{stem}.csv"
    grid.to_csv(paths['grid'], index=False)

    frames = []
    for purity, cm in result.confusion.items():
        frame = cm.to_frame()
        frame.insert(0, 'purity', purity)
        frames.append(frame)
    paths['confusion'] = out_dir / f"confusion_{stem}.csv"
    pd.concat(frames, ignore_index=True).to_csv(paths['confusion'], index=False)

    summary = {
        'kind': 'purity',
        'seed': seed,
        'model_checksum': model_checksum,
        'points': {str(p): m.to_dict() for p, m in result.metrics.items()},
        'metadata': result.curve.metadata,
        **(extra or {}),
    }
    paths['summary'] = write_json(summary, out_dir / f"summary_{stem}.json")
    logger.info(f"Purity report written to {out_dir}")
    return paths


def write_sweep_summary(curve: SweepCurve, out_dir: Union[str, Path], seed: int, model_checksum: str,
                        extra: Optional[Dict] = None) -> Path:
    kind = curve.kind if 'space' not in curve.metadata else f"{curve.kind}_{curve.metadata['space']}"
    summary = {
        'kind': curve.kind,
        'seed': seed,
        'model_checksum': model_checksum,
        'metric': curve.metric,
        'x': curve.x,
        'y': curve.y,
        'extras': curve.extras,
        'metadata': curve.metadata,
        **(extra or {}),
    }
    return write_json(summary, Path(out_dir) / f"summary_{report_stem(kind, seed, model_checksum)}.json")
