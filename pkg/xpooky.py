"""
XpookyNet command line: generate datasets, train models, evaluate them and run sweeps
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from config import (
    DATAGEN_SETTINGS,
    DEFAULT_OUTPUT_DIR,
    LOGGING_SETTINGS,
    SWEEP_SETTINGS,
    TRAIN_SETTINGS,
    XPOOKY_VERSION,
    coerce,
    get_worker_count,
    load_run_config,
    validate_environment,
)
from datagen import GenSpec, build_dataset
from encoding import read_dataset, records_to_arrays, write_dataset
from evaluation import (
    classification_metrics,
    confusion_matrix,
    incomplete_sweep,
    mae,
    purity_sweep,
    write_confusion_csv,
    write_json,
    write_metrics_json,
    write_purity_report,
    write_sweep_csv,
    write_sweep_summary,
)
from labeling import class_names
from nn import Model, Task, TrainConfig, build_model, load_checkpoint, save_checkpoint, train

logger = logging.getLogger('xpooky')

# flags that change where or how fast artifacts are written, never their content
NON_CONTENT_KEYS = ('out', 'config', 'threads', 'command')


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments"""
    parser = argparse.ArgumentParser(description='XpookyNet entanglement detection toolkit')
    parser.add_argument('--config', type=str, default=None,
                        help='Run config file with [global]/[generate]/[train]/[evaluate]/[sweep] sections')
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('generate', help='Generate a labelled dataset file')
    gen.add_argument('--qubits', type=int, choices=[2, 3], default=None)
    gen.add_argument('--per-class', type=int, default=None, help='Records per class')
    gen.add_argument('--seed', type=int, default=None)
    gen.add_argument('--out', type=str, default=None, help='Dataset file to write')
    gen.add_argument('--purity', type=float, default=None, help='Target purity bin centre')
    gen.add_argument('--half-width', type=float, default=None, help='Purity bin half width')
    gen.add_argument('--mixture-terms', type=str, default=None, help="Mixture size m: '3' or a range '1-10'")
    gen.add_argument('--nonzero-fraction', type=float, default=None)
    gen.add_argument('--mode', type=str, default=None,
                     choices=['psd-guaranteed', 'hermitian-rejection', 'paper-literal'])
    gen.add_argument('--source', type=str, choices=['recipe', 'random'], default=None,
                     help='Two-qubit source: class recipes or random matrices labelled by EoF')

    tr = sub.add_parser('train', help='Train a model on a dataset file')
    tr.add_argument('--data', type=str, default=None)
    tr.add_argument('--variant', type=str, choices=['nn', 'simple', 'brch', 'bnsep', 'brch-bnsep'], default=None)
    tr.add_argument('--task', type=str, choices=['classify', 'binary', 'regress'], default=None)
    tr.add_argument('--plateau', action='store_true', default=None, help='Reduce the learning rate on plateaus')
    tr.add_argument('--epochs', type=int, default=None)
    tr.add_argument('--lr', type=float, default=None)
    tr.add_argument('--momentum', type=float, default=None)
    tr.add_argument('--batch-size', type=int, default=None)
    tr.add_argument('--val-fraction', type=float, default=None)
    tr.add_argument('--seed', type=int, default=None)
    tr.add_argument('--out', type=str, default=None, help='Output directory')

    ev = sub.add_parser('evaluate', help='Evaluate a trained model on a dataset file')
    ev.add_argument('--model', type=str, default=None)
    ev.add_argument('--data', type=str, default=None)
    ev.add_argument('--out', type=str, default=None, help='Output directory')

    sw = sub.add_parser('sweep', help='Incomplete-measurement or purity sweep')
    sw.add_argument('--kind', type=str, choices=['incomplete', 'purity'], default=None)
    sw.add_argument('--model', type=str, default=None)
    sw.add_argument('--data', type=str, default=None, help='Test dataset (incomplete sweep)')
    sw.add_argument('--space', type=str, choices=['entire', 'bell'], default=None)
    sw.add_argument('--budgets', type=str, default=None, help="Retained bases, e.g. '1,3,7,15'")
    sw.add_argument('--trials', type=int, default=None)
    sw.add_argument('--targets', type=str, default=None, help="Purity targets, e.g. '1,0.83,0.56,0.37'")
    sw.add_argument('--per-class', type=int, default=None)
    sw.add_argument('--seed', type=int, default=None)
    sw.add_argument('--out', type=str, default=None, help='Output directory')
    return parser.parse_args(argv)


def _flags(args: argparse.Namespace) -> Dict:
    return {k: v for k, v in vars(args).items() if k not in ('config', 'command')}


def _provenance(command: str, values: Dict, run_config) -> Dict:
    return {
        'command': command,
        'config': {k: v for k, v in sorted(values.items()) if k not in NON_CONTENT_KEYS},
        'config_file': run_config.to_dict()['sections'],
        'versions': {'xpooky': XPOOKY_VERSION, 'numpy': np.__version__},
    }


def _require(values: Dict, key: str):
    if values.get(key) is None:
        raise ValueError(f"--{key.replace('_', '-')} is required (flag or config file)")
    return values[key]


def _mixture_terms(raw):
    if raw is None:
        return DATAGEN_SETTINGS['mixture_terms']
    if isinstance(raw, (tuple, list)):
        return tuple(raw)
    parts = str(raw).replace(',', '-').split('-')
    try:
        bounds = [int(p) for p in parts if p.strip()]
    except ValueError:
        raise ValueError(f"Invalid mixture-terms '{raw}', expected 'm' or 'lo-hi'")
    if len(bounds) not in (1, 2):
        raise ValueError(f"Invalid mixture-terms '{raw}', expected 'm' or 'lo-hi'")
    return (bounds[0], bounds[0]) if len(bounds) == 1 else (bounds[0], bounds[1])


def _seed(values: Dict) -> int:
    seed = coerce(values, 'seed', int, 0)
    if seed < 0:
        raise ValueError(f"--seed must be a non-negative integer, got {seed}")
    return seed


def run_generate(values: Dict, run_config) -> None:
    n_qubits = coerce(values, 'qubits', int)
    purity = coerce(values, 'purity', float)
    half_width = coerce(values, 'half_width', float, DATAGEN_SETTINGS['purity_half_width'])
    spec = GenSpec(
        n_qubits=_require({'qubits': n_qubits}, 'qubits'),
        count_per_class=_require({'per_class': coerce(values, 'per_class', int)}, 'per_class'),
        m_range=_mixture_terms(values.get('mixture_terms')),
        target_purity=(purity, half_width) if purity is not None else None,
        nonzero_fraction=coerce(values, 'nonzero_fraction', float),
        seed=_seed(values),
        generator_mode=values.get('mode') or DATAGEN_SETTINGS['generator_mode'],
        two_qubit_source=values.get('source') or DATAGEN_SETTINGS['two_qubit_source'],
        retry_budget=DATAGEN_SETTINGS['retry_budget'],
        audit_samples=DATAGEN_SETTINGS['audit_samples'],
    )
    out = Path(values.get('out') or Path(DEFAULT_OUTPUT_DIR) / f"dataset_{n_qubits}q_seed{spec.seed}.xpky")
    dataset = build_dataset(spec, workers=get_worker_count())
    write_dataset(dataset.records, spec, out, extra=_provenance('generate', values, run_config),
                  audit=dataset.audit)


def _split(n: int, fraction: float, seed: int):
    order = np.random.default_rng(seed).permutation(n)
    n_val = int(round(fraction * n)) if n > 1 else 0
    n_val = min(max(n_val, 1 if fraction > 0 and n > 1 else 0), n - 1)
    return order[n_val:], order[:n_val]


def _targets(task: Task, labels: np.ndarray, eof: np.ndarray) -> np.ndarray:
    return eof if task is Task.REGRESS else labels


def run_train(values: Dict, run_config) -> None:
    records, manifest = read_dataset(_require(values, 'data'))
    if not records:
        raise ValueError(f"Dataset {values['data']} holds no records")
    n_qubits = records[0].rho.n_qubits
    task = Task(values.get('task') or Task.CLASSIFY.value)
    variant = values.get('variant') or 'brch'
    seed = _seed(values)
    config = TrainConfig(
        lr=coerce(values, 'lr', float, TRAIN_SETTINGS['lr']),
        momentum=coerce(values, 'momentum', float, TRAIN_SETTINGS['momentum']),
        batch_size=coerce(values, 'batch_size', int, TRAIN_SETTINGS['batch_size']),
        epochs=coerce(values, 'epochs', int, TRAIN_SETTINGS['epochs']),
        plateau=bool(coerce(values, 'plateau', bool, False)),
        patience=TRAIN_SETTINGS['patience'],
        factor=TRAIN_SETTINGS['factor'],
        min_lr=TRAIN_SETTINGS['min_lr'],
        min_delta=TRAIN_SETTINGS['min_delta'],
        seed=seed,
    )
    out_dir = Path(values.get('out') or Path(DEFAULT_OUTPUT_DIR) / f"train_{variant}_{task.value}_seed{seed}")

    x, labels, eof = records_to_arrays(records)
    y = _targets(task, labels, eof)
    train_idx, val_idx = _split(len(x), coerce(values, 'val_fraction', float, TRAIN_SETTINGS['val_fraction']), seed)
    model = Model(build_model(variant, n_qubits, task), seed=seed)
    logger.info(f"Training '{variant}' ({model.conv_layers} conv layers, {model.params.size} parameters) "
                f"on {len(train_idx)} samples, validating on {len(val_idx)}")
    result = train(model, x[train_idx], y[train_idx], x[val_idx], y[val_idx], config)

    out_dir.mkdir(parents=True, exist_ok=True)
    training_manifest = {
        **_provenance('train', values, run_config),
        'data_checksum': manifest.get('checksum'),
        'train_config': config.to_dict(),
        'best_epoch': result.best_epoch,
        'best_val_loss': result.best_val_loss,
    }
    checksum = save_checkpoint(result.model, out_dir / 'model.xpkm', training_manifest)
    result.history.to_csv(out_dir / 'history.csv', index=False)
    write_json({**training_manifest, 'model_checksum': checksum, 'model_spec': model.spec.to_dict()},
               out_dir / 'manifest.json')


def run_evaluate(values: Dict, run_config) -> None:
    records, manifest = read_dataset(_require(values, 'data'))
    if not records:
        raise ValueError(f"Dataset {values['data']} holds no records")
    dim = records[0].rho.dim
    model, _ = load_checkpoint(_require(values, 'model'), expected_input_shape=(dim, dim, 2))
    out_dir = Path(values.get('out') or Path(DEFAULT_OUTPUT_DIR) / 'evaluation')
    x, labels, eof = records_to_arrays(records)
    checksum = model.checksum()
    extra = {**_provenance('evaluate', values, run_config),
             'model_checksum': checksum, 'data_checksum': manifest.get('checksum')}

    if model.spec.task is Task.REGRESS:
        score = mae(model.predict(x), eof)
        write_json({'mae': score, **extra}, out_dir / 'metrics.json')
        logger.info(f"MAE {score:.4f} on {len(x)} samples")
        return

    names = class_names(records[0].rho.n_qubits)
    cm = confusion_matrix(labels, model.predict_classes(x), len(names), names)
    metrics = classification_metrics(cm)
    write_metrics_json(metrics, out_dir / 'metrics.json', extra)
    write_confusion_csv(cm, out_dir / 'confusion.csv')
    logger.info(f"ACC {metrics.acc:.4f}, FNR {metrics.fnr:.4f}, MCC {metrics.mcc:.4f} on {cm.total} samples")


def run_sweep(values: Dict, run_config) -> None:
    kind = _require(values, 'kind')
    model, _ = load_checkpoint(_require(values, 'model'))
    seed = _seed(values)
    out_dir = Path(values.get('out') or Path(DEFAULT_OUTPUT_DIR) / 'sweeps')
    checksum = model.checksum()
    extra = {**_provenance('sweep', values, run_config), 'model_checksum': checksum}

    if kind == 'incomplete':
        records, _ = read_dataset(_require(values, 'data'))
        curve = incomplete_sweep(
            model,
            records,
            budgets=coerce(values, 'budgets', list, SWEEP_SETTINGS['budgets']),
            trials=coerce(values, 'trials', int, SWEEP_SETTINGS['trials']),
            space=values.get('space') or 'entire',
            seed=seed,
        )
        write_sweep_csv(curve, out_dir, seed, checksum)
        write_sweep_summary(curve, out_dir, seed, checksum, extra)
        return

    n_qubits = model.spec.n_qubits
    spec = GenSpec(
        n_qubits=n_qubits,
        count_per_class=coerce(values, 'per_class', int, SWEEP_SETTINGS['per_class']),
        m_range=DATAGEN_SETTINGS['mixture_terms'],
        seed=seed,
    )
    targets = coerce(values, 'targets', list, SWEEP_SETTINGS['purity_targets'], item=float)
    result = purity_sweep(model, spec, targets, seed=seed, workers=get_worker_count())
    write_purity_report(result, out_dir, seed, checksum, extra)


COMMANDS = {
    'generate': run_generate,
    'train': run_train,
    'evaluate': run_evaluate,
    'sweep': run_sweep,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_arguments(argv)
    try:
        validate_environment()
        logging.basicConfig(format=LOGGING_SETTINGS['format'], level=LOGGING_SETTINGS['level'])
        run_config = load_run_config(args.config)
        values = run_config.merged(args.command, _flags(args))
        COMMANDS[args.command](values, run_config)
    except (ValueError, RuntimeError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"xpooky {args.command}: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
