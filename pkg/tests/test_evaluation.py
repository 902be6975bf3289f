#!/usr/bin/env python3
"""
Metrics, sweeps and report files
"""
import json

import numpy as np
import pandas as pd
import pytest

from datagen import GenSpec, build_dataset
from encoding import records_to_arrays
from evaluation import (
    ConfusionMatrix,
    SweepCurve,
    binary_mcc,
    bell_space_states,
    classification_metrics,
    confusion_matrix,
    incomplete_sweep,
    mae,
    metrics_table,
    multiclass_mcc,
    purity_sweep,
    write_confusion_csv,
    write_metrics_json,
    write_purity_report,
    write_sweep_csv,
)
from labeling import eof_two_qubit
from nn import Model, build_model


@pytest.fixture(scope='module')
def two_qubit_test_set():
    return build_dataset(GenSpec(n_qubits=2, count_per_class=12, seed=41)).records


@pytest.fixture
def classifier():
    model = Model(build_model('nn', 2), seed=3)
    model.trained = True
    return model


def test_confusion_matrix_examples():
    cm = confusion_matrix([0, 1, 2, 1], [0, 1, 2, 1], 3)
    assert np.array_equal(cm.counts, np.diag([1, 2, 1]))

    cm = confusion_matrix([0, 1, 2, 2], [0, 0, 0, 0], 3)
    assert np.array_equal(cm.counts[:, 0], [1, 1, 2])
    assert not cm.counts[:, 1:].any()

    cm = confusion_matrix([0, 0, 1, 1, 2, 2], [0, 1, 1, 2, 2, 0], 3)
    expected = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert np.array_equal(cm.counts, expected)
    assert cm.total == 6


def test_confusion_matrix_errors():
    with pytest.raises(ValueError):
        confusion_matrix([0, 1], [0], 2)
    with pytest.raises(ValueError):
        confusion_matrix([0, 2], [0, 1], 2)
    with pytest.raises(ValueError):
        ConfusionMatrix(np.zeros((2, 3)))


def test_binary_metrics_example():
    cm = ConfusionMatrix(np.array([[80, 20], [10, 90]]), ['Sep', 'Ent'])
    metrics = classification_metrics(cm)
    assert abs(metrics.acc - 0.85) < 1e-12
    assert abs(metrics.fnr - 0.1) < 1e-12
    expected_mcc = (90 * 80 - 20 * 10) / np.sqrt(110 * 100 * 100 * 90)
    assert abs(metrics.mcc - expected_mcc) < 1e-12
    assert abs(multiclass_mcc(cm) - metrics.mcc) < 1e-12


def test_perfect_and_inverted_predictions():
    metrics = classification_metrics(ConfusionMatrix(np.diag([4, 5, 6, 7, 8])))
    assert metrics.mcc == pytest.approx(1.0, abs=1e-12)
    assert -1.0 <= metrics.mcc <= 1.0
    assert metrics.acc == 1.0
    assert all(m.fnr == 0.0 for m in metrics.per_class.values())

    metrics = classification_metrics(ConfusionMatrix(np.array([[0, 5], [7, 0]])))
    assert abs(metrics.mcc + 1.0) < 1e-12


def test_degenerate_mcc_is_zero():
    assert binary_mcc(tp=5, tn=0, fp=5, fn=0) == 0.0
    cm = confusion_matrix([0, 1, 2], [1, 1, 1], 3)
    assert multiclass_mcc(cm) == 0.0


def test_mcc_stays_in_unit_interval():
    for counts in ([4, 5, 6, 7, 8], [1000, 3, 17, 250, 9], [123456, 654321, 99]):
        cm = ConfusionMatrix(np.diag(counts))
        assert multiclass_mcc(cm) == 1.0
        assert multiclass_mcc(ConfusionMatrix(np.fliplr(np.diag(counts[:2])))) == -1.0
    rng = np.random.default_rng(9)
    for _ in range(50):
        cm = ConfusionMatrix(rng.integers(0, 50, (5, 5)))
        assert -1.0 <= multiclass_mcc(cm) <= 1.0
    assert binary_mcc(tp=7, tn=11, fp=0, fn=0) == 1.0


def test_empty_matrix_rejected():
    with pytest.raises(ValueError):
        classification_metrics(ConfusionMatrix(np.zeros((2, 2))))


def test_accuracy_matches_direct_count():
    rng = np.random.default_rng(0)
    actual = rng.integers(0, 5, 200)
    predicted = np.where(rng.random(200) < 0.7, actual, rng.integers(0, 5, 200))
    metrics = classification_metrics(confusion_matrix(actual, predicted, 5))
    assert abs(metrics.acc - np.mean(actual == predicted)) < 1e-12
    assert 0.0 <= metrics.fnr <= 1.0
    assert -1.0 <= metrics.mcc <= 1.0


def test_relabelling_permutes_per_class_metrics():
    rng = np.random.default_rng(1)
    actual = rng.integers(0, 3, 60)
    predicted = rng.integers(0, 3, 60)
    perm = np.array([2, 0, 1])
    base = classification_metrics(confusion_matrix(actual, predicted, 3))
    moved = classification_metrics(confusion_matrix(perm[actual], perm[predicted], 3))
    for c in range(3):
        assert vars(base.per_class[str(c)]) == pytest.approx(vars(moved.per_class[str(perm[c])]))
    assert abs(base.mcc - moved.mcc) < 1e-12


def test_mae_examples():
    assert mae([0.3, 0.4], [0.3, 0.4]) == 0.0
    assert mae([0, 1], [1, 0]) == 1.0
    with pytest.raises(ValueError):
        mae([0.1], [0.1, 0.2])


def test_sweep_curve_requires_monotone_x():
    SweepCurve('incomplete', [1, 2, 3], [0.5, 0.6, 0.7])
    SweepCurve('purity', [1.0, 0.83, 0.56], [0.9, 0.8, 0.7])
    with pytest.raises(ValueError):
        SweepCurve('incomplete', [1, 3, 2], [0.5, 0.6, 0.7])
    with pytest.raises(ValueError):
        SweepCurve('incomplete', [1, 2], [0.5])


def test_incomplete_sweep_full_budget_matches_full_accuracy(classifier, two_qubit_test_set):
    x, labels, _ = records_to_arrays(two_qubit_test_set)
    full = float(np.mean(classifier.predict_classes(x) == labels))
    curve = incomplete_sweep(classifier, two_qubit_test_set, budgets=[15], trials=3, seed=2)
    assert curve.y == [full]
    assert curve.extras['std'] == [0.0]


def test_incomplete_sweep_zero_budget_is_base_rate(classifier, two_qubit_test_set):
    curve = incomplete_sweep(classifier, two_qubit_test_set, budgets=[0], trials=2)
    prediction = classifier.predict_classes(np.stack([np.eye(4) / 4, np.zeros((4, 4))], axis=-1)[None])[0]
    labels = np.array([int(r.label) for r in two_qubit_test_set])
    assert curve.y[0] == pytest.approx(np.mean(labels == prediction))


def test_incomplete_sweep_deterministic(classifier, two_qubit_test_set):
    first = incomplete_sweep(classifier, two_qubit_test_set, budgets=[3, 7], trials=4, seed=9)
    second = incomplete_sweep(classifier, two_qubit_test_set, budgets=[7, 3], trials=4, seed=9)
    assert first.x == [3, 7]
    assert first.y == second.y
    bell = incomplete_sweep(classifier, two_qubit_test_set, budgets=[3], trials=2, seed=9, space='bell')
    assert bell.metadata['space'] == 'bell'
    assert bell.metadata['samples'] == 24


def test_incomplete_sweep_errors(classifier, two_qubit_test_set):
    with pytest.raises(ValueError):
        incomplete_sweep(classifier, two_qubit_test_set, budgets=[16])
    classifier.trained = False
    with pytest.raises(ValueError):
        incomplete_sweep(classifier, two_qubit_test_set, budgets=[1])
    three = Model(build_model('nn', 3))
    three.trained = True
    with pytest.raises(ValueError):
        incomplete_sweep(three, two_qubit_test_set, budgets=[1])


def test_bell_space_states_maximally_entangled():
    states = bell_space_states(5, np.random.default_rng(4))
    for rho in states:
        assert abs(np.trace(rho @ rho) - 1.0) < 1e-12
        assert abs(eof_two_qubit(rho) - 1.0) < 1e-8


def test_purity_sweep_and_report(tmp_path):
    model = Model(build_model('nn', 3), seed=5)
    model.trained = True
    spec = GenSpec(n_qubits=3, count_per_class=2, m_range=(1, 2))
    result = purity_sweep(model, spec, [1.0, 0.56], seed=6, half_width=0.05)

    assert result.curve.x == [1.0, 0.56]
    assert set(result.confusion) == {1.0, 0.56}
    assert all(cm.total == 10 for cm in result.confusion.values())
    grid = metrics_table(result.metrics)
    assert len(grid) == 2 * 6

    paths = write_purity_report(result, tmp_path, seed=6, model_checksum=model.checksum())
    assert all(p.exists() for p in paths.values())
    assert model.checksum()[:12] in paths['curve'].name
    summary = json.loads(paths['summary'].read_text())
    assert set(summary['points']) == {'1.0', '0.56'}
    assert len(pd.read_csv(paths['confusion'])) == 2 * 25


def test_report_writers(tmp_path):
    cm = ConfusionMatrix(np.array([[3, 1], [0, 4]]), ['Sep', 'Ent'])
    frame = pd.read_csv(write_confusion_csv(cm, tmp_path / 'cm.csv'))
    assert list(frame.columns) == ['actual', 'predicted', 'count']
    assert frame['count'].sum() == 8

    metrics_path = write_metrics_json(classification_metrics(cm), tmp_path / 'metrics.json', {'seed': 1})
    data = json.loads(metrics_path.read_text())
    assert data['seed'] == 1
    assert data['acc'] == 0.875

    curve = SweepCurve('incomplete', [1, 2], [0.5, 0.75], extras={'std': [0.1, 0.0]}, metadata={'space': 'entire'})
    path = write_sweep_csv(curve, tmp_path, seed=3, model_checksum='ab' * 32)
    assert path.name == 'sweep_incomplete_entire_seed3_abababababab.csv'
    assert list(pd.read_csv(path).columns) == ['x', 'acc', 'std']
