#!/usr/bin/env python3
"""
Losses, optimiser, model family, training loop and checkpoints
"""
import numpy as np
import pandas as pd
import pytest

from datagen import GenSpec, build_dataset
from encoding import records_to_arrays
from nn import (
    CheckpointFormatError,
    ConvSpec,
    DenseSpec,
    FlattenSpec,
    HISTORY_COLUMNS,
    LeakyReLUSpec,
    Model,
    ModelSpec,
    PlateauScheduler,
    SGD,
    ShapeMismatchError,
    TrainConfig,
    build_model,
    check_shapes,
    compute_loss,
    count_conv_layers,
    load_checkpoint,
    plateau_update,
    prepare_targets,
    save_checkpoint,
    sgd_step,
    train,
)
from nn.checkpoint import encode_checkpoint, decode_checkpoint


@pytest.fixture(scope='module')
def two_qubit_arrays():
    dataset = build_dataset(GenSpec(n_qubits=2, count_per_class=16, seed=31))
    return records_to_arrays(dataset.records)


def test_loss_examples():
    assert compute_loss('bce', [[1.0]], [[1.0]])[0] < 1e-9
    assert abs(compute_loss('bce', [[0.5]], [[1.0]])[0] - np.log(2)) < 1e-12
    assert abs(compute_loss('mse', [0.2, 0.8], [0.0, 1.0])[0] - 0.04) < 1e-12
    loss, grad = compute_loss('cce', [[0.25, 0.75]], [[0.0, 1.0]])
    assert abs(loss + np.log(0.75)) < 1e-12
    assert np.allclose(grad, [[0.0, -1 / 0.75]])


def test_loss_shape_errors():
    with pytest.raises(ValueError):
        compute_loss('mse', [0.1, 0.2], [0.1])
    with pytest.raises(ValueError):
        compute_loss('cce', np.zeros((0, 2)), np.zeros((0, 2)))


def test_sgd_examples():
    theta, v = np.zeros(3), np.zeros(3)
    sgd_step(theta, np.zeros(3), v, lr=0.1, momentum=0.9)
    assert not theta.any()

    theta, v = np.zeros(1), np.zeros(1)
    sgd_step(theta, np.ones(1), v, lr=0.1, momentum=0.0)
    assert np.allclose(theta, -0.1)

    theta = np.zeros(1)
    optimizer = SGD(theta, np.ones(1), lr=0.1, momentum=0.9)
    optimizer.step()
    optimizer.step()
    assert np.allclose(theta, -0.29)


def test_sgd_rejects_bad_settings():
    with pytest.raises(ValueError):
        SGD(np.zeros(1), np.zeros(1), lr=0.0)
    with pytest.raises(ValueError):
        SGD(np.zeros(1), np.zeros(1), lr=0.1, momentum=1.0)


def test_plateau_improving_losses_keep_lr():
    scheduler = PlateauScheduler(lr=0.01, patience=2)
    for loss in (1.0, 0.9, 0.8):
        plateau_update(scheduler, loss)
    assert scheduler.lr == 0.01


def test_plateau_stagnation_halves_lr():
    scheduler = PlateauScheduler(lr=0.01, patience=2, factor=0.5, min_delta=0.01)
    assert plateau_update(scheduler, 1.0) == 0.01
    assert plateau_update(scheduler, 0.999) == 0.01
    assert plateau_update(scheduler, 0.9995) == 0.005
    assert scheduler.wait == 0


def test_plateau_floor():
    scheduler = PlateauScheduler(lr=1e-5, patience=1, min_lr=1e-5)
    for _ in range(5):
        plateau_update(scheduler, 1.0)
    assert scheduler.lr == 1e-5


@pytest.mark.parametrize('n_qubits', [2, 3])
def test_variant_conv_counts(n_qubits):
    expected = {'nn': 0, 'simple': 10, 'brch': 14, 'bnsep': 10, 'brch-bnsep': 14}
    for variant, count in expected.items():
        spec = build_model(variant, n_qubits)
        assert count_conv_layers(spec) == count
        assert check_shapes(spec) == (2 if n_qubits == 2 else 5,)
        assert spec.input_shape == (2 ** n_qubits, 2 ** n_qubits, 2)


def test_build_model_errors():
    with pytest.raises(ValueError):
        build_model('resnet', 2)
    with pytest.raises(ValueError):
        build_model('simple', 3, task='regress')
    with pytest.raises(ValueError):
        build_model('simple', 4)


def test_model_spec_round_trip():
    spec = build_model('brch-bnsep', 3)
    assert ModelSpec.from_dict(spec.to_dict()) == spec


def test_zero_head_gives_uniform_probabilities():
    model = Model(build_model('simple', 3), seed=1)
    head = model.dense_layers[-1]
    for p in head.params:
        p[...] = 0.0
    x = np.random.default_rng(0).standard_normal((4, 8, 8, 2))
    probabilities = model.predict(x)
    assert np.allclose(probabilities, 0.2, atol=1e-12)
    assert np.allclose(probabilities.sum(axis=1), 1.0, atol=1e-9)


def test_regression_output_clamped():
    model = Model(build_model('nn', 2, task='regress'), seed=2)
    head = model.dense_layers[-1]
    head.params[0][...] = 0.0
    head.params[1][...] = 5.0
    out = model.predict(np.zeros((3, 4, 4, 2)))
    assert out.shape == (3,)
    assert np.all(out == 1.0)
    with pytest.raises(ValueError):
        model.predict_classes(np.zeros((1, 4, 4, 2)))


def test_model_rejects_wrong_input():
    model = Model(build_model('nn', 2))
    with pytest.raises(ShapeMismatchError):
        model.predict(np.zeros((1, 8, 8, 2)))


def test_single_step_decreases_loss(two_qubit_arrays):
    x, labels, _ = two_qubit_arrays
    model = Model(build_model('simple', 2), seed=3)
    targets = prepare_targets(model, labels[:8])
    before, _ = model.loss_and_grad(x[:8], targets)
    SGD(model.params, model.grads, lr=1e-3).step()
    after, _ = compute_loss('cce', model.forward(x[:8]), targets)
    assert after < before


def test_training_history_and_determinism(two_qubit_arrays):
    x, labels, _ = two_qubit_arrays
    config = TrainConfig(lr=0.01, batch_size=8, epochs=3, seed=5, plateau=True)

    first = train(Model(build_model('bnsep', 2), seed=4), x[:24], labels[:24], x[24:], labels[24:], config)
    second = train(Model(build_model('bnsep', 2), seed=4), x[:24], labels[:24], x[24:], labels[24:], config)

    assert list(first.history.columns) == HISTORY_COLUMNS
    assert len(first.history) == 3
    assert first.model.trained
    assert 1 <= first.best_epoch <= 3
    assert first.best_val_loss == first.history['val_loss'].min()
    pd.testing.assert_frame_equal(first.history, second.history)
    assert np.array_equal(first.model.params, second.model.params)


def test_regression_training_uses_eof(two_qubit_arrays):
    x, _, eof = two_qubit_arrays
    result = train(Model(build_model('nn', 2, task='regress')), x, eof, config=TrainConfig(epochs=2, batch_size=16))
    assert result.history['val_metric'].between(0.0, 1.0).all()


def test_training_input_errors(two_qubit_arrays):
    x, labels, eof = two_qubit_arrays
    model = Model(build_model('nn', 2))
    with pytest.raises(ValueError):
        train(model, x[:0], labels[:0])
    with pytest.raises(ValueError):
        train(model, x, labels[:5])
    with pytest.raises(ShapeMismatchError):
        train(model, np.zeros((4, 8, 8, 2)), labels[:4])
    with pytest.raises(ValueError):
        train(Model(build_model('nn', 2, task='regress')), x[:2], np.array([0.1, np.nan]))
    with pytest.raises(ValueError):
        TrainConfig(lr=-1.0)
    with pytest.raises(ValueError):
        train(model, x, labels, config=TrainConfig(loss='mse'))


def test_checkpoint_round_trip(tmp_path, two_qubit_arrays):
    x, _, _ = two_qubit_arrays
    model = Model(build_model('brch', 2), seed=6)
    model.trained = True
    path = tmp_path / 'model.xpkm'
    checksum = save_checkpoint(model, path, manifest={'seed': 6})

    loaded, manifest = load_checkpoint(path, expected_input_shape=(4, 4, 2))
    assert manifest == {'seed': 6}
    assert loaded.trained
    assert loaded.checksum() == checksum
    assert np.array_equal(loaded.predict(x), model.predict(x))

    with pytest.raises(ShapeMismatchError):
        load_checkpoint(path, expected_input_shape=(8, 8, 2))


def test_checkpoint_corruption():
    model = Model(build_model('nn', 2))
    data = encode_checkpoint(model)
    with pytest.raises(CheckpointFormatError):
        decode_checkpoint(b'JUNK' + data[4:])
    with pytest.raises(CheckpointFormatError):
        decode_checkpoint(data[:-8])


@pytest.mark.slow
def test_tiny_convnet_memorises_toy_set(two_qubit_arrays):
    x, labels, _ = two_qubit_arrays
    spec = ModelSpec(
        input_shape=(4, 4, 2),
        layers=[ConvSpec(8, (2, 2)), LeakyReLUSpec(), ConvSpec(8, (2, 2)), LeakyReLUSpec(),
                FlattenSpec(), DenseSpec(16), LeakyReLUSpec(), DenseSpec(2)],
        head='softmax',
    )
    model = Model(spec, seed=9)
    train(model, x, labels, config=TrainConfig(lr=0.05, batch_size=8, epochs=200, seed=9))
    assert np.mean(model.predict_classes(x) == labels) == 1.0
