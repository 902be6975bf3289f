#!/usr/bin/env python3
"""
Tests for tensor encoding, the Pauli decomposition and the dataset file
"""
import numpy as np
import pytest

from datagen import GenSpec, build_dataset
from encoding import (
    DatasetFormatError,
    HEADER,
    channel_symmetry_error,
    decode_dataset,
    encode_dataset,
    from_extended_tensor,
    incomplete_batch,
    incomplete_density,
    measurement_count,
    non_identity_indices,
    parse_pauli_label,
    pauli_coefficients,
    pauli_indices,
    pauli_label,
    random_retained_subset,
    read_dataset,
    read_gen_spec,
    reconstruct,
    records_to_arrays,
    retained_to_ignored,
    to_extended_tensor,
    write_dataset,
)

PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
BELL = np.outer(PHI_PLUS, PHI_PLUS.conj())
SY = np.array([[0, -1j], [1j, 0]])


@pytest.fixture(scope='module')
def small_dataset():
    return build_dataset(GenSpec(n_qubits=2, count_per_class=10, seed=17))


def random_density(dim, rng):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    w = m @ m.conj().T
    return w / np.trace(w).real


def test_extended_tensor_examples():
    t = to_extended_tensor(np.eye(2) / 2)
    assert t.shape == (2, 2, 2)
    assert np.array_equal(t[..., 0], [[0.5, 0], [0, 0.5]])
    assert np.array_equal(t[..., 1], np.zeros((2, 2)))

    rho = np.array([[0.5, 0.1 + 0.2j], [0.1 - 0.2j, 0.5]])
    t = to_extended_tensor(rho)
    assert t[0, 1, 0] == 0.1
    assert t[0, 1, 1] == 0.2


def test_extended_tensor_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(100):
        rho = random_density(4, rng)
        t = to_extended_tensor(rho)
        assert np.array_equal(from_extended_tensor(t), rho)
        assert channel_symmetry_error(t) < 1e-12


def test_from_extended_tensor_rejects_bad_shape():
    with pytest.raises(ValueError):
        from_extended_tensor(np.zeros((4, 4, 3)))


def test_pauli_coefficients_examples():
    c = pauli_coefficients(np.eye(4) / 4)
    assert abs(c[(0, 0)] - 1.0) < 1e-15
    assert all(abs(v) < 1e-15 for k, v in c.items() if k != (0, 0))

    c = pauli_coefficients(np.diag([1.0, 0.0]))
    assert c == pytest.approx({(0,): 1.0, (1,): 0.0, (2,): 0.0, (3,): 1.0})

    c = pauli_coefficients(BELL)
    expected = {(0, 0): 1.0, (1, 1): 1.0, (2, 2): -1.0, (3, 3): 1.0}
    for index, value in c.items():
        assert abs(value - expected.get(index, 0.0)) < 1e-12


def test_pauli_reconstruction():
    rng = np.random.default_rng(1)
    rho = random_density(8, rng)
    c = pauli_coefficients(rho)
    assert len(c) == 64
    assert abs(c[(0, 0, 0)] - 1.0) < 1e-12
    assert np.allclose(reconstruct(c), rho, atol=1e-12)


def test_pauli_index_order_and_labels():
    indices = pauli_indices(2)
    assert indices[0] == (0, 0)
    assert indices[1] == (0, 1)
    assert indices[-1] == (3, 3)
    assert len(non_identity_indices(3)) == 63
    assert pauli_label((1, 2, 3)) == 'XYZ'
    assert parse_pauli_label('zx') == (3, 1)
    with pytest.raises(ValueError):
        parse_pauli_label('XQ')


def test_incomplete_density_examples():
    rng = np.random.default_rng(2)
    rho = random_density(4, rng)
    assert np.array_equal(incomplete_density(rho, []), rho)
    assert np.allclose(incomplete_density(rho, non_identity_indices(2)), np.eye(4) / 4, atol=1e-12)

    expected = BELL + np.kron(SY, SY) / 4
    assert np.allclose(incomplete_density(BELL, [(2, 2)]), expected, atol=1e-15)


def test_incomplete_density_keeps_trace():
    rng = np.random.default_rng(3)
    rho = random_density(8, rng)
    ignored = retained_to_ignored(random_retained_subset(3, 10, rng), 3)
    assert abs(np.trace(incomplete_density(rho, ignored)) - 1.0) < 1e-12


def test_incomplete_density_identity_guard():
    with pytest.raises(ValueError):
        incomplete_density(BELL, [(0, 0)])
    assert np.allclose(incomplete_density(BELL, [(0, 0)], allow_identity=True),
                       BELL - np.eye(4) / 4, atol=1e-15)
    with pytest.raises(ValueError):
        incomplete_density(BELL, [(1, 2, 3)])


def test_incomplete_batch_matches_single():
    rng = np.random.default_rng(4)
    stack = np.array([random_density(4, rng) for _ in range(5)])
    ignored = [(1, 1), (2, 3), (0, 3)]
    batch = incomplete_batch(stack, ignored)
    for i in range(5):
        assert np.allclose(batch[i], incomplete_density(stack[i], ignored), atol=1e-14)


def test_retained_subset_and_counts():
    rng = np.random.default_rng(5)
    retained = random_retained_subset(2, 4, rng)
    assert len(retained) == 4
    assert (0, 0) not in retained
    ignored = retained_to_ignored(retained, 2)
    assert len(ignored) == 11
    assert measurement_count(ignored, 2) == 4
    assert measurement_count(None, 3) == 63
    with pytest.raises(ValueError):
        random_retained_subset(2, 16, rng)


def test_records_to_arrays(small_dataset):
    x, labels, eof = records_to_arrays(small_dataset.records)
    assert x.shape == (20, 4, 4, 2)
    assert set(labels.tolist()) == {0, 1}
    assert not np.isnan(eof).any()


def test_dataset_file_round_trip(tmp_path, small_dataset):
    path = tmp_path / 'train.xpky'
    checksum = write_dataset(small_dataset.records, small_dataset.spec, path, audit=small_dataset.audit)
    records, manifest = read_dataset(path)

    assert manifest['checksum'] == checksum
    assert manifest['gen_spec']['seed'] == 17
    assert read_gen_spec(manifest) == small_dataset.spec
    assert len(records) == len(small_dataset.records)
    for a, b in zip(records, small_dataset.records):
        assert np.array_equal(a.rho.matrix, b.rho.matrix)
        assert a.label == b.label
        assert a.eof == b.eof
        assert a.purity == b.purity
        assert a.seed_used == b.seed_used
        assert a.m_used == b.m_used


def test_dataset_file_deterministic(small_dataset):
    first, _ = encode_dataset(small_dataset.records, small_dataset.spec)
    again = build_dataset(GenSpec(n_qubits=2, count_per_class=10, seed=17))
    second, _ = encode_dataset(again.records, again.spec)
    assert first == second


def test_dataset_file_flipped_byte(small_dataset):
    data, _ = encode_dataset(small_dataset.records, small_dataset.spec)
    corrupt = bytearray(data)
    corrupt[HEADER.size + 5] ^= 0xFF
    with pytest.raises(DatasetFormatError):
        decode_dataset(bytes(corrupt))


def test_dataset_file_empty_and_truncated(tmp_path):
    spec = GenSpec(n_qubits=3, count_per_class=1)
    path = tmp_path / 'empty.xpky'
    write_dataset([], spec, path)
    records, manifest = read_dataset(path)
    assert records == []
    assert manifest['m_used'] == []

    data, _ = encode_dataset([], spec)
    with pytest.raises(DatasetFormatError):
        decode_dataset(data[:HEADER.size - 1])
    with pytest.raises(DatasetFormatError):
        decode_dataset(b'NOPE' + data[4:])
