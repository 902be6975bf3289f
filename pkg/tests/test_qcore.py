#!/usr/bin/env python3
"""
Tests for the linear-algebra primitives and density-matrix types
"""
import numpy as np
import pytest

from qcore import (
    DensityMatrix,
    DimensionMismatchError,
    InvalidDensityMatrixError,
    NotHermitianError,
    StateVector,
    hermitian_eigenvalues,
    hermitian_eigh,
    partial_trace,
    partial_transpose,
    purity,
    tensor_product,
    von_neumann_entropy,
)

I2 = np.eye(2)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
KET0 = np.array([[1, 0], [0, 0]], dtype=complex)
KET1 = np.array([[0, 0], [0, 1]], dtype=complex)
PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


def random_density(dim, rng):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    w = m @ m.conj().T
    return w / np.trace(w).real


def random_hermitian(dim, rng):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return m + m.conj().T


def test_tensor_product_layout():
    """a's indices are the slow axes"""
    assert np.array_equal(tensor_product(I2, I2), np.eye(4))
    assert np.array_equal(tensor_product(KET0, KET1), np.diag([0, 1, 0, 0]).astype(complex))

    expected = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    expected[2 * i + k, 2 * j + l] = SX[i, j] * SZ[k, l]
    assert np.array_equal(tensor_product(SX, SZ), expected)


def test_partial_trace_examples():
    rng = np.random.default_rng(1)
    rho_a, rho_b = random_density(2, rng), random_density(2, rng)
    assert np.allclose(partial_trace(np.kron(rho_a, rho_b), [0], [2, 2]), rho_a, atol=1e-14)

    bell = np.outer(PHI_PLUS, PHI_PLUS.conj())
    assert np.allclose(partial_trace(bell, [0], [2, 2]), I2 / 2, atol=1e-15)
    assert np.allclose(partial_trace(np.eye(4) / 4, [1], [2, 2]), I2 / 2, atol=1e-15)


def test_partial_trace_three_qubits_keeps_order():
    rng = np.random.default_rng(2)
    a, b, c = (random_density(2, rng) for _ in range(3))
    rho = np.kron(np.kron(a, b), c)
    assert np.allclose(partial_trace(rho, [0, 2], [2, 2, 2]), np.kron(a, c), atol=1e-14)
    assert np.allclose(partial_trace(rho, [1], [2, 2, 2]), b, atol=1e-14)

    rho = random_density(8, rng)
    assert abs(np.trace(partial_trace(rho, [1, 2], [2, 2, 2])) - np.trace(rho)) < 1e-12


def test_partial_trace_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        partial_trace(np.eye(4) / 4, [0], [2, 3])


def test_partial_transpose_bell_spectrum_and_involution():
    bell = np.outer(PHI_PLUS, PHI_PLUS.conj())
    values = hermitian_eigenvalues(partial_transpose(bell, 1, [2, 2]))
    assert np.allclose(values, [0.5, 0.5, 0.5, -0.5], atol=1e-12)

    rho = random_density(8, np.random.default_rng(3))
    for subsystem in range(3):
        twice = partial_transpose(partial_transpose(rho, subsystem, [2, 2, 2]), subsystem, [2, 2, 2])
        assert np.array_equal(twice, rho)


def test_partial_transpose_product_state_stays_psd():
    rng = np.random.default_rng(4)
    rho = np.kron(random_density(2, rng), random_density(2, rng))
    assert hermitian_eigenvalues(partial_transpose(rho, 0, [2, 2]))[-1] > -1e-12


def test_partial_transpose_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        partial_transpose(np.eye(8) / 8, 0, [2, 2])


def test_hermitian_eigenvalues_examples():
    assert np.allclose(hermitian_eigenvalues(np.diag([0.5, 0.3, 0.2, 0.0])), [0.5, 0.3, 0.2, 0.0], atol=1e-14)
    assert np.allclose(hermitian_eigenvalues(SX), [1.0, -1.0], atol=1e-14)


def test_hermitian_eigenvalues_descending_and_trace():
    rng = np.random.default_rng(5)
    for dim in (2, 4, 8):
        h = random_hermitian(dim, rng)
        values = hermitian_eigenvalues(h)
        assert np.all(np.diff(values) <= 0)
        assert abs(values.sum() - np.trace(h).real) < 1e-10
        assert np.allclose(values, np.sort(np.linalg.eigvalsh(h))[::-1], atol=1e-9)


def test_hermitian_eigh_residuals():
    rng = np.random.default_rng(6)
    for _ in range(20):
        h = random_hermitian(8, rng)
        values, vectors = hermitian_eigh(h)
        for k in range(8):
            v = vectors[:, k]
            assert np.max(np.abs(h @ v - values[k] * v)) < 1e-9
        assert np.allclose(vectors.conj().T @ vectors, np.eye(8), atol=1e-9)


def test_hermitian_eigh_degenerate_spectrum():
    values, vectors = hermitian_eigh(np.eye(4) / 4)
    assert np.allclose(values, 0.25)
    assert np.allclose(vectors.conj().T @ vectors, np.eye(4), atol=1e-12)


def test_non_hermitian_input_rejected():
    with pytest.raises(NotHermitianError):
        hermitian_eigenvalues(np.array([[0, 1], [0, 0]], dtype=complex))


def test_purity_examples():
    psi = StateVector.normalized([1, 1j, -1, 0.5])
    assert abs(purity(psi.projector()) - 1.0) < 1e-12
    assert abs(purity(np.eye(4) / 4) - 0.25) < 1e-15
    assert abs(purity(0.5 * KET0 + 0.5 * KET1) - 0.5) < 1e-15


def test_entropy_examples():
    psi = StateVector.normalized([1, 2j])
    assert von_neumann_entropy(psi.projector()) < 1e-12
    assert abs(von_neumann_entropy(I2 / 2) - 1.0) < 1e-12
    assert abs(von_neumann_entropy(np.diag([0.75, 0.25])) - 0.811278) < 1e-6


def test_entropy_additive_on_products():
    rng = np.random.default_rng(7)
    a, b = random_density(2, rng), random_density(4, rng)
    total = von_neumann_entropy(np.kron(a, b))
    assert abs(total - von_neumann_entropy(a) - von_neumann_entropy(b)) < 1e-9


def test_density_matrix_validation():
    rho = DensityMatrix.from_matrix(np.eye(4) / 4)
    assert rho.n_qubits == 2
    assert rho.dim == 4

    with pytest.raises(InvalidDensityMatrixError):
        DensityMatrix.from_matrix(np.eye(4) / 2)
    with pytest.raises(InvalidDensityMatrixError):
        DensityMatrix.from_matrix(np.diag([1.2, -0.2]).astype(complex))
    with pytest.raises(InvalidDensityMatrixError):
        DensityMatrix.from_matrix(np.array([[0.5, 0.1], [0.2, 0.5]], dtype=complex))


def test_state_vector_normalisation():
    psi = StateVector.normalized([3, 4j])
    assert psi.is_normalized()
    assert psi.n_qubits == 1
    with pytest.raises(ValueError):
        StateVector.normalized([0, 0])
