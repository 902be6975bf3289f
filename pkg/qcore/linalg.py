"""
Complex linear algebra on small (at most 8x8) matrices.

Basis convention shared by every module: qubit A is the most significant index,
so basis states read |q_A q_B q_C> and ``tensor_product(a, b)`` puts ``a`` on the
slow axes.
"""
import logging
from math import sqrt
from typing import Iterable, Sequence, Tuple

import numpy as np
import numpy.typing as npt

logger = logging.getLogger(__name__)

try:
    from numba import njit
except ImportError:
    logger.debug("numba not available, Jacobi sweeps run in the interpreter")

    def njit(pyfunc=None, **kwargs):
        def wrap(func):
            return func

        if pyfunc is not None:
            return wrap(pyfunc)
        return wrap


ComplexMatrix = npt.NDArray[np.complex128]

HERMITIAN_INPUT_TOL = 1e-10
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


class DimensionMismatchError(ValueError):
    """Subsystem dimensions do not match the matrix they describe"""


class NotHermitianError(ValueError):
    """Matrix handed to the Hermitian eigensolver is not Hermitian"""


def as_matrix(a) -> ComplexMatrix:
    """Return ``a`` (array or DensityMatrix) as a square complex128 array"""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"Expected a square matrix, got shape {m.shape}")
    return m


def tensor_product(a, b) -> ComplexMatrix:
    """Kronecker product with ``a``'s indices as the major axes"""
    return np.kron(as_matrix(a), as_matrix(b))


def tensor_all(matrices: Iterable) -> ComplexMatrix:
    result = None
    for m in matrices:
        result = as_matrix(m) if result is None else tensor_product(result, m)
    if result is None:
        raise ValueError("tensor_all needs at least one matrix")
    return result


def _check_dims(m: ComplexMatrix, dims: Sequence[int]) -> Tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims) or int(np.prod(dims)) != m.shape[0]:
        raise DimensionMismatchError(
            f"Subsystem dims {dims} multiply to {int(np.prod(dims))}, matrix has dim {m.shape[0]}"
        )
    return dims


def partial_trace(rho, keep: Iterable[int], dims: Sequence[int]) -> ComplexMatrix:
    """Trace out every subsystem not listed in ``keep``; kept subsystems stay in order"""
    m = as_matrix(rho)
    dims = _check_dims(m, dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise ValueError(f"keep {keep} out of range for {len(dims)} subsystems")

    t = m.reshape(dims + dims)
    for axis in sorted((i for i in range(len(dims)) if i not in keep), reverse=True):
        t = np.trace(t, axis1=axis, axis2=axis + t.ndim // 2)
    d = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d, d)


def partial_transpose(rho, subsystem: int, dims: Sequence[int]) -> ComplexMatrix:
    """Transpose the indices of one subsystem; applying it twice is the identity"""
    m = as_matrix(rho)
    dims = _check_dims(m, dims)
    n = len(dims)
    if not 0 <= subsystem < n:
        raise ValueError(f"subsystem {subsystem} out of range for {n} subsystems")
    t = m.reshape(dims + dims).swapaxes(subsystem, subsystem + n)
    return np.ascontiguousarray(t).reshape(m.shape)


@njit(cache=True, nogil=True)
def _cyclic_jacobi(a, tol, max_sweeps):
    # a is overwritten; returns (diagonal, rotation matrix, sweeps used)
    n = a.shape[0]
    v = np.eye(n)
    sweeps = 0
    while sweeps < max_sweeps:
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if sqrt(2.0 * off) < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
        sweeps += 1
    return np.diag(a).copy(), v, sweeps


def _real_embedding(h: ComplexMatrix) -> np.ndarray:
    if np.max(np.abs(h - h.conj().T), initial=0.0) > HERMITIAN_INPUT_TOL:
        raise NotHermitianError("Matrix is not Hermitian within 1e-10")
    h = 0.5 * (h + h.conj().T)
    x, y = h.real, h.imag
    return np.ascontiguousarray(np.block([[x, -y], [y, x]]), dtype=np.float64)


def _diagonalize(h: ComplexMatrix):
    s = _real_embedding(h)
    tol = JACOBI_TOL * max(1.0, float(np.linalg.norm(s)))
    values, vectors, sweeps = _cyclic_jacobi(s, tol, JACOBI_MAX_SWEEPS)
    if sweeps >= JACOBI_MAX_SWEEPS:
        logger.warning(f"Jacobi stopped at the sweep limit ({JACOBI_MAX_SWEEPS}) for a {h.shape[0]}x{h.shape[0]} matrix")
    return values, vectors


def hermitian_eigenvalues(h) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix in descending order"""
    h = as_matrix(h)
    values, _ = _diagonalize(h)
    values = np.sort(values)[::-1]
    # the real embedding doubles every eigenvalue
    return 0.5 * (values[0::2] + values[1::2])


def hermitian_eigh(h) -> Tuple[np.ndarray, ComplexMatrix]:
    """Eigenvalues (descending) and unit eigenvectors (columns) of a Hermitian matrix"""
    h = as_matrix(h)
    n = h.shape[0]
    _, vectors = _diagonalize(h)
    candidates = vectors[:n, :] + 1j * vectors[n:, :]

    # each complex eigenvector shows up twice in the embedding (z and i*z);
    # pivoted Gram-Schmidt keeps n independent ones
    chosen = []
    remaining = candidates.copy()
    for _ in range(n):
        norms = np.linalg.norm(remaining, axis=0)
        best = int(np.argmax(norms))
        z = remaining[:, best] / norms[best]
        chosen.append(z)
        remaining = remaining - np.outer(z, z.conj() @ remaining)

    basis = np.column_stack(chosen)
    rayleigh = np.real(np.einsum("ij,ik,kj->j", basis.conj(), h, basis))
    order = np.argsort(rayleigh)[::-1]
    return rayleigh[order], basis[:, order]


def hermitian_function(h, func) -> ComplexMatrix:
    """Apply a scalar function to the spectrum of a Hermitian matrix"""
    values, vectors = hermitian_eigh(h)
    return (vectors * func(values)) @ vectors.conj().T
