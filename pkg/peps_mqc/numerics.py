"""
Dense and sparse complex linear algebra shared by the rest of the package.

Index convention: the leftmost tensor factor is the most significant index everywhere.
"""
import logging
from functools import reduce
from typing import Sequence, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from peps_mqc.exceptions import ConvergenceError, ShapeError, InputError

logger = logging.getLogger(__name__)

TOLERANCE = 1e-10
SOLVER_TOLERANCE = 1e-8

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PAULIS = (I2, X, Y, Z)
PAULI_LABELS = ("I", "X", "Y", "Z")

CZ = np.diag([1, 1, 1, -1]).astype(complex)

KET_0 = np.array([1, 0], dtype=complex)
KET_1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)


def as_matrix(m, rows: int = None, cols: int = None) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ShapeError(f"expected a matrix, got an array of shape {m.shape}")
    if (rows is not None and m.shape[0] != rows) or (
        cols is not None and m.shape[1] != cols
    ):
        raise ShapeError(f"expected a {rows}x{cols} matrix, got {m.shape}")
    return m


def as_vector(v, dim: int = None) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1:
        raise ShapeError(f"expected a vector, got an array of shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise ShapeError(f"expected a vector of dimension {dim}, got {v.shape[0]}")
    return v


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(factors: Sequence) -> np.ndarray:
    if not factors:
        return np.eye(1, dtype=complex)
    return reduce(np.kron, [np.asarray(f, dtype=complex) for f in factors])


def is_unitary(m, tol: float = TOLERANCE) -> bool:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=tol)


def is_hermitian(m, tol: float = TOLERANCE) -> bool:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return np.allclose(m, m.conj().T, atol=tol)


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise InputError("cannot normalize a zero vector")
    return v / norm


def reshuffle(m) -> np.ndarray:
    """
    Realigns a 4x4 two-qubit operator so that m[(i,j),(k,l)] lands at [(i,k),(j,l)]. A product operator a (x) b becomes
    the rank-1 matrix vec(a) vec(b)^T.
    """
    m = as_matrix(m, 4, 4)
    return m.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)


def operator_schmidt_rank(m, tol: float = TOLERANCE) -> int:
    singular_values = scipy.linalg.svdvals(reshuffle(m))
    if singular_values[0] == 0:
        return 0
    return int(np.sum(singular_values > tol * singular_values[0]))


def hermitian_eig(m, tol: float = TOLERANCE) -> Tuple[np.ndarray, np.ndarray]:
    m = as_matrix(m)
    if not is_hermitian(m, tol):
        raise InputError("hermitian_eig needs a Hermitian matrix")
    return scipy.linalg.eigh(m)


def sparse_low_spectrum(
    h,
    k: int = 1,
    tol: float = SOLVER_TOLERANCE,
    max_iterations: int = 10000,
    return_vectors: bool = False,
):
    """
    Lowest ``k`` eigenvalues of a Hermitian operator, ascending. Lanczos (ARPACK) does the work; tiny operators go to
    the dense solver because ARPACK needs k < n - 1 for complex input. Every returned pair is checked against
    ``tol`` on its residual relative to the operator scale.
    """
    h = scipy.sparse.csr_matrix(h, dtype=complex)
    n = h.shape[0]
    if h.shape[0] != h.shape[1]:
        raise ShapeError("sparse_low_spectrum needs a square operator")
    if n > 2 ** 20:
        raise ShapeError(f"operator dimension {n} exceeds 2**20")
    if not 0 < k < n:
        raise InputError(f"cannot compute {k} eigenvalues of a {n}x{n} operator")
    asymmetry = h - h.conj().T
    if asymmetry.nnz and abs(asymmetry).max() > TOLERANCE:
        raise InputError("sparse_low_spectrum needs a Hermitian operator")

    if k >= n - 1 or n <= 16:
        values, vectors = scipy.linalg.eigh(h.toarray())
        values, vectors = values[:k], vectors[:, :k]
    else:
        try:
            values, vectors = scipy.sparse.linalg.eigsh(
                h,
                k=k,
                which="SA",
                tol=0,
                ncv=min(n, max(2 * k + 1, 20)),
                maxiter=max_iterations,
            )
        except scipy.sparse.linalg.ArpackNoConvergence as error:
            raise ConvergenceError(
                f"eigensolver did not converge after {max_iterations} iterations"
            ) from error
        order = np.argsort(values)
        values, vectors = values[order], vectors[:, order]

    scale = max(1.0, float(abs(h).sum(axis=1).max()))
    for index in range(k):
        residual = np.linalg.norm(h @ vectors[:, index] - values[index] * vectors[:, index])
        if residual > tol * scale:
            raise ConvergenceError(
                f"eigenpair {index} has residual {residual:.3e} above {tol * scale:.3e}"
            )
    logger.debug("lowest %d eigenvalues of a %dx%d operator: %s", k, n, n, values)
    if return_vectors:
        return values, vectors
    return values


def scale_distance(a, b) -> float:
    """
    Distance between two operators (or vectors) once positive scale and global phase are divided out. Zero means a and
    b agree up to a factor s * e^{i theta} with s > 0.
    """
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    norm_a, norm_b = np.linalg.norm(a), np.linalg.norm(b)
    if norm_a == 0 or norm_b == 0:
        return 0.0 if norm_a == norm_b else 1.0
    a, b = a / norm_a, b / norm_b
    overlap = np.vdot(b, a)
    return float(np.linalg.norm(a - overlap * b))


def same_up_to_scale(a, b, tol: float = 1e-9) -> bool:
    return scale_distance(a, b) <= tol


def pauli_decomposition(m) -> np.ndarray:
    """Coefficients c[a, b] with m = sum c[a, b] sigma_a (x) sigma_b for a 4x4 m; a single Pauli list for 2x2 m."""
    m = as_matrix(m)
    if m.shape == (2, 2):
        return np.array([np.trace(p.conj().T @ m) / 2 for p in PAULIS])
    if m.shape == (4, 4):
        return np.array(
            [[np.trace(kron(p, q).conj().T @ m) / 4 for q in PAULIS] for p in PAULIS]
        )
    raise ShapeError(f"no Pauli decomposition for shape {m.shape}")


def identify_pauli(m, tol: float = 1e-9) -> Tuple[Tuple[int, ...], complex]:
    """
    Returns (indices, phase) such that m = phase * sigma_indices, where m is a unit-norm multiple of a single Pauli
    (string) on one or two qubits. Indices point into PAULIS.
    """
    coefficients = pauli_decomposition(m)
    flat_index = int(np.argmax(np.abs(coefficients)))
    indices = np.unravel_index(flat_index, coefficients.shape)
    phase = coefficients[indices]
    rest = np.abs(coefficients).ravel()
    rest[flat_index] = 0
    if rest.max() > tol or abs(abs(phase) - 1) > tol:
        raise InputError("operator is not a single Pauli string up to phase")
    return tuple(int(i) for i in indices), complex(phase)


def unit_phase(z: complex, tol: float = 1e-9) -> complex:
    """Snaps a unit-modulus complex number onto {1, -1, i, -i} when it sits within ``tol`` of one of them."""
    for candidate in (1, -1, 1j, -1j):
        if abs(z - candidate) <= tol:
            return complex(candidate)
    return complex(z)


def rotation(axis: np.ndarray, theta: float) -> np.ndarray:
    """exp(i axis theta / 2) for a Pauli axis."""
    return np.cos(theta / 2) * I2 + 1j * np.sin(theta / 2) * np.asarray(axis, dtype=complex)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_special_unitary(rng: np.random.Generator) -> np.ndarray:
    u = haar_unitary(2, rng)
    return u / np.sqrt(np.linalg.det(u))


def embed(op, first_wire: int, n_wires: int) -> np.ndarray:
    """Places a one- or two-wire operator on ``first_wire`` (and the wire below it) of an n-wire register."""
    op = np.asarray(op, dtype=complex)
    span = int(round(np.log2(op.shape[0])))
    before = np.eye(2 ** first_wire, dtype=complex)
    after = np.eye(2 ** (n_wires - first_wire - span), dtype=complex)
    return kron_all([before, op, after])


def to_pairs(a) -> list:
    """Nested [re, im] pairs for JSON."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [to_pairs(x) for x in a]


def from_pairs(data) -> np.ndarray:
    array = np.asarray(data, dtype=float)
    if array.shape[-1:] != (2,):
        raise ShapeError("complex values must be [re, im] pairs")
    return array[..., 0] + 1j * array[..., 1]
