"""
Correlation-space machinery for matrix-product and projected entangled-pair states: amplitudes, the operators a
measurement induces on the virtual space, readout, vertical two-site contraction and the by-product locality test.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from peps_mqc.exceptions import InputError, ShapeError
from peps_mqc.numerics import (
    PAULIS,
    TOLERANCE,
    as_matrix,
    as_vector,
    is_unitary,
    kron,
    normalize,
    operator_schmidt_rank,
    reshuffle,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatrixList:
    """A list of d matrices of size D x D, one per physical level."""

    entries: np.ndarray
    name: str = ""

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 3 or entries.shape[1] != entries.shape[2]:
            raise ShapeError(f"a matrix list needs shape (d, D, D), got {entries.shape}")
        object.__setattr__(self, "entries", entries)

    @property
    def arity(self) -> int:
        return self.entries.shape[0]

    @property
    def dim(self) -> int:
        return self.entries.shape[1]

    def __len__(self):
        return self.arity

    def __getitem__(self, index) -> np.ndarray:
        return self.entries[index]

    def gram(self) -> np.ndarray:
        """Hilbert-Schmidt inner products Tr[A(i)^dagger A(j)]."""
        return np.einsum("iab,jab->ij", self.entries.conj(), self.entries)

    def is_orthonormal(self, tol: float = 1e-12) -> bool:
        return np.allclose(self.gram(), np.eye(self.arity), atol=tol)

    def is_orthogonal_basis(self, tol: float = 1e-12) -> bool:
        """Pairwise Hilbert-Schmidt orthogonal, equal norms and complete (d = D**2)."""
        gram = self.gram()
        return (
            self.arity == self.dim ** 2
            and gram[0, 0].real > tol
            and np.allclose(gram, gram[0, 0].real * np.eye(self.arity), atol=tol)
        )

    def conjugated(self, op) -> "MatrixList":
        op = as_matrix(op, self.dim, self.dim)
        return MatrixList(op @ self.entries @ op.conj().T, name=f"{self.name}^conj")

    def scaled(self, factors) -> "MatrixList":
        factors = np.asarray(factors, dtype=complex).reshape(-1, 1, 1)
        return MatrixList(factors * self.entries, name=self.name)


@dataclass(frozen=True)
class BoundaryPair:
    """
    Boundary vectors of a chain. ``left`` holds the components of the bra, so the amplitude is left @ ... @ right and
    neither vector is conjugated.
    """

    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        left, right = as_vector(self.left), as_vector(self.right)
        if left.shape != right.shape:
            raise ShapeError("boundary vectors must have the same dimension")
        if not np.any(left) or not np.any(right):
            raise InputError("boundary vectors must be nonzero")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)


@dataclass(frozen=True)
class MeasurementBasis:
    """Orthonormal measurement vectors; row k is the state for outcome k."""

    vectors: np.ndarray
    label: str = ""

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=complex)
        if vectors.ndim != 2 or vectors.shape[0] != vectors.shape[1]:
            raise ShapeError(f"a basis needs d vectors of dimension d, got {vectors.shape}")
        gram = vectors.conj() @ vectors.T
        if not np.allclose(gram, np.eye(vectors.shape[0]), atol=1e-12):
            raise InputError(f"basis {self.label!r} is not orthonormal")
        object.__setattr__(self, "vectors", vectors)

    def __len__(self):
        return self.vectors.shape[0]

    def __getitem__(self, outcome: int) -> np.ndarray:
        if not 0 <= outcome < len(self):
            raise InputError(f"outcome {outcome} out of range")
        return self.vectors[outcome]


@dataclass(frozen=True)
class SiteTensor:
    """
    Rank-3 site tensor: for every physical level i a vertical ket (dimension D') tensored with a horizontal D x D
    matrix. Stored as an array indexed [i, b, row, col].
    """

    entries: np.ndarray
    name: str = ""

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 4 or entries.shape[2] != entries.shape[3]:
            raise ShapeError(f"a site tensor needs shape (d, D', D, D), got {entries.shape}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_kets(cls, kets: Sequence, matrices: MatrixList, name: str = "") -> "SiteTensor":
        kets = np.asarray(kets, dtype=complex)
        return cls(np.einsum("ib,irc->ibrc", kets, matrices.entries), name=name)

    @property
    def arity(self) -> int:
        return self.entries.shape[0]

    @property
    def vertical_dim(self) -> int:
        return self.entries.shape[1]

    def project(self, state) -> np.ndarray:
        """T[phi] = sum_i phi*(i) T(i), still carrying the vertical index: shape (D', D, D)."""
        state = as_vector(state, self.arity)
        return np.tensordot(state.conj(), self.entries, axes=1)

    def close_vertical(self, boundary) -> MatrixList:
        """Contracts the vertical leg with a boundary vector, leaving an ordinary matrix list."""
        boundary = as_vector(boundary, self.vertical_dim)
        return MatrixList(np.einsum("b,ibrc->irc", boundary, self.entries), name=self.name)

    def fold_vertical(self, op) -> "SiteTensor":
        """Absorbs a D' x D' operator acting on the vertical leg: new[i, a] = sum_b op[a, b] T[i, b]."""
        op = as_matrix(op, self.vertical_dim, self.vertical_dim)
        return SiteTensor(np.einsum("ab,ibrc->iarc", op, self.entries), name=self.name)

    def coefficients(self, basis: MatrixList) -> np.ndarray:
        """M(i)[b, kappa] with T(i) = sum_{b,kappa} M(i)[b, kappa] |b> (x) B_kappa."""
        norms = np.einsum("kab,kab->k", basis.entries.conj(), basis.entries)
        overlaps = np.einsum("kab,ibab->ibk", basis.entries.conj(), self.entries)
        return overlaps / norms


@dataclass(frozen=True)
class ReadoutMap:
    """The d x D readout matrix R (rows <L(i)|) and its scale alpha."""

    matrix: np.ndarray
    alpha: float = 1.0

    def __post_init__(self):
        matrix = as_matrix(self.matrix)
        dim = matrix.shape[1]
        if np.linalg.matrix_rank(matrix) != dim:
            raise InputError("readout matrix must have rank D")
        product = matrix.conj().T @ matrix
        if not np.allclose(product, product[0, 0] * np.eye(dim), atol=TOLERANCE):
            raise InputError("readout columns must be orthogonal with equal norms")
        object.__setattr__(self, "matrix", matrix)

    @property
    def levels(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]


def mps_amplitude(lists: Sequence[MatrixList], boundary: BoundaryPair, levels: Sequence[int]) -> complex:
    """
    <L| A_N(i_N) ... A_1(i_1) |R>. ``lists`` and ``levels`` run from site 1 (next to |R>) to site N, so the state
    evolves from the right towards the left.
    """
    if len(lists) != len(levels):
        raise ShapeError("one level index is needed per site")
    vector = boundary.right
    for site, level in zip(lists, levels):
        if site.dim != vector.shape[0]:
            raise ShapeError("matrix list dimension does not match the boundary")
        if not 0 <= level < site.arity:
            raise InputError(f"level {level} out of range for a {site.arity}-level site")
        vector = site[level] @ vector
    return complex(boundary.left @ vector)


def project_site(matrix_list: MatrixList, state) -> np.ndarray:
    """A[phi] = sum_i phi*(i) A(i)."""
    state = as_vector(state, matrix_list.arity)
    return np.tensordot(state.conj(), matrix_list.entries, axes=1)


def gate_product(ops: Sequence) -> np.ndarray:
    """
    Product of correlation-space operators written in product order: gate_product([A_2, A_1]) = A_2 A_1, so the last
    entry acts first. The empty product is the identity of dimension 2.
    """
    if not ops:
        return np.eye(2, dtype=complex)
    matrices = [as_matrix(op) for op in ops]
    dim = matrices[0].shape[0]
    result = np.eye(dim, dtype=complex)
    for matrix in matrices:
        if matrix.shape != (dim, dim):
            raise ShapeError("gate_product needs square matrices of equal size")
        result = result @ matrix
    return result


def byproduct_of(actual, intended) -> np.ndarray:
    """E with actual = E intended."""
    actual, intended = as_matrix(actual), as_matrix(intended)
    if actual.shape != intended.shape:
        raise ShapeError("actual and intended operators differ in shape")
    if np.linalg.cond(intended) > 1e12:
        raise InputError("intended operator is singular")
    return actual @ np.linalg.inv(intended)


def readout_apply(readout: ReadoutMap, frame, state) -> np.ndarray:
    frame = as_matrix(frame, readout.dim, readout.dim)
    state = as_vector(state, readout.dim)
    if not is_unitary(frame):
        raise InputError("the frame must be unitary for the readout to preserve orthogonality")
    if not np.any(state):
        raise InputError("cannot read out the zero vector")
    return normalize(readout.alpha * readout.matrix @ frame @ state)


def vertical_contract(upper: SiteTensor, lower: SiteTensor, up_state, down_state) -> np.ndarray:
    """
    Joins two sites along their shared vertical bond after measuring them in ``up_state`` and ``down_state``.
    The upper site is the first tensor factor of the returned D^2 x D^2 operator.
    """
    if upper.vertical_dim != lower.vertical_dim:
        raise ShapeError("vertical bond dimensions do not match")
    up = upper.project(up_state)
    down = lower.project(down_state)
    return sum(kron(up[b], down[b]) for b in range(upper.vertical_dim))


def locality_condition(w, e, f, tol: float = TOLERANCE) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """
    Pushes the local by-product e (x) f through the two-qubit gate w. When W (e (x) f) W^dagger is again local it is
    returned as (G, H) with det H = 1 and the phase carried by G; otherwise None.
    """
    w, e, f = as_matrix(w, 4, 4), as_matrix(e, 2, 2), as_matrix(f, 2, 2)
    for name, op in (("W", w), ("E", e), ("F", f)):
        if not is_unitary(op):
            raise InputError(f"{name} must be unitary")

    pushed = w @ kron(e, f) @ w.conj().T
    if operator_schmidt_rank(pushed, tol) != 1:
        return None

    u, s, vh = scipy.linalg.svd(reshuffle(pushed))
    g = (u[:, 0] * np.sqrt(s[0])).reshape(2, 2)
    h = (vh[0, :] * np.sqrt(s[0])).reshape(2, 2)
    root = np.sqrt(np.linalg.det(h))
    return g * root, h / root


def gate_basis(matrix_list: MatrixList, target, label: str = "") -> MeasurementBasis:
    """
    Measurement basis on a site carrying an orthogonal operator basis: outcome k realizes Sigma(k) target up to a
    positive scale, i.e. A[phi(k)] = c / sqrt(2) Sigma(k) target with c the common Hilbert-Schmidt norm of the list.
    """
    target = as_matrix(target, 2, 2)
    if matrix_list.dim != 2 or not matrix_list.is_orthogonal_basis():
        raise InputError("gate_basis needs an orthogonal operator basis of 2x2 matrices")
    if not is_unitary(target):
        raise InputError("the target gate must be unitary")
    norm = np.sqrt(matrix_list.gram()[0, 0].real)
    vectors = np.array(
        [
            np.einsum("iab,ab->i", matrix_list.entries.conj(), sigma @ target).conj()
            for sigma in PAULIS
        ]
    ) / (norm * np.sqrt(2))
    return validate_basis(matrix_list, MeasurementBasis(vectors, label=label))


def validate_basis(matrix_list: MatrixList, basis: MeasurementBasis, max_condition: float = 1e8):
    """Every induced operator A[phi(k)] must be invertible, otherwise the basis cannot carry a computation."""
    for outcome in range(len(basis)):
        condition = np.linalg.cond(project_site(matrix_list, basis[outcome]))
        if not condition < max_condition:
            raise InputError(
                f"outcome {outcome} of basis {basis.label!r} induces a singular operator"
            )
    return basis


def expansion_matrix(op, basis: MatrixList) -> np.ndarray:
    """g with op B_mu = sum_nu g[mu, nu] B_nu for a complete orthogonal basis B."""
    op = as_matrix(op, basis.dim, basis.dim)
    norms = np.einsum("kab,kab->k", basis.entries.conj(), basis.entries)
    products = np.einsum("ab,mbc->mac", op, basis.entries)
    return np.einsum("nac,mac->mn", basis.entries.conj(), products) / norms


def operator_coefficients(op, basis: MatrixList) -> np.ndarray:
    """c[kappa, lambda] with op = sum c[kappa, lambda] B_kappa (x) B_lambda."""
    op = as_matrix(op, basis.dim ** 2, basis.dim ** 2)
    norms = np.einsum("kab,kab->k", basis.entries.conj(), basis.entries)
    coefficients = np.array(
        [[np.trace(kron(bk, bl).conj().T @ op) for bl in basis.entries] for bk in basis.entries]
    )
    return coefficients / np.outer(norms, norms)
