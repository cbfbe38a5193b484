"""
The four-level honeycomb model: square sites carry an orthonormal operator basis, circle sites couple a vertical qubit
bond to the Pauli-like list B. Everything here is a fixed constant or a pure function of measurement outcomes.

Two-wire operators put the upper wire first. Outcome triples are passed as (d, m, u): lower circle, mid square,
upper circle.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Tuple

import numpy as np

from peps_mqc.correlation import (
    MatrixList,
    MeasurementBasis,
    ReadoutMap,
    SiteTensor,
    project_site,
)
from peps_mqc.exceptions import InputError
from peps_mqc.frames import PauliFrame
from peps_mqc.numerics import (
    CZ,
    H,
    I2,
    KET_0,
    KET_1,
    KET_MINUS,
    KET_PLUS,
    PAULI_LABELS,
    PAULIS,
    X,
    Z,
    haar_special_unitary,
    identify_pauli,
    is_unitary,
    kron,
    same_up_to_scale,
    to_pairs,
    unit_phase,
)

logger = logging.getLogger(__name__)

SQRT2 = np.sqrt(2)


class SiteRole(Enum):
    SQUARE_HORIZONTAL = "square"
    SQUARE_VERTICAL_MID = "mid"
    CIRCLE = "circle"
    READOUT_SQUARE = "readout"


@dataclass(frozen=True)
class ModelConstants:
    square: MatrixList
    sigma: MatrixList
    b_list: MatrixList
    circle_kets: np.ndarray
    circle: SiteTensor
    e_mid: MatrixList
    e_left: MatrixList
    e_right: MatrixList
    left_boundary: np.ndarray

    @classmethod
    def build(cls) -> "ModelConstants":
        square = MatrixList(
            np.array(
                [
                    [[1, 0], [0, 1]],
                    [[0, 1], [1j, 0]],
                    [[0, 1j], [1, 0]],
                    [[1, 0], [0, -1]],
                ]
            )
            / SQRT2,
            name="A",
        )
        b_list = MatrixList(np.array([I2, X, Z, Z @ X]), name="B")
        circle_kets = np.array([KET_0, KET_0, KET_1, KET_1])
        e_left = [I2, X, X, I2]
        e_right = [I2, I2, X, X]
        return cls(
            square=square,
            sigma=MatrixList(np.array(PAULIS), name="Sigma"),
            b_list=b_list,
            circle_kets=circle_kets,
            circle=SiteTensor.from_kets(circle_kets, b_list, name="T"),
            # indexed by the outcome of the Hadamard-realizing measurement on the mid square
            e_mid=MatrixList(
                np.array([kron(I2, I2), kron(X, I2), kron(X, X), kron(I2, X)]),
                name="E_mid",
            ),
            e_left=MatrixList(np.array(e_left), name="E_l"),
            e_right=MatrixList(np.array(e_right), name="E_r"),
            left_boundary=KET_0.copy(),
        )


MODEL = ModelConstants.build()

CZ_BASIS = MeasurementBasis(
    np.array([[1, 0, 1, 0], [0, 1, 0, -1], [1, 0, -1, 0], [0, 1, 0, 1]]) / SQRT2,
    label="cz",
)

REMOVAL_BASIS = MeasurementBasis(
    np.array(
        [
            [2, 1 + 1j, 1 + 1j, 0],
            [0, 1j - 1, 1 - 1j, 2],
            [0, 1 - 1j, 1j - 1, 2],
            [2, -1 - 1j, -1 - 1j, 0],
        ]
    )
    / (2 * SQRT2),
    label="removal",
)

# (beta, alpha) of the realized |beta>_d <alpha|_u for each removal outcome
REMOVAL_SIGNS = (("+", "+"), ("+", "-"), ("-", "+"), ("-", "-"))
_SIGN_KETS = {"+": KET_PLUS, "-": KET_MINUS}

READOUT_PROJECTORS = (np.diag([1, 0, 0, 1]).astype(complex), np.diag([0, 1, 1, 0]).astype(complex))
_LEVEL_TO_BIT = np.array([[1, 0, 0, 1], [0, 1, 1, 0]], dtype=float)


def _check_outcome(outcome: int):
    if outcome not in range(4):
        raise InputError(f"outcome {outcome} out of range 0..3")


def single_qubit_basis(u) -> MeasurementBasis:
    """
    The one-measurement basis for a gate U in SU(2): outcome k leaves Sigma(k) U / sqrt(2) in the correlation space.
    The closed-form vectors are the printed table scaled by an extra 1/sqrt(2) so that they are unit vectors.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or not is_unitary(u):
        raise InputError("single_qubit_basis needs a 2x2 unitary")
    if abs(np.linalg.det(u) - 1) > 1e-10:
        raise InputError("single_qubit_basis needs det U = 1")
    a, b = u[0, 0], u[0, 1]
    ac, bc = np.conj(a), np.conj(b)
    vectors = np.array(
        [
            [a + ac, bc - 1j * b, 1j * bc - b, ac - a],
            [bc - b, a + 1j * ac, ac + 1j * a, -bc - b],
            [-1j * b - 1j * bc, ac + 1j * a, -1j * ac - a, -1j * b + 1j * bc],
            [ac - a, bc + 1j * b, b + 1j * bc, a + ac],
        ]
    ) / 2
    return MeasurementBasis(vectors, label="table")


def hadamard_basis() -> MeasurementBasis:
    # i H is the SU(2) representative of the Hadamard gate
    return single_qubit_basis(1j * H)


def c_coefficient(s: int, t: int, m: int) -> complex:
    """c(s, t; m) = sqrt(2) <phi(s)| Sigma(m) H |phi(t)>."""
    for outcome in (s, t, m):
        _check_outcome(outcome)
    kets = MODEL.circle_kets
    return complex(SQRT2 * kets[s].conj() @ PAULIS[m] @ H @ kets[t])


def c_table(m: int) -> np.ndarray:
    return np.array([[c_coefficient(s, t, m) for t in range(4)] for s in range(4)])


def cz_block(d: int, m: int, u: int) -> np.ndarray:
    """W(d, m, u) = sum_{s,t} psi_d*(s) psi_u*(t) c(s, t; m) B(t) (x) B(s), upper factor first."""
    for outcome in (d, m, u):
        _check_outcome(outcome)
    psi_d = CZ_BASIS[d].conj()
    psi_u = CZ_BASIS[u].conj()
    table = c_table(m)
    b = MODEL.b_list
    return sum(
        psi_d[s] * psi_u[t] * table[s, t] * kron(b[t], b[s])
        for s in range(4)
        for t in range(4)
    )


def edge_formula(d: int, m: int, u: int) -> np.ndarray:
    """E_mid(m) (E_l(u) (x) E_l(d)) CZ (E_r(u) (x) E_r(d)) E_mid(m)."""
    for outcome in (d, m, u):
        _check_outcome(outcome)
    e_mid = MODEL.e_mid[m]
    left = kron(MODEL.e_left[u], MODEL.e_left[d])
    right = kron(MODEL.e_right[u], MODEL.e_right[d])
    return e_mid @ left @ CZ @ right @ e_mid


def mid_square_byproducts() -> MatrixList:
    """
    Derives the mid-square by-product list from the c tables: entry m is the Pauli pair P with
    cz_block(0, m, 0) = P CZ P.
    """
    candidates = [kron(upper, lower) for upper in (I2, X) for lower in (I2, X)]
    entries = []
    for m in range(4):
        block = cz_block(0, m, 0)
        entries.append(
            next(c for c in candidates if same_up_to_scale(c @ CZ @ c, block, 1e-12))
        )
    return MatrixList(np.array(entries), name="E_mid")


def cz_byproduct(d: int, m: int, u: int) -> PauliFrame:
    """The Pauli pair P (upper first) with cz_block(d, m, u) = P CZ, as a two-wire frame."""
    block = cz_block(d, m, u)
    indices, phase = identify_pauli(block @ CZ.conj().T)
    return PauliFrame(tuple(PAULI_LABELS[i] for i in indices), unit_phase(phase))


def edge_removal_basis(outcome: int) -> Tuple[np.ndarray, np.ndarray]:
    """The removal vector for ``outcome`` and the vertical operator |beta>_d <alpha|_u it realizes."""
    _check_outcome(outcome)
    vector = REMOVAL_BASIS[outcome]
    return vector, project_site(MODEL.square, vector)


def edge_removal_byproduct(outcome: int) -> Dict[str, bool]:
    """Which neighbour lists get sandwiched by X: a '-' on either side of |beta>_d <alpha|_u conjugates that side."""
    _check_outcome(outcome)
    beta, alpha = REMOVAL_SIGNS[outcome]
    return {"up": alpha == "-", "down": beta == "-"}


def removal_lists(outcome: int) -> Tuple[MatrixList, MatrixList]:
    """
    Effective (upper, lower) circle lists once the mid square realized |beta>_d <alpha|_u. Up to the common
    1/sqrt(2) these are B or X B X following edge_removal_byproduct.
    """
    _check_outcome(outcome)
    beta, alpha = (_SIGN_KETS[sign] for sign in REMOVAL_SIGNS[outcome])
    kets = MODEL.circle_kets
    upper = MODEL.b_list.scaled([np.vdot(alpha, ket) for ket in kets])
    lower = MODEL.b_list.scaled([np.vdot(ket, beta) for ket in kets])
    return upper, lower


def boundary_circle_list(vector=KET_PLUS) -> MatrixList:
    """Circle list once its vertical leg is closed by a lattice-boundary vector (|+> leaves B / sqrt(2))."""
    return MODEL.circle.close_vertical(vector)


def readout_map() -> ReadoutMap:
    rows = np.array([MODEL.left_boundary @ a for a in MODEL.square.entries])
    return ReadoutMap(rows, alpha=1.0)


def readout_distribution(state, n_wires: int) -> np.ndarray:
    """
    Born probabilities of the two-outcome readout on every readout site. ``state`` lives on n four-level readout sites,
    wire 0 first; the result is indexed by the bit string, wire 0 most significant.
    """
    probabilities = np.abs(np.asarray(state, dtype=complex).reshape([4] * n_wires)) ** 2
    for axis in range(n_wires):
        probabilities = np.moveaxis(
            np.tensordot(_LEVEL_TO_BIT, probabilities, axes=([1], [axis])), 0, axis
        )
    probabilities = probabilities.reshape(-1)
    total = probabilities.sum()
    if total == 0:
        raise InputError("readout state is zero")
    return probabilities / total


def byproduct_census(samples: int = 20, seed: int = 0) -> Dict[str, List[str]]:
    """Which Pauli by-products actually occur on each site type."""
    rng = np.random.default_rng(seed)
    square = set()
    for _ in range(samples):
        u = haar_special_unitary(rng)
        basis = single_qubit_basis(u)
        for outcome in range(4):
            achieved = project_site(MODEL.square, basis[outcome]) @ u.conj().T * SQRT2
            indices, _ = identify_pauli(achieved)
            square.add(PAULI_LABELS[indices[0]])
    vertical = set()
    for d in range(4):
        for m in range(4):
            for u in range(4):
                vertical.update(cz_byproduct(d, m, u).labels)
    return {
        SiteRole.SQUARE_HORIZONTAL.value: sorted(square),
        SiteRole.CIRCLE.value: sorted(vertical),
    }


def dump_constants() -> dict:
    return {
        "A": to_pairs(MODEL.square.entries),
        "Sigma": to_pairs(MODEL.sigma.entries),
        "B": to_pairs(MODEL.b_list.entries),
        "circle_kets": to_pairs(MODEL.circle_kets),
        "E_mid": to_pairs(MODEL.e_mid.entries),
        "E_l": to_pairs(MODEL.e_left.entries),
        "E_r": to_pairs(MODEL.e_right.entries),
        "L": to_pairs(MODEL.left_boundary),
        "cz_basis": to_pairs(CZ_BASIS.vectors),
        "removal_basis": to_pairs(REMOVAL_BASIS.vectors),
        "readout": to_pairs(readout_map().matrix),
        "c_tables": [to_pairs(c_table(m)) for m in range(4)],
    }
