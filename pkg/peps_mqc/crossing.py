"""
Local gates that cross a canonical two-qubit gate W = exp(i/2 (a XX + b YY + c ZZ)): all u with W u W^dagger again
local. Through the magic basis Q the question becomes a support problem for SO(4) matrices: the phase filter F splits
into binary classes F_eta, and every class holding an orthogonal matrix contributes the eta = 0 group shifted by one
representative.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from peps_mqc.exceptions import InputError
from peps_mqc.numerics import (
    I2,
    PAULI_LABELS,
    PAULIS,
    X,
    Y,
    Z,
    is_unitary,
    kron,
    operator_schmidt_rank,
    rotation,
)

logger = logging.getLogger(__name__)

MAGIC = np.array(
    [
        [1, 0, 0, 1j],
        [0, 1j, 1, 0],
        [0, 1j, -1, 0],
        [1, 0, 0, -1j],
    ],
    dtype=complex,
) / np.sqrt(2)

DIAGONAL_REFLECTIONS = (kron(I2, I2), kron(X, X), kron(Y, Y), kron(Z, Z))

PLANES = ("12", "13", "14", "23", "24", "34")
# plane pairs whose rotations generate A(t1) (x) A(t2)
AXIS_PLANES = {frozenset(("14", "23")): "Z", frozenset(("12", "34")): "X", frozenset(("13", "24")): "Y"}


@dataclass(frozen=True)
class CanonicalGate:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = float(getattr(self, name))
            if not 0 <= value < np.pi:
                raise InputError(f"{name} = {value} lies outside [0, pi)")
            object.__setattr__(self, name, value)

    @property
    def matrix(self) -> np.ndarray:
        generator = self.alpha * kron(X, X) + self.beta * kron(Y, Y) + self.gamma * kron(Z, Z)
        return scipy.linalg.expm(0.5j * generator)

    @property
    def phases(self) -> np.ndarray:
        """theta with Q^dagger W Q = diag(exp(i theta / 2))."""
        a, b, c = self.alpha, self.beta, self.gamma
        return np.array([a - b + c, a + b - c, -a - b - c, -a + b + c])

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma}


def magic_transform(k) -> np.ndarray:
    k = np.asarray(k, dtype=complex)
    if k.shape != (4, 4) or not is_unitary(k):
        raise InputError("magic_transform needs a 4x4 unitary")
    return MAGIC.conj().T @ k @ MAGIC


def plane_rotation(plane: str, theta: float) -> np.ndarray:
    p, q = int(plane[0]) - 1, int(plane[1]) - 1
    r = np.eye(4)
    r[p, p] = r[q, q] = np.cos(theta)
    r[p, q] = -np.sin(theta)
    r[q, p] = np.sin(theta)
    return r


def plane_gate(plane: str, theta: float) -> np.ndarray:
    """The local gate Q R_plane(theta) Q^dagger."""
    return MAGIC @ plane_rotation(plane, theta) @ MAGIC.conj().T


def signed_permutations(special: bool = True) -> List[np.ndarray]:
    """All 4x4 signed permutation matrices, restricted to det +1 when ``special``."""
    matrices = []
    for perm in itertools.permutations(range(4)):
        for signs in itertools.product((1, -1), repeat=4):
            t = np.zeros((4, 4))
            t[range(4), perm] = signs
            if not special or np.linalg.det(t) > 0:
                matrices.append(t)
    return matrices


def _circular_distance(a: float, b: float) -> float:
    d = abs(a - b) % np.pi
    return min(d, np.pi - d)


@dataclass(frozen=True)
class PhaseClass:
    eta: float
    support: np.ndarray

    @property
    def entries(self) -> List[Tuple[int, int]]:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self.support))]

    def admits_permutation(self) -> bool:
        return any(all(self.support[i, perm[i]] for i in range(4)) for perm in itertools.permutations(range(4)))

    def holds(self, o: np.ndarray, tol: float = 1e-9) -> bool:
        return bool(np.all(np.abs(o[self.support == 0]) <= tol))


@dataclass(frozen=True)
class PhaseFilter:
    gate: CanonicalGate
    matrix: np.ndarray
    classes: Tuple[PhaseClass, ...]
    near_merges: Tuple[Tuple[float, float], ...] = ()

    def reconstruct(self) -> np.ndarray:
        return sum(np.exp(2j * c.eta) * c.support for c in self.classes)

    def to_dict(self) -> dict:
        return {
            "classes": [{"eta": c.eta, "support": c.support.astype(int).tolist()} for c in self.classes],
            "near_merges": [list(pair) for pair in self.near_merges],
        }


def filter_matrix(gate: CanonicalGate, tol: float = 1e-9) -> PhaseFilter:
    theta = gate.phases
    f = np.exp(1j * (theta[:, None] - theta[None, :]))
    # the diagonal goes first so that eta = 0 is always the first class and exactly zero
    cells = [(i, i) for i in range(4)] + [(i, j) for i in range(4) for j in range(4) if i != j]
    reps: List[float] = []
    supports: List[np.ndarray] = []
    near = []
    for i, j in cells:
        eta = float(np.mod((theta[i] - theta[j]) / 2, np.pi))
        for index, rep in enumerate(reps):
            distance = _circular_distance(eta, rep)
            if distance < tol:
                if distance > 1e-12:
                    near.append((rep, eta))
                supports[index][i, j] = 1
                break
        else:
            reps.append(eta)
            support = np.zeros((4, 4), dtype=int)
            support[i, j] = 1
            supports.append(support)
    if near:
        logger.warning("merged %d nearly coincident phases within %.1e", len(near), tol)
    order = np.argsort(reps, kind="stable")
    classes = tuple(PhaseClass(reps[k], supports[k]) for k in order)
    return PhaseFilter(gate, f, classes, tuple(near))


def _real_orthogonal(k: np.ndarray, tol: float = 1e-9) -> Optional[np.ndarray]:
    """Q^dagger k Q with its global phase removed, or None if it is not real orthogonal."""
    o = magic_transform(k)
    pivot = o.flat[np.argmax(np.abs(o))]
    o = o / (pivot / abs(pivot))
    if np.max(np.abs(o.imag)) > tol:
        return None
    return o.real


@dataclass(frozen=True)
class ClassShift:
    eta: float
    gate: np.ndarray
    label: str

    def to_dict(self) -> dict:
        return {"eta": self.eta, "shift": self.label}


def class_shift(phase_class: PhaseClass, tol: float = 1e-9) -> Optional[ClassShift]:
    """One member of the class, preferring a Pauli pair over a general signed permutation."""
    if not phase_class.admits_permutation():
        return None
    for (i, a), (j, b) in itertools.product(enumerate(PAULIS), repeat=2):
        k = kron(a, b)
        o = _real_orthogonal(k, tol)
        if o is not None and phase_class.holds(o, tol):
            return ClassShift(phase_class.eta, k, f"{PAULI_LABELS[i]}⊗{PAULI_LABELS[j]}")
    # no Pauli pair fits, so the representative is labelled by its signed permutation
    for t in signed_permutations():
        if phase_class.holds(t, tol):
            return ClassShift(phase_class.eta, MAGIC @ t @ MAGIC.conj().T, "T")
    return None


def _blocks(support: np.ndarray) -> Tuple[Tuple[int, ...], ...]:
    blocks = []
    for row in support:
        block = tuple(int(j) for j in np.nonzero(row)[0])
        if block not in blocks:
            blocks.append(block)
    return tuple(blocks)


@dataclass(frozen=True)
class LocalFamily:
    """
    Members are  L_plane(t_1) ... L_plane(t_n) L0(i) S  for the family's planes and shift S, so the eta = 0 family has
    S = I and every other solvable class is that group times its shift.
    """

    gate: CanonicalGate
    eta: float
    planes: Tuple[str, ...]
    support: np.ndarray
    shift: ClassShift
    template: str = ""

    @property
    def n_parameters(self) -> int:
        return len(self.planes)

    def member(self, thetas: Sequence[float], reflection: int = 0) -> np.ndarray:
        if len(thetas) != len(self.planes):
            raise InputError(f"family needs {len(self.planes)} angles, got {len(thetas)}")
        u = np.eye(4, dtype=complex)
        for plane, theta in zip(self.planes, thetas):
            u = u @ plane_gate(plane, theta)
        return u @ DIAGONAL_REFLECTIONS[reflection] @ self.shift.gate

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        thetas = rng.uniform(0, 2 * np.pi, size=len(self.planes))
        return self.member(thetas, int(rng.integers(0, 4)))

    def contains(self, u, tol: float = 1e-9) -> bool:
        u = np.asarray(u, dtype=complex)
        if u.shape != (4, 4) or not is_unitary(u, tol) or operator_schmidt_rank(u, tol) != 1:
            return False
        o = _real_orthogonal(u, tol)
        return o is not None and bool(np.all(np.abs(o[self.support == 0]) <= tol))

    def to_dict(self) -> dict:
        return {
            "eta": self.eta,
            "planes": list(self.planes),
            "shift": self.shift.label,
            "template": self.template,
        }


@dataclass
class CrossingSolution:
    gate: CanonicalGate
    phase_filter: PhaseFilter
    families: List[LocalFamily] = field(default_factory=list)
    unsolved: List[float] = field(default_factory=list)
    template: str = ""

    def contains(self, u, tol: float = 1e-9) -> bool:
        return any(family.contains(u, tol) for family in self.families)

    def to_dict(self) -> dict:
        return {
            "gate": self.gate.to_dict(),
            "filter": self.phase_filter.to_dict(),
            "template": self.template,
            "families": [family.to_dict() for family in self.families],
            "unsolved": list(self.unsolved),
        }


def _base_template(planes: Sequence[str], blocks) -> Tuple[str, Optional[str]]:
    if any(len(block) == 4 for block in blocks):
        return "U(2)⊗U(2)", None
    axis = AXIS_PLANES.get(frozenset(planes))
    if axis:
        return f"{axis}(θ1)⊗{axis}(θ2)·L0(i)", axis
    factors = [f"L{plane}(θ{n + 1})" for n, plane in enumerate(planes)]
    return "·".join(factors + ["L0(i)"]), None


def solve_patterns(phase_filter: PhaseFilter, tol: float = 1e-9) -> CrossingSolution:
    gate = phase_filter.gate
    zero = phase_filter.classes[0]
    blocks = _blocks(zero.support)
    planes = tuple(plane for plane in PLANES if any({int(plane[0]) - 1, int(plane[1]) - 1} <= set(b) for b in blocks))
    base, axis = _base_template(planes, blocks)
    solution = CrossingSolution(gate, phase_filter)

    for phase_class in phase_filter.classes:
        shift = class_shift(phase_class, tol)
        if shift is None:
            solution.unsolved.append(phase_class.eta)
            logger.info("no SO(4) matrix fits the class eta = %.6g", phase_class.eta)
            continue
        template = base if shift.label == "I⊗I" else f"{base}·({shift.label})"
        solution.families.append(LocalFamily(gate, phase_class.eta, planes, phase_class.support, shift, template))

    shifted = solution.families[1:]
    if axis and len(shifted) == 1 and shifted[0].shift.label != "T":
        solution.template = f"{axis}(θ1)Σ(i)⊗{axis}(θ2)Σ(j)"
    elif len(solution.families) == 1:
        solution.template = base
    else:
        solution.template = " ∪ ".join(family.template for family in solution.families)
    logger.info("crossing group of %s: %s", gate, solution.template)
    return solution


def solve(gate: CanonicalGate, tol: float = 1e-9) -> CrossingSolution:
    return solve_patterns(filter_matrix(gate, tol), tol)


@dataclass
class Verification:
    passed: int = 0
    failed: int = 0
    failures: List[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"pass": self.passed, "fail": self.failed, "failures": self.failures[:10]}


def crosses(gate: CanonicalGate, u, tol: float = 1e-10) -> bool:
    w = gate.matrix
    return operator_schmidt_rank(w @ u @ w.conj().T, tol) == 1


def verify_family(
    gate: CanonicalGate,
    family: LocalFamily,
    samples: int = 100,
    seed: int = 0,
    tol: float = 1e-10,
) -> Verification:
    rng = np.random.default_rng(seed)
    result = Verification()
    for draw in range(samples):
        u = family.sample(rng)
        if is_unitary(u, tol) and crosses(gate, u, tol):
            result.passed += 1
        else:
            result.failed += 1
            result.failures.append({"draw": draw, "family": family.template})
    logger.debug("family %s on %s: %d pass, %d fail", family.template, gate, result.passed, result.failed)
    return result


def verify_solution(solution: CrossingSolution, samples: int = 100, seed: int = 0) -> Verification:
    total = Verification()
    for offset, family in enumerate(solution.families):
        part = verify_family(solution.gate, family, samples, seed + offset)
        total.passed += part.passed
        total.failed += part.failed
        total.failures.extend(part.failures)
    return total


def completeness_scan(solution: CrossingSolution, points: int = 24) -> List[dict]:
    """
    Every P1 Z(t1) (x) P2 Z(t2) on a grid: crossing W and membership in the returned families must agree. Returns the
    disagreements.
    """
    grid = np.arange(points) * 2 * np.pi / points
    mismatches = []
    for (i, a), (j, b) in itertools.product(enumerate(PAULIS), repeat=2):
        for t1, t2 in itertools.product(grid, repeat=2):
            u = kron(a @ rotation(Z, t1), b @ rotation(Z, t2))
            member = solution.contains(u)
            if member != crosses(solution.gate, u):
                mismatches.append({"paulis": PAULI_LABELS[i] + PAULI_LABELS[j], "t1": t1, "t2": t2, "member": member})
    return mismatches
