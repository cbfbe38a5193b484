"""
The three-local parent Hamiltonian of the honeycomb resource state.

Every local term is stored as Pauli shorthand: ``0122(-1)+3200(2)`` means -(I (x) X) (x) (Y (x) Y) + 2 (Z (x) Y) (x)
(I (x) I). Each four-level site is two virtual qubits; the first digit of a site acts on the more significant one.
"""
import itertools
import logging
import os
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse

from peps_mqc.exceptions import InputError, ResourceCapError, ShorthandError
from peps_mqc.honeycomb import SiteRole
from peps_mqc.network import Boundaries, Layout, contract_layout
from peps_mqc.numerics import PAULIS, hermitian_eig, is_hermitian, kron_all, sparse_low_spectrum

logger = logging.getLogger(__name__)

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

_TOKEN = re.compile(r"^([0-9]+)\((-?[0-9]+)\)$")

CIRCLE_RIGHT_SQUARE = "circle+right-square"
VERTICAL_MID_SQUARE = "vertical-mid-square"

UNIT7 = Layout(
    chains=(("S0.0", "K0.0", "S0.1"), ("S1.0", "K1.0", "S1.1")),
    roles={
        "S0.0": SiteRole.SQUARE_HORIZONTAL,
        "K0.0": SiteRole.CIRCLE,
        "S0.1": SiteRole.SQUARE_HORIZONTAL,
        "S1.0": SiteRole.SQUARE_HORIZONTAL,
        "K1.0": SiteRole.CIRCLE,
        "S1.1": SiteRole.SQUARE_HORIZONTAL,
        "M0.0": SiteRole.SQUARE_VERTICAL_MID,
    },
    mids={"M0.0": ("K0.0", "K1.0")},
    # l_u, u, r_u, m, l_d, d, r_d
    order=("S0.1", "K0.0", "S0.0", "M0.0", "S1.1", "K1.0", "S1.0"),
)

PATCHES = {
    "unit7": UNIT7,
    "vertical3": UNIT7.restricted(("K0.0", "M0.0", "K1.0")),
}

# term name -> (shorthand file, sites in the order of the shorthand digits)
TERMS = {
    "lr_u": ("h_lr", ("S0.1", "K0.0", "S0.0")),
    "lr_d": ("h_lr", ("S1.1", "K1.0", "S1.0")),
    "lum": ("h_lum", ("S0.1", "K0.0", "M0.0")),
    "ldm": ("h_ldm", ("S1.1", "K1.0", "M0.0")),
    "mur": ("h_mur", ("M0.0", "K0.0", "S0.0")),
    "mdr": ("h_mdr", ("M0.0", "K1.0", "S1.0")),
    "umd": ("h_umd", ("K0.0", "M0.0", "K1.0")),
}


@dataclass(frozen=True)
class ShorthandTerm:
    digits: str
    coefficient: int

    def __post_init__(self):
        if len(self.digits) % 2:
            raise ShorthandError(f"{self.digits!r}: two digits per four-level site are needed")
        if any(d not in "0123" for d in self.digits):
            raise ShorthandError(f"{self.digits!r}: Pauli digits run from 0 to 3")
        if self.coefficient == 0:
            raise ShorthandError(f"{self.digits!r}: zero coefficient")

    @property
    def n_sites(self) -> int:
        return len(self.digits) // 2

    def operator(self) -> np.ndarray:
        return self.coefficient * kron_all([PAULIS[int(d)] for d in self.digits])


def parse_shorthand(text: str) -> List[ShorthandTerm]:
    compact = re.sub(r"\s+", "", text).rstrip(".")
    if not compact:
        raise ShorthandError("empty shorthand")
    terms = []
    for token in compact.strip("+").split("+"):
        match = _TOKEN.match(token)
        if not match:
            raise ShorthandError(f"malformed shorthand token {token!r}")
        terms.append(ShorthandTerm(match.group(1), int(match.group(2))))
    return terms


def load_shorthand(name: str, term_dir: str = DATA_DIR) -> List[ShorthandTerm]:
    path = os.path.join(term_dir, f"{name}.txt")
    try:
        with open(path) as handle:
            text = handle.read()
    except OSError as error:
        raise InputError(f"cannot read term file {path}: {error}") from error
    return parse_shorthand(text)


@dataclass(frozen=True)
class LocalTerm:
    name: str
    sites: Tuple[str, ...]
    matrix: np.ndarray
    ordering: Tuple[int, ...] = (0, 1, 2, 3, 4, 5)

    def reordered(self, ordering: Sequence[int]) -> "LocalTerm":
        """The term with virtual qubit p of the patch taken from qubit ordering[p] of the shorthand."""
        ordering = tuple(ordering)
        n = len(ordering)
        tensor = self.matrix.reshape([2] * (2 * n))
        axes = list(ordering) + [n + a for a in ordering]
        matrix = tensor.transpose(axes).reshape(2 ** n, 2 ** n)
        return LocalTerm(self.name, self.sites, matrix, ordering)


def build_term(terms: Sequence[ShorthandTerm], name: str = "", sites: Sequence[str] = ()) -> LocalTerm:
    if not terms:
        raise ShorthandError("a local term needs at least one Pauli string")
    lengths = {len(term.digits) for term in terms}
    if len(lengths) != 1:
        raise ShorthandError(f"{name or 'term'} mixes Pauli strings of lengths {sorted(lengths)}")
    matrix = sum(term.operator() for term in terms)
    if not is_hermitian(matrix, 1e-12):
        raise ShorthandError(f"{name or 'term'} is not Hermitian")
    n_sites = terms[0].n_sites
    return LocalTerm(name, tuple(sites), matrix, tuple(range(2 * n_sites)))


def candidate_orderings(n_sites: int = 3) -> List[Tuple[int, ...]]:
    """Site permutations times swaps of the two virtual qubits of every site; the identity comes first."""
    orderings = []
    for perm in itertools.permutations(range(n_sites)):
        for swaps in itertools.product((0, 1), repeat=n_sites):
            axes = []
            for slot, group in enumerate(perm):
                pair = [2 * group, 2 * group + 1]
                axes.extend(reversed(pair) if swaps[slot] else pair)
            orderings.append(tuple(axes))
    return orderings


@dataclass(frozen=True)
class RegionSupport:
    kind: str
    basis: np.ndarray
    boundary_dim: int

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def injective(self) -> bool:
        return self.rank == self.boundary_dim


def patch_support(layout: Layout, square=None, circle=None) -> np.ndarray:
    """Orthonormal span of the patch's physical vectors over every value of its open virtual legs."""
    tensor = contract_layout(layout, None, square=square, circle=circle)
    vectors = tensor.reshape(4 ** layout.n_sites, -1)
    return scipy.linalg.orth(vectors)


def region_support(kind: str, square=None, circle=None) -> RegionSupport:
    if kind == CIRCLE_RIGHT_SQUARE:
        layout = UNIT7.restricted(("K0.0", "S0.0"))
    elif kind == VERTICAL_MID_SQUARE:
        layout = UNIT7.restricted(("M0.0",))
    else:
        raise InputError(f"unknown region {kind!r}")
    tensor = contract_layout(layout, None, square=square, circle=circle)
    boundary_dim = int(np.prod(tensor.shape[layout.n_sites:]))
    basis = patch_support(layout, square, circle)
    return RegionSupport(kind, basis, boundary_dim)


@dataclass
class TermCheck:
    name: str
    ordering: Tuple[int, ...]
    min_eigenvalue: float
    residual: float
    kernel_dim: int
    support_dim: int
    tolerance: float

    @property
    def psd(self) -> bool:
        return self.min_eigenvalue >= -1e-9

    @property
    def annihilates(self) -> bool:
        return self.residual <= self.tolerance

    @property
    def passed(self) -> bool:
        return self.psd and self.annihilates

    def to_dict(self) -> dict:
        return {
            "term": self.name,
            "ordering": list(self.ordering),
            "psd": self.psd,
            "min_eigenvalue": self.min_eigenvalue,
            "relative_residual": self.residual,
            "annihilation": self.annihilates,
            "kernel_dim": self.kernel_dim,
            "support_dim": self.support_dim,
        }


def _relative_residual(matrix: np.ndarray, support: np.ndarray) -> float:
    scale = np.linalg.norm(matrix, 2)
    if support.shape[1] == 0 or scale == 0:
        return 0.0
    return float(np.linalg.norm(matrix @ support, 2) / scale)


def verify_term(term: LocalTerm, support: np.ndarray, tol: float = 1e-8) -> TermCheck:
    if support.shape[0] != term.matrix.shape[0]:
        raise InputError(
            f"support of dimension {support.shape[0]} does not fit the {term.matrix.shape[0]}-dimensional term"
        )
    values, _ = hermitian_eig(term.matrix, 1e-12)
    kernel_dim = int(np.sum(np.abs(values) <= 1e-9 * max(1.0, abs(values).max())))
    return TermCheck(
        term.name,
        term.ordering,
        float(values[0]),
        _relative_residual(term.matrix, support),
        kernel_dim,
        support.shape[1],
        tol,
    )


def find_ordering(term: LocalTerm, support: np.ndarray, tol: float = 1e-8) -> Optional[LocalTerm]:
    """The first candidate ordering under which ``term`` annihilates ``support``."""
    orderings = candidate_orderings(len(term.sites))
    for ordering in orderings:
        candidate = term.reordered(ordering)
        if _relative_residual(candidate.matrix, support) <= tol:
            if ordering != orderings[0]:
                logger.warning("term %s annihilates its patch only under ordering %s", term.name, ordering)
            return candidate
    return None


def load_terms(term_dir: str = DATA_DIR, layout: Layout = UNIT7, tol: float = 1e-8) -> Dict[str, LocalTerm]:
    """Every local term that fits ``layout``, each in the ordering that annihilates its patch when one exists."""
    terms = {}
    for name, (source, sites) in TERMS.items():
        if not set(sites) <= set(layout.order):
            continue
        term = build_term(load_shorthand(source, term_dir), name, sites)
        support = patch_support(UNIT7.restricted(sites))
        terms[name] = find_ordering(term, support, tol) or term
    if not terms:
        raise InputError("no complete local term fits the patch")
    return terms


def verify_terms(term_dir: str = DATA_DIR, tol: float = 1e-8) -> List[TermCheck]:
    checks = []
    for name, term in load_terms(term_dir, UNIT7, tol).items():
        check = verify_term(term, patch_support(UNIT7.restricted(term.sites)), tol)
        logger.info("term %s: psd=%s annihilation=%s", name, check.psd, check.annihilates)
        checks.append(check)
    return checks


def _placement(positions: Sequence[int], n_qubits: int) -> np.ndarray:
    """Index map taking the natural basis to the order (placed qubits first, then the rest)."""
    placed = list(positions)
    order = placed + [q for q in range(n_qubits) if q not in placed]
    indices = np.arange(2 ** n_qubits)
    bits = (indices[:, None] >> (n_qubits - 1 - np.arange(n_qubits))) & 1
    return (bits[:, order] << (n_qubits - 1 - np.arange(n_qubits))).sum(axis=1)


def assemble(layout: Layout, terms: Dict[str, LocalTerm], max_dim: int = 4 ** 7) -> scipy.sparse.csr_matrix:
    dim = 4 ** layout.n_sites
    if dim > max_dim:
        raise ResourceCapError(f"patch dimension {dim} exceeds the cap of {max_dim}")
    n_qubits = 2 * layout.n_sites
    total = scipy.sparse.csr_matrix((dim, dim), dtype=complex)
    for name, term in terms.items():
        positions = []
        for site in term.sites:
            p = layout.order.index(site)
            positions.extend([2 * p, 2 * p + 1])
        rest = 2 ** (n_qubits - len(positions))
        placed = scipy.sparse.kron(
            scipy.sparse.csr_matrix(term.matrix), scipy.sparse.identity(rest, dtype=complex), format="csr"
        )
        index = _placement(positions, n_qubits)
        total = total + placed[index, :][:, index]
        logger.debug("placed term %s on sites %s", name, term.sites)
    return total.tocsr()


@dataclass
class SpectrumReport:
    patch: str
    dim: int
    eigenvalues: List[float]
    residual: float
    ground_weight: float
    scale: float = 1.0
    terms: List[str] = field(default_factory=list)

    @property
    def gap(self) -> float:
        return self.eigenvalues[1] - self.eigenvalues[0]

    def ground_state_zero(self, tol: float = 1e-8) -> bool:
        """lambda_0 and |H psi| both vanish relative to the operator scale."""
        bound = tol * max(1.0, self.scale)
        return abs(self.eigenvalues[0]) <= bound and self.residual <= bound

    def to_dict(self) -> dict:
        return {
            "patch": self.patch,
            "dim": self.dim,
            "terms": self.terms,
            "eigenvalues": self.eigenvalues,
            "gap": self.gap,
            "peps_residual": self.residual,
            "ground_weight": self.ground_weight,
            "scale": self.scale,
        }


def patch_state(layout: Layout, boundaries: Boundaries = None) -> np.ndarray:
    tensor = contract_layout(layout, boundaries or Boundaries(), max_dim=4 ** layout.n_sites)
    vector = tensor.reshape(-1)
    norm = np.linalg.norm(vector)
    if norm == 0:
        raise InputError("the boundary vectors give a zero patch state")
    return vector / norm


def assemble_and_diagonalize(
    patch: str = "unit7",
    term_dir: str = DATA_DIR,
    boundaries: Boundaries = None,
    max_dim: int = 4 ** 7,
    tol: float = 1e-8,
    max_iterations: int = 10000,
) -> SpectrumReport:
    if patch not in PATCHES:
        raise InputError(f"unknown patch {patch!r}; choose from {sorted(PATCHES)}")
    layout = PATCHES[patch]
    if 4 ** layout.n_sites > max_dim:
        raise ResourceCapError(f"patch {patch} exceeds the dimension cap of {max_dim}")
    terms = load_terms(term_dir, layout, tol)
    h = assemble(layout, terms, max_dim)
    values, vectors = sparse_low_spectrum(h, k=2, tol=tol, max_iterations=max_iterations, return_vectors=True)
    state = patch_state(layout, boundaries)
    residual = float(np.linalg.norm(h @ state))
    ground = vectors[:, np.abs(values - values[0]) <= 1e-6]
    weight = float(np.sum(np.abs(ground.conj().T @ state) ** 2))
    logger.info("patch %s: lowest eigenvalues %s, |H psi| = %.3e", patch, values, residual)
    scale = float(abs(h).sum(axis=1).max())
    return SpectrumReport(patch, h.shape[0], [float(v) for v in values], residual, weight, scale, sorted(terms))
