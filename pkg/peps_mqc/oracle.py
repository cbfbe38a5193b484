"""
Physical-space ground truth. The patch behind a compiled pattern is contracted into an explicit state vector,
measured site by site with Born probabilities, and every branch is compared with the correlation-space prediction.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from peps_mqc.circuit import INPUT_STATES, CircuitIR, circuit_distribution
from peps_mqc.compiler import MeasurementPattern, PatternState, advance, basis_for, compile
from peps_mqc.correlation import MeasurementBasis
from peps_mqc.exceptions import InputError, ResourceCapError, ZeroProbabilityError
from peps_mqc.honeycomb import readout_distribution, readout_map
from peps_mqc.network import Boundaries, Layout, contract_layout
from peps_mqc.numerics import as_vector, kron_all
from peps_mqc.simulator import ENUMERATE, correct_readout, simulate_pattern

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PatchState:
    """Dense state on ``sites`` (four levels each, first site most significant)."""

    sites: Tuple[str, ...]
    tensor: np.ndarray
    boundaries: Optional[Boundaries] = None

    @property
    def vector(self) -> np.ndarray:
        return self.tensor.reshape(-1)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def amplitude(self, levels) -> complex:
        return complex(self.tensor[tuple(levels)])

    def index(self, site: str) -> int:
        try:
            return self.sites.index(site)
        except ValueError:
            raise InputError(f"site {site} is not part of the patch")


def build_patch(
    layout: Layout,
    boundaries: Boundaries = None,
    max_sites: int = 10,
    normalize: bool = True,
) -> PatchState:
    if boundaries is None:
        boundaries = Boundaries()
    if layout.n_sites > max_sites:
        raise ResourceCapError(f"{layout.n_sites} sites exceed the oracle cap of {max_sites}")
    tensor = contract_layout(layout, boundaries, max_dim=4 ** max_sites)
    norm = np.linalg.norm(tensor)
    if norm < 1e-14:
        raise InputError("the boundary vectors give a zero state")
    if normalize:
        tensor = tensor / norm
    logger.debug("built a %d-site patch, norm before normalization %.6g", layout.n_sites, norm)
    return PatchState(layout.order, tensor, boundaries)


def boundaries_for(circuit: CircuitIR) -> Boundaries:
    return Boundaries(right=tuple(INPUT_STATES[label] for label in circuit.inputs))


def measure_site(
    state: PatchState,
    site: str,
    basis: MeasurementBasis,
    outcome: int,
    strict: bool = False,
) -> Tuple[float, Optional[PatchState]]:
    """
    Born probability of ``outcome`` and the renormalized state of the remaining sites. A zero-probability outcome gives
    (0.0, None), or raises ZeroProbabilityError when ``strict``.
    """
    axis = state.index(site)
    vector = as_vector(basis[outcome], state.tensor.shape[axis])
    projected = np.tensordot(vector.conj(), state.tensor, axes=([0], [axis]))
    weight = float(np.vdot(projected, projected).real)
    total = state.norm ** 2
    probability = weight / total
    if probability < 1e-24:
        if strict:
            raise ZeroProbabilityError(f"outcome {outcome} at {site} has zero probability")
        return 0.0, None
    remaining = state.sites[:axis] + state.sites[axis + 1:]
    return probability, PatchState(remaining, projected / np.sqrt(weight), state.boundaries)


@dataclass
class BranchCheck:
    outcomes: Tuple[int, ...]
    probability: float
    predicted: float
    fidelity: float
    readout_error: float
    logical_distance: float

    def passed(self, tolerance: float) -> bool:
        return (
            abs(self.probability - self.predicted) <= tolerance
            and abs(1 - self.fidelity) <= tolerance
            and self.readout_error <= tolerance
            and self.logical_distance <= tolerance
        )

    def to_dict(self) -> dict:
        return {
            "outcomes": list(self.outcomes),
            "probability": self.probability,
            "predicted": self.predicted,
            "fidelity": self.fidelity,
            "readout_error": self.readout_error,
            "logical_distance": self.logical_distance,
        }


@dataclass
class ValidationReport:
    pattern: MeasurementPattern
    tolerance: float
    branches: List[BranchCheck] = field(default_factory=list)
    marginal: Optional[np.ndarray] = None
    intended: Optional[np.ndarray] = None

    @property
    def total_probability(self) -> float:
        return float(sum(check.probability for check in self.branches))

    @property
    def failures(self) -> List[BranchCheck]:
        return [check for check in self.branches if not check.passed(self.tolerance)]

    @property
    def marginal_error(self) -> float:
        return float(np.max(np.abs(self.marginal - self.intended)))

    @property
    def passed(self) -> bool:
        return (
            not self.failures
            and abs(self.total_probability - 1) <= self.tolerance
            and self.marginal_error <= self.tolerance
        )

    def to_dict(self) -> dict:
        return {
            "sites": len(self.pattern.sites),
            "measured": len(self.pattern.measured_sites),
            "branches": len(self.branches),
            "failures": [check.to_dict() for check in self.failures],
            "total_probability": self.total_probability,
            "intended": [float(p) for p in self.intended],
            "marginal": [float(p) for p in self.marginal],
            "marginal_error": self.marginal_error,
            "passed": self.passed,
        }


def _fidelity(a: np.ndarray, b: np.ndarray) -> float:
    overlap = np.vdot(a, b)
    return float(abs(overlap) ** 2 / (np.vdot(a, a).real * np.vdot(b, b).real))


def cross_validate(
    circuit: CircuitIR,
    max_sites: int = 10,
    tolerance: float = 1e-9,
    max_branches: int = 4 ** 10,
) -> ValidationReport:
    """
    Walks every outcome branch of the compiled pattern on the explicit patch state and checks it against the
    correlation-space simulator and the circuit model.
    """
    pattern = compile(circuit)
    boundaries = boundaries_for(circuit)
    patch = build_patch(Layout.from_pattern(pattern), boundaries, max_sites=max_sites)
    simulation = simulate_pattern(pattern, ENUMERATE, max_branches=max_branches, tolerance=tolerance)
    predictions: Dict[Tuple[int, ...], object] = {branch.outcomes: branch for branch in simulation.branches}
    intended = circuit_distribution(circuit)
    readout = kron_all([readout_map().matrix] * pattern.n_wires)
    report = ValidationReport(pattern, tolerance, intended=intended, marginal=np.zeros_like(intended))
    measured = pattern.measured_sites

    def descend(depth: int, state: PatchState, control: PatternState, probability: float, outcomes):
        if depth == len(measured):
            branch = predictions[outcomes]
            leaf = state.vector
            corrected = correct_readout(readout_distribution(leaf, pattern.n_wires), control.frame)
            expected_leaf = readout @ branch.operator @ _input_vector(boundaries, pattern.n_wires)
            report.branches.append(
                BranchCheck(
                    outcomes=outcomes,
                    probability=probability,
                    predicted=branch.probability,
                    fidelity=_fidelity(leaf, expected_leaf),
                    readout_error=float(np.max(np.abs(corrected - intended))),
                    logical_distance=branch.logical_distance,
                )
            )
            report.marginal += probability * corrected
            return
        site = measured[depth]
        basis = basis_for(site, control)
        for outcome in range(len(basis)):
            step, post = measure_site(state, site.name, basis, outcome)
            if post is None:
                logger.debug("branch %s cut at %s: outcome %d impossible", outcomes, site.name, outcome)
                continue
            descend(depth + 1, post, advance(site, control, outcome), probability * step, outcomes + (outcome,))

    descend(0, patch, PatternState.start(pattern.n_wires), 1.0, ())
    logger.info(
        "cross-validated %d branches on %d sites: passed=%s", len(report.branches), patch.tensor.ndim, report.passed
    )
    return report


def _input_vector(boundaries: Boundaries, n_wires: int) -> np.ndarray:
    return kron_all([boundaries.right_for(wire).reshape(2, 1) for wire in range(n_wires)]).reshape(-1)
