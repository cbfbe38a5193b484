"""
Runs measurement patterns in correlation space: every outcome branch is turned into the operator the measured
tensors leave behind, and checked against the tracked frame and the intended circuit.
"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from peps_mqc.circuit import circuit_distribution, circuit_unitary, input_state
from peps_mqc.compiler import (
    MeasurementPattern,
    PatternState,
    advance,
    basis_for,
    circle_name,
    edges_in_column,
    mid_name,
    square_name,
)
from peps_mqc.correlation import project_site, vertical_contract
from peps_mqc.exceptions import InputError, ResourceCapError, VerificationError
from peps_mqc.frames import PauliFrame
from peps_mqc.honeycomb import MODEL, boundary_circle_list, readout_distribution, readout_map
from peps_mqc.numerics import embed, kron_all, scale_distance

logger = logging.getLogger(__name__)

ENUMERATE = "enumerate"
SAMPLE = "sample"


@dataclass(frozen=True)
class Branch:
    outcomes: Tuple[int, ...]
    vectors: Dict[str, np.ndarray]
    frame: PauliFrame
    operator: np.ndarray
    weight: float
    logical_distance: float
    raw_readout: np.ndarray
    readout: np.ndarray
    probability: Optional[float] = None
    bits: Optional[Tuple[int, ...]] = None

    def to_dict(self) -> dict:
        record = {
            "outcomes": list(self.outcomes),
            "frame": self.frame.to_dict(),
            "weight": self.weight,
            "logical_distance": self.logical_distance,
            "readout": [float(p) for p in self.readout],
        }
        if self.probability is not None:
            record["probability"] = self.probability
        if self.bits is not None:
            record["bits"] = list(self.bits)
        return record


@dataclass(frozen=True)
class SimulationResult:
    mode: str
    branches: List[Branch]
    intended: np.ndarray
    marginal: Optional[np.ndarray]
    tolerance: float

    @property
    def sound(self) -> bool:
        """Every branch realizes frame x intended circuit, and reads out the intended statistics once corrected."""
        return all(
            branch.logical_distance <= self.tolerance
            and np.allclose(branch.readout, self.intended, atol=self.tolerance)
            for branch in self.branches
        )

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "branch_count": len(self.branches),
            "sound": self.sound,
            "intended": [float(p) for p in self.intended],
            "marginal": None if self.marginal is None else [float(p) for p in self.marginal],
            "branches": [branch.to_dict() for branch in self.branches],
        }


def flip_mask(frame: PauliFrame) -> int:
    """Bit string of the wires whose Z readout the frame inverts, wire 0 most significant."""
    n_wires = frame.n_wires
    return sum(1 << (n_wires - 1 - wire) for wire, flip in enumerate(frame.flips()) if flip)


def correct_readout(raw: np.ndarray, frame: PauliFrame) -> np.ndarray:
    mask = flip_mask(frame)
    corrected = np.zeros_like(raw)
    for bits, probability in enumerate(raw):
        corrected[bits ^ mask] = probability
    return corrected


def branch_operator(pattern: MeasurementPattern, vectors: Dict[str, np.ndarray]) -> np.ndarray:
    """The correlation-space operator left by the chosen measurement vectors, column by column."""
    n_wires = pattern.n_wires
    border = boundary_circle_list()
    operator = np.eye(2 ** n_wires, dtype=complex)
    for column in range(pattern.n_columns):
        squares = kron_all(
            [project_site(MODEL.square, vectors[square_name(wire, column)]) for wire in range(n_wires)]
        )
        circles = np.eye(2 ** n_wires, dtype=complex)
        paired = set()
        for wire in edges_in_column(column, n_wires):
            paired.update((wire, wire + 1))
            mid = project_site(MODEL.square, vectors[mid_name(wire, column)])
            block = vertical_contract(
                MODEL.circle.fold_vertical(mid),
                MODEL.circle,
                vectors[circle_name(wire, column)],
                vectors[circle_name(wire + 1, column)],
            )
            circles = embed(block, wire, n_wires) @ circles
        for wire in range(n_wires):
            if wire not in paired:
                single = project_site(border, vectors[circle_name(wire, column)])
                circles = embed(single, wire, n_wires) @ circles
        operator = circles @ squares @ operator
    return operator


def walk(pattern: MeasurementPattern, outcomes: Sequence[int]) -> Tuple[PatternState, Dict[str, np.ndarray]]:
    """Feeds one outcome per measured site through the adaptive basis selectors."""
    measured = pattern.measured_sites
    if len(outcomes) != len(measured):
        raise InputError(f"expected {len(measured)} outcomes, got {len(outcomes)}")
    state = PatternState.start(pattern.n_wires)
    vectors = {}
    for site, outcome in zip(measured, outcomes):
        vectors[site.name] = basis_for(site, state)[outcome]
        state = advance(site, state, outcome)
    return state, vectors


def evaluate_branch(
    pattern: MeasurementPattern,
    outcomes: Sequence[int],
    boundary: np.ndarray = None,
    intended: np.ndarray = None,
) -> Branch:
    if boundary is None:
        boundary = input_state(pattern.circuit)
    if intended is None:
        intended = circuit_unitary(pattern.circuit)
    state, vectors = walk(pattern, outcomes)
    operator = branch_operator(pattern, vectors)
    frame = state.frame
    logical_distance = scale_distance(frame.matrix().conj().T @ operator, intended)

    correlation_state = operator @ boundary
    readout = readout_map()
    physical = kron_all([readout.matrix] * pattern.n_wires) @ correlation_state
    raw = readout_distribution(physical, pattern.n_wires)
    return Branch(
        outcomes=tuple(int(o) for o in outcomes),
        vectors=vectors,
        frame=frame,
        operator=operator,
        weight=float(np.vdot(correlation_state, correlation_state).real),
        logical_distance=logical_distance,
        raw_readout=raw,
        readout=correct_readout(raw, frame),
    )


def simulate_pattern(
    pattern: MeasurementPattern,
    mode: str = ENUMERATE,
    samples: int = 1,
    seed: int = 0,
    max_branches: int = 4 ** 10,
    threads: int = 1,
    tolerance: float = 1e-9,
) -> SimulationResult:
    n_measured = len(pattern.measured_sites)
    boundary = input_state(pattern.circuit)
    intended_unitary = circuit_unitary(pattern.circuit)
    intended = circuit_distribution(pattern.circuit)

    def run(outcomes):
        return evaluate_branch(pattern, outcomes, boundary, intended_unitary)

    if mode == ENUMERATE:
        if 4 ** n_measured > max_branches:
            raise ResourceCapError(
                f"{4 ** n_measured} branches exceed the cap of {max_branches}; use sampling"
            )
        all_outcomes = list(itertools.product(range(4), repeat=n_measured))
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                branches = list(pool.map(run, all_outcomes))
        else:
            branches = [run(outcomes) for outcomes in all_outcomes]
        total = sum(branch.weight for branch in branches)
        branches = [replace(branch, probability=branch.weight / total) for branch in branches]
        marginal = sum(branch.probability * branch.readout for branch in branches)
    elif mode == SAMPLE:
        rng = np.random.default_rng(seed)
        branches = []
        for _ in range(samples):
            # drawing sites uniformly needs every branch to carry the same weight
            branch = run(tuple(rng.integers(0, 4, size=n_measured)))
            if branches and not np.isclose(branch.weight, branches[0].weight, rtol=1e-9, atol=0):
                raise VerificationError(
                    f"branch {branch.outcomes} has weight {branch.weight:.6e}, "
                    f"branch {branches[0].outcomes} has {branches[0].weight:.6e}; uniform sampling is biased"
                )
            raw_bits = int(rng.choice(len(branch.raw_readout), p=branch.raw_readout))
            corrected = raw_bits ^ flip_mask(branch.frame)
            bits = tuple((corrected >> (pattern.n_wires - 1 - wire)) & 1 for wire in range(pattern.n_wires))
            branches.append(replace(branch, bits=bits))
        marginal = None
    else:
        raise InputError(f"unknown simulation mode {mode!r}")

    result = SimulationResult(mode, branches, intended, marginal, tolerance)
    logger.info("simulated %d branches in %s mode, sound=%s", len(branches), mode, result.sound)
    return result
