"""
Compiles logical circuits into adaptive measurement patterns on the honeycomb lattice.

Layout: wire w is lattice row w. Column c of a wire holds a horizontal square followed by a circle, and the
correlation state runs from column 0 (next to the right boundary) towards the readout square. A vertical edge with
its mid square joins the circles of wires w and w + 1 in column c exactly when w + c is even, so every circle owns
one vertical leg. Legs without a partner sit on the lattice border.
"""
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from peps_mqc.circuit import CZ_GATE, SKIP, SU2, CircuitIR, circuit_from_dict, circuit_to_dict
from peps_mqc.correlation import MatrixList, MeasurementBasis, gate_basis
from peps_mqc.exceptions import InputError, SchemaError
from peps_mqc.frames import PauliFrame, pauli_matrix
from peps_mqc.honeycomb import (
    CZ_BASIS,
    MODEL,
    REMOVAL_BASIS,
    SiteRole,
    boundary_circle_list,
    cz_byproduct,
    hadamard_basis,
    removal_lists,
)
from peps_mqc.numerics import I2, PAULI_LABELS, from_pairs, to_pairs

logger = logging.getLogger(__name__)

SCHEMA = "peps-mqc/1"


class SiteKind(Enum):
    GATE = "gate"
    CZ_MID = "cz-mid"
    CZ_CIRCLE = "cz-circle"
    REMOVAL_MID = "removal-mid"
    READOUT = "readout"


class ListSource(Enum):
    SQUARE = "square"
    BORDER = "border"
    REMOVAL = "removal"
    CIRCLE = "circle"


@dataclass(frozen=True)
class PatternSite:
    name: str
    role: SiteRole
    kind: SiteKind
    wire: int
    column: int
    target: Optional[np.ndarray] = None
    source: Optional[ListSource] = None
    mid: str = ""
    side: str = ""
    gate_label: str = ""

    @property
    def measured(self) -> bool:
        return self.kind is not SiteKind.READOUT


@dataclass(frozen=True)
class MeasurementPattern:
    circuit: CircuitIR
    n_columns: int
    sites: Tuple[PatternSite, ...]

    @property
    def n_wires(self) -> int:
        return self.circuit.n_wires

    @property
    def measured_sites(self) -> Tuple[PatternSite, ...]:
        return tuple(site for site in self.sites if site.measured)

    @property
    def readout_sites(self) -> Tuple[PatternSite, ...]:
        return tuple(site for site in self.sites if not site.measured)

    def site(self, name: str) -> PatternSite:
        for site in self.sites:
            if site.name == name:
                return site
        raise KeyError(name)

    def gate_sites(self) -> Tuple[PatternSite, ...]:
        """Squares that carry a gate of the circuit (the rest only compensate the frame)."""
        return tuple(
            site
            for site in self.sites
            if site.role is SiteRole.SQUARE_HORIZONTAL and site.gate_label
        )

    def edges(self, column: int) -> List[int]:
        return edges_in_column(column, self.n_wires)


@dataclass(frozen=True)
class PatternState:
    """Everything the classical controller knows mid-run: the frame and the outcomes seen so far."""

    frame: PauliFrame
    outcomes: Dict[str, int] = field(default_factory=dict)

    @classmethod
    def start(cls, n_wires: int) -> "PatternState":
        return cls(PauliFrame.identity(n_wires))


@dataclass(frozen=True)
class SiteOutcome:
    wire: int
    outcome: int


@dataclass(frozen=True)
class CzOutcome:
    upper_wire: int
    d: int
    m: int
    u: int


def edges_in_column(column: int, n_wires: int) -> List[int]:
    """Upper wires of the vertical edges present in ``column``."""
    return [wire for wire in range(n_wires - 1) if (wire + column) % 2 == 0]


def square_name(wire: int, column: int) -> str:
    return f"S{wire}.{column}"


def circle_name(wire: int, column: int) -> str:
    return f"K{wire}.{column}"


def mid_name(wire: int, column: int) -> str:
    return f"M{wire}.{column}"


def readout_name(wire: int) -> str:
    return f"R{wire}"


def advance_frame(frame: PauliFrame, event) -> PauliFrame:
    """
    Frame update for one event. A single-site outcome k leaves Sigma(k) on its wire, because the site was measured
    for target * (current Pauli). A completed vertical gate pushes the frame through CZ and then applies the
    outcome-dependent Pauli pair.
    """
    if isinstance(event, SiteOutcome):
        if event.outcome not in range(4):
            raise InputError(f"illegal outcome {event.outcome}")
        return frame.with_label(event.wire, PAULI_LABELS[event.outcome])
    if isinstance(event, CzOutcome):
        for outcome in (event.d, event.m, event.u):
            if outcome not in range(4):
                raise InputError(f"illegal outcome {outcome}")
        pushed = frame.push_through_cz(event.upper_wire)
        byproduct = cz_byproduct(event.d, event.m, event.u)
        return pushed.compose(byproduct, (event.upper_wire, event.upper_wire + 1))
    raise InputError(f"unknown event {event!r}")


def matrix_list_for(site: PatternSite, state: PatternState) -> MatrixList:
    if site.source is ListSource.SQUARE:
        return MODEL.square
    if site.source is ListSource.BORDER:
        return boundary_circle_list()
    if site.source is ListSource.REMOVAL:
        upper, lower = removal_lists(state.outcomes[site.mid])
        return upper if site.side == "up" else lower
    raise InputError(f"site {site.name} has no free matrix list")


def basis_for(site: PatternSite, state: PatternState) -> MeasurementBasis:
    """The basis selector: depends on the current frame and, for circles next to a removed edge, on the mid outcome."""
    if site.kind is SiteKind.GATE:
        label = state.frame.labels[site.wire]
        target = site.target @ pauli_matrix(label)
        return gate_basis(matrix_list_for(site, state), target, label=f"{site.name}/{label}")
    if site.kind is SiteKind.CZ_MID:
        return hadamard_basis()
    if site.kind is SiteKind.CZ_CIRCLE:
        return CZ_BASIS
    if site.kind is SiteKind.REMOVAL_MID:
        return REMOVAL_BASIS
    raise InputError(f"site {site.name} is not measured in a four-outcome basis")


def advance(site: PatternSite, state: PatternState, outcome: int) -> PatternState:
    if outcome not in range(4):
        raise InputError(f"illegal outcome {outcome} at {site.name}")
    outcomes = {**state.outcomes, site.name: outcome}
    frame = state.frame
    if site.kind is SiteKind.GATE:
        frame = advance_frame(frame, SiteOutcome(site.wire, outcome))
    elif site.kind is SiteKind.CZ_CIRCLE and site.side == "down":
        column = site.column
        upper = circle_name(site.wire - 1, column)
        event = CzOutcome(site.wire - 1, outcome, outcomes[site.mid], outcomes[upper])
        frame = advance_frame(frame, event)
    return PatternState(frame, outcomes)


def _schedule(circuit: CircuitIR):
    """Greedy column packing. Returns (square targets, CZ edges, column count)."""
    last = [(-1, 1)] * circuit.n_wires
    squares: Dict[Tuple[int, int], Tuple[np.ndarray, str]] = {}
    cz_edges = set()
    for gate in circuit.gates:
        if gate.kind in (SU2, SKIP):
            wire = gate.wires[0]
            column = last[wire][0] + 1
            if gate.kind == SU2:
                squares[(wire, column)] = (gate.matrix, gate.label or SU2)
            else:
                squares[(wire, column)] = (I2, "")
            last[wire] = (column, 0)
        elif gate.kind == CZ_GATE:
            upper, lower = gate.wires
            column = max(
                col if slot == 0 else col + 1 for col, slot in (last[upper], last[lower])
            )
            if (upper + column) % 2:
                column += 1
            cz_edges.add((upper, column))
            last[upper] = last[lower] = (column, 1)
    n_columns = max(1, max(col for col, _ in last) + 1)
    return squares, cz_edges, n_columns


def compile(circuit: CircuitIR) -> MeasurementPattern:
    squares, cz_edges, n_columns = _schedule(circuit)
    n_wires = circuit.n_wires
    sites: List[PatternSite] = []
    for column in range(n_columns):
        for wire in range(n_wires):
            target, label = squares.get((wire, column), (I2, ""))
            sites.append(
                PatternSite(
                    square_name(wire, column),
                    SiteRole.SQUARE_HORIZONTAL,
                    SiteKind.GATE,
                    wire,
                    column,
                    target=target,
                    source=ListSource.SQUARE,
                    gate_label=label,
                )
            )
        paired = set()
        for wire in edges_in_column(column, n_wires):
            mid = mid_name(wire, column)
            paired.update((wire, wire + 1))
            if (wire, column) in cz_edges:
                sites.append(PatternSite(mid, SiteRole.SQUARE_VERTICAL_MID, SiteKind.CZ_MID, wire, column))
                for side, circle_wire in (("up", wire), ("down", wire + 1)):
                    sites.append(
                        PatternSite(
                            circle_name(circle_wire, column),
                            SiteRole.CIRCLE,
                            SiteKind.CZ_CIRCLE,
                            circle_wire,
                            column,
                            source=ListSource.CIRCLE,
                            mid=mid,
                            side=side,
                        )
                    )
            else:
                sites.append(
                    PatternSite(mid, SiteRole.SQUARE_VERTICAL_MID, SiteKind.REMOVAL_MID, wire, column)
                )
                for side, circle_wire in (("up", wire), ("down", wire + 1)):
                    sites.append(
                        PatternSite(
                            circle_name(circle_wire, column),
                            SiteRole.CIRCLE,
                            SiteKind.GATE,
                            circle_wire,
                            column,
                            target=I2,
                            source=ListSource.REMOVAL,
                            mid=mid,
                            side=side,
                        )
                    )
        for wire in range(n_wires):
            if wire not in paired:
                sites.append(
                    PatternSite(
                        circle_name(wire, column),
                        SiteRole.CIRCLE,
                        SiteKind.GATE,
                        wire,
                        column,
                        target=I2,
                        source=ListSource.BORDER,
                    )
                )
    for wire in range(n_wires):
        sites.append(
            PatternSite(readout_name(wire), SiteRole.READOUT_SQUARE, SiteKind.READOUT, wire, n_columns)
        )
    for site in sites:
        # every basis the selector can hand out is built and validated here, not at measurement time
        if site.kind is SiteKind.GATE:
            _basis_table(site)
    pattern = MeasurementPattern(circuit, n_columns, tuple(sites))
    logger.info(
        "compiled %d gates on %d wires into %d sites over %d columns (%d vertical gates)",
        len(circuit.gates),
        n_wires,
        len(sites),
        n_columns,
        len(cz_edges),
    )
    return pattern


def _site_to_dict(site: PatternSite) -> dict:
    record = {
        "name": site.name,
        "role": site.role.value,
        "kind": site.kind.value,
        "wire": site.wire,
        "column": site.column,
    }
    if site.target is not None:
        record["target"] = to_pairs(site.target)
    if site.source is not None:
        record["source"] = site.source.value
    if site.gate_label:
        record["gate"] = site.gate_label
    if site.mid:
        record["mid"] = site.mid
        record["side"] = site.side
    record["bases"] = _basis_table(site)
    record["frame_rule"] = _frame_rule(site)
    return record


def _basis_table(site: PatternSite) -> dict:
    """Outcome-indexed bases keyed by what the selector looks at."""
    if site.kind is SiteKind.READOUT:
        return {}
    if site.kind is not SiteKind.GATE:
        return {"*": to_pairs(basis_for(site, PatternState.start(site.wire + 2)).vectors)}
    table = {}
    mid_outcomes = range(4) if site.source is ListSource.REMOVAL else [None]
    for label in PAULI_LABELS:
        for mid_outcome in mid_outcomes:
            labels = ["I"] * (site.wire + 1)
            labels[site.wire] = label
            outcomes = {} if mid_outcome is None else {site.mid: mid_outcome}
            state = PatternState(PauliFrame(tuple(labels)), outcomes)
            key = label if mid_outcome is None else f"{label}|{site.mid}={mid_outcome}"
            table[key] = to_pairs(basis_for(site, state).vectors)
    return table


def _frame_rule(site: PatternSite) -> str:
    if site.kind is SiteKind.GATE:
        return f"wire {site.wire} <- Sigma(outcome)"
    if site.kind is SiteKind.CZ_CIRCLE and site.side == "down":
        return f"push frame through CZ on wires {site.wire - 1},{site.wire}; then apply cz_byproduct(d, m, u)"
    return "none"


def pattern_to_dict(pattern: MeasurementPattern) -> dict:
    return {
        "schema": SCHEMA,
        "circuit": circuit_to_dict(pattern.circuit),
        "wires": pattern.n_wires,
        "columns": pattern.n_columns,
        "sites": [_site_to_dict(site) for site in pattern.sites],
    }


def pattern_from_dict(data: dict) -> MeasurementPattern:
    if not isinstance(data, dict) or data.get("schema") != SCHEMA:
        raise SchemaError(f"pattern must carry schema {SCHEMA!r}")
    try:
        circuit = circuit_from_dict(data["circuit"])
        sites = tuple(
            PatternSite(
                record["name"],
                SiteRole(record["role"]),
                SiteKind(record["kind"]),
                int(record["wire"]),
                int(record["column"]),
                target=from_pairs(record["target"]) if "target" in record else None,
                source=ListSource(record["source"]) if "source" in record else None,
                mid=record.get("mid", ""),
                side=record.get("side", ""),
                gate_label=record.get("gate", ""),
            )
            for record in data["sites"]
        )
        return MeasurementPattern(circuit, int(data["columns"]), sites)
    except (KeyError, TypeError, ValueError) as error:
        raise SchemaError(f"malformed pattern: {error}") from error


def load_pattern(text: str) -> MeasurementPattern:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as error:
        raise SchemaError(f"pattern is not valid JSON: {error}") from error
    return pattern_from_dict(data)
