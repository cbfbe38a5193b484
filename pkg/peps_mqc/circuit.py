"""Logical circuits: the intermediate representation, its JSON codec and a plain circuit-model simulator."""
import json
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from peps_mqc.exceptions import InputError, SchemaError
from peps_mqc.numerics import (
    CZ,
    H,
    I2,
    KET_0,
    KET_1,
    KET_MINUS,
    KET_PLUS,
    X,
    Y,
    Z,
    embed,
    from_pairs,
    is_unitary,
    kron_all,
    rotation,
    to_pairs,
)

SU2 = "su2"
CZ_GATE = "cz"
SKIP = "skip"

NAMED_GATES = {
    "i": I2,
    "x": X,
    "y": Y,
    "z": Z,
    "h": H,
    "s": np.diag([1, 1j]),
    "t": np.diag([1, np.exp(1j * np.pi / 4)]),
}
ROTATIONS = {"rx": X, "ry": Y, "rz": Z}
INPUT_STATES = {"0": KET_0, "1": KET_1, "+": KET_PLUS, "-": KET_MINUS}


@dataclass(frozen=True)
class Gate:
    kind: str
    wires: Tuple[int, ...]
    matrix: Optional[np.ndarray] = None
    label: str = ""

    @classmethod
    def su2(cls, wire: int, matrix, label: str = "") -> "Gate":
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (2, 2) or not is_unitary(matrix):
            raise InputError(f"gate {label or '?'} on wire {wire} is not a 2x2 unitary")
        return cls(SU2, (wire,), matrix, label)

    @classmethod
    def named(cls, name: str, wire: int, theta: float = None) -> "Gate":
        name = name.lower()
        if name in ROTATIONS:
            if theta is None:
                raise InputError(f"gate {name} needs an angle")
            return cls.su2(wire, rotation(ROTATIONS[name], theta), f"{name}({theta:g})")
        if name not in NAMED_GATES:
            raise InputError(f"unknown gate {name!r}")
        return cls.su2(wire, NAMED_GATES[name], name)

    @classmethod
    def cz(cls, upper: int, lower: int) -> "Gate":
        upper, lower = sorted((upper, lower))
        return cls(CZ_GATE, (upper, lower), label="cz")

    @classmethod
    def skip(cls, wire: int) -> "Gate":
        return cls(SKIP, (wire,), label="skip")

    def operator(self, n_wires: int) -> np.ndarray:
        if self.kind == SU2:
            return embed(self.matrix, self.wires[0], n_wires)
        if self.kind == CZ_GATE:
            return embed(CZ, self.wires[0], n_wires)
        return np.eye(2 ** n_wires, dtype=complex)


@dataclass(frozen=True)
class CircuitIR:
    n_wires: int
    gates: Tuple[Gate, ...]
    inputs: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.n_wires < 1:
            raise InputError("a circuit needs at least one wire")
        if not self.gates:
            raise InputError("the circuit is empty")
        inputs = tuple(self.inputs) or ("0",) * self.n_wires
        if len(inputs) != self.n_wires or any(s not in INPUT_STATES for s in inputs):
            raise InputError(f"inputs must list one of {sorted(INPUT_STATES)} per wire")
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "inputs", inputs)
        for gate in self.gates:
            if any(not 0 <= wire < self.n_wires for wire in gate.wires):
                raise InputError(f"gate {gate.label} acts outside the {self.n_wires}-wire register")
            if gate.kind == CZ_GATE and gate.wires[1] - gate.wires[0] != 1:
                raise InputError(
                    f"CZ between wires {gate.wires[0]} and {gate.wires[1]}: only neighbouring wires share a vertical edge"
                )


def circuit_unitary(circuit: CircuitIR) -> np.ndarray:
    unitary = np.eye(2 ** circuit.n_wires, dtype=complex)
    for gate in circuit.gates:
        unitary = gate.operator(circuit.n_wires) @ unitary
    return unitary


def input_state(circuit: CircuitIR) -> np.ndarray:
    return kron_all([INPUT_STATES[label].reshape(2, 1) for label in circuit.inputs]).reshape(-1)


def circuit_distribution(circuit: CircuitIR) -> np.ndarray:
    """Z-basis statistics of the intended circuit, wire 0 most significant."""
    return np.abs(circuit_unitary(circuit) @ input_state(circuit)) ** 2


def gate_to_dict(gate: Gate) -> dict:
    if gate.kind == SU2:
        return {
            "type": SU2,
            "wire": gate.wires[0],
            "matrix": to_pairs(gate.matrix),
            "label": gate.label,
        }
    if gate.kind == CZ_GATE:
        return {"type": CZ_GATE, "wires": list(gate.wires)}
    return {"type": SKIP, "wire": gate.wires[0]}


def gate_from_dict(data: dict) -> Gate:
    if not isinstance(data, dict) or "type" not in data:
        raise SchemaError("every gate needs a 'type'")
    kind = str(data["type"]).lower()
    try:
        if kind == SU2:
            if "name" in data:
                return Gate.named(data["name"], int(data["wire"]), data.get("theta"))
            matrix = from_pairs(data["matrix"]).reshape(2, 2)
            return Gate.su2(int(data["wire"]), matrix, data.get("label", ""))
        if kind in ROTATIONS or kind in NAMED_GATES:
            return Gate.named(kind, int(data["wire"]), data.get("theta"))
        if kind == CZ_GATE:
            upper, lower = (int(w) for w in data["wires"])
            return Gate.cz(upper, lower)
        if kind == SKIP:
            return Gate.skip(int(data["wire"]))
    except (KeyError, TypeError, ValueError) as error:
        raise SchemaError(f"malformed {kind} gate: {error}") from error
    raise SchemaError(f"unknown gate type {kind!r}")


def circuit_to_dict(circuit: CircuitIR) -> dict:
    return {
        "wires": circuit.n_wires,
        "inputs": list(circuit.inputs),
        "gates": [gate_to_dict(gate) for gate in circuit.gates],
    }


def circuit_from_dict(data: dict) -> CircuitIR:
    if not isinstance(data, dict) or "wires" not in data or "gates" not in data:
        raise SchemaError("a circuit needs 'wires' and 'gates'")
    if not isinstance(data["gates"], list):
        raise SchemaError("'gates' must be a list")
    try:
        n_wires = int(data["wires"])
    except (TypeError, ValueError) as error:
        raise SchemaError("'wires' must be an integer") from error
    gates: List[Gate] = [gate_from_dict(item) for item in data["gates"]]
    return CircuitIR(n_wires, tuple(gates), tuple(data.get("inputs", ())))


def load_circuit(text: str) -> CircuitIR:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as error:
        raise SchemaError(f"circuit is not valid JSON: {error}") from error
    return circuit_from_dict(data)
