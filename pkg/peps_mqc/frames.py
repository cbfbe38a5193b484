"""Pauli frames: the classical record of the local Pauli by-product accumulated on every logical wire."""
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from peps_mqc.exceptions import InputError
from peps_mqc.numerics import CZ, PAULI_LABELS, PAULIS, identify_pauli, kron_all, unit_phase

_INDEX = {label: index for index, label in enumerate(PAULI_LABELS)}


def pauli_matrix(label: str) -> np.ndarray:
    try:
        return PAULIS[_INDEX[label]]
    except KeyError:
        raise InputError(f"unknown Pauli label {label!r}")


def pauli_product(first: str, second: str) -> Tuple[complex, str]:
    """sigma_first sigma_second = phase sigma_result."""
    (index,), phase = identify_pauli(pauli_matrix(first) @ pauli_matrix(second))
    return unit_phase(phase), PAULI_LABELS[index]


@dataclass(frozen=True)
class PauliFrame:
    """phase * (P_0 (x) P_1 (x) ...), wire 0 first."""

    labels: Tuple[str, ...]
    phase: complex = 1.0

    def __post_init__(self):
        labels = tuple(self.labels)
        for label in labels:
            pauli_matrix(label)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "phase", complex(self.phase))

    @classmethod
    def identity(cls, n_wires: int) -> "PauliFrame":
        return cls(("I",) * n_wires)

    @property
    def n_wires(self) -> int:
        return len(self.labels)

    def matrix(self) -> np.ndarray:
        return self.phase * kron_all([pauli_matrix(label) for label in self.labels])

    def with_label(self, wire: int, label: str) -> "PauliFrame":
        labels = list(self.labels)
        labels[wire] = label
        return PauliFrame(tuple(labels), self.phase)

    def flips(self) -> Tuple[bool, ...]:
        """Wires whose Z readout is inverted by the frame (an X component)."""
        return tuple(label in ("X", "Y") for label in self.labels)

    def compose(self, other: "PauliFrame", wires: Sequence[int]) -> "PauliFrame":
        """other (acting on ``wires``) times self."""
        if len(wires) != other.n_wires:
            raise InputError("frame and wire list differ in length")
        labels = list(self.labels)
        phase = self.phase * other.phase
        for wire, label in zip(wires, other.labels):
            factor, labels[wire] = pauli_product(label, labels[wire])
            phase *= factor
        return PauliFrame(tuple(labels), unit_phase(phase))

    def push_through_cz(self, upper_wire: int) -> "PauliFrame":
        """The frame F' with CZ F = F' CZ for a CZ on (upper_wire, upper_wire + 1)."""
        pair = PauliFrame(self.labels[upper_wire : upper_wire + 2])
        pushed = CZ @ pair.matrix() @ CZ.conj().T
        indices, phase = identify_pauli(pushed)
        labels = list(self.labels)
        labels[upper_wire : upper_wire + 2] = [PAULI_LABELS[i] for i in indices]
        return PauliFrame(tuple(labels), unit_phase(self.phase * phase))

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "phase": [self.phase.real, self.phase.imag]}
