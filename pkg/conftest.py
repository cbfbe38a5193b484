import json

import numpy as np
import pytest

from config import TestConfig
from peps_mqc.circuit import CircuitIR, Gate, circuit_to_dict
from peps_mqc.compiler import compile


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: exhaustive property checks, deselect with -m \"not slow\"")


@pytest.fixture(scope="session")
def test_config():
    yield TestConfig.validate()


@pytest.fixture
def rng(test_config):
    return np.random.default_rng(test_config.SEED)


@pytest.fixture
def circuit_builder():
    """
    Builds circuits from a compact list: ("h", 0) is a named gate, ("rz", 0, 0.3) a rotation, ("cz", 0, 1) a vertical
    gate and ("skip", 0) an idle column.
    """

    def _builder(n_wires, steps, inputs=()):
        gates = []
        for step in steps:
            name = step[0]
            if name == "cz":
                gates.append(Gate.cz(step[1], step[2]))
            elif name == "skip":
                gates.append(Gate.skip(step[1]))
            else:
                gates.append(Gate.named(name, *step[1:]))
        return CircuitIR(n_wires, tuple(gates), tuple(inputs))

    return _builder


@pytest.fixture
def pattern_builder(circuit_builder):
    def _builder(n_wires, steps, inputs=()):
        return compile(circuit_builder(n_wires, steps, inputs))

    return _builder


@pytest.fixture
def circuit_file(tmp_path, circuit_builder):
    def _writer(n_wires, steps, inputs=(), name="circuit.json"):
        path = tmp_path / name
        path.write_text(json.dumps(circuit_to_dict(circuit_builder(n_wires, steps, inputs))))
        return str(path)

    return _writer
