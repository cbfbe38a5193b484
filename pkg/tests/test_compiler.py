import json

import numpy as np
import pytest

from peps_mqc.circuit import (
    SU2,
    CircuitIR,
    Gate,
    circuit_distribution,
    circuit_from_dict,
    circuit_to_dict,
    circuit_unitary,
    input_state,
    load_circuit,
)
from peps_mqc.compiler import (
    CzOutcome,
    ListSource,
    PatternState,
    SiteKind,
    SiteOutcome,
    advance,
    advance_frame,
    basis_for,
    compile,
    edges_in_column,
    load_pattern,
    matrix_list_for,
    pattern_from_dict,
    pattern_to_dict,
)
from peps_mqc.correlation import project_site
from peps_mqc.exceptions import InputError, SchemaError
from peps_mqc.frames import PauliFrame
from peps_mqc.honeycomb import CZ_BASIS, REMOVAL_BASIS, SiteRole, hadamard_basis
from peps_mqc.numerics import CZ, H, I2, PAULIS, X, Z, kron, same_up_to_scale


class TestCircuit:
    def test_unitary_applies_gates_in_order(self, circuit_builder):
        circuit = circuit_builder(1, [("h", 0), ("z", 0)])
        assert np.allclose(circuit_unitary(circuit), Z @ H)

    def test_distribution_of_a_bell_pair(self, circuit_builder):
        circuit = circuit_builder(2, [("h", 0), ("h", 1), ("cz", 0, 1), ("h", 1)])
        assert np.allclose(circuit_distribution(circuit), [0.5, 0, 0, 0.5])

    def test_inputs(self, circuit_builder):
        circuit = circuit_builder(2, [("skip", 0)], inputs=("1", "+"))
        assert np.allclose(input_state(circuit), np.array([0, 0, 1, 1]) / np.sqrt(2))

    @pytest.mark.parametrize(
        "n_wires, gates, inputs",
        [
            (0, (Gate.skip(0),), ()),
            (1, (), ()),
            (1, (Gate.skip(1),), ()),
            (3, (Gate.cz(0, 2),), ()),
            (1, (Gate.skip(0),), ("2",)),
        ],
    )
    def test_invalid_circuits(self, n_wires, gates, inputs):
        with pytest.raises(InputError):
            CircuitIR(n_wires, gates, inputs)

    def test_rotations_need_an_angle(self):
        with pytest.raises(InputError):
            Gate.named("rx", 0)

    def test_json_form(self):
        circuit = load_circuit(
            json.dumps(
                {
                    "wires": 2,
                    "inputs": ["+", "0"],
                    "gates": [{"type": "rz", "wire": 0, "theta": 0.5}, {"type": "cz", "wires": [1, 0]}],
                }
            )
        )
        assert circuit.gates[1].wires == (0, 1)
        assert circuit_from_dict(circuit_to_dict(circuit)).inputs == ("+", "0")

    @pytest.mark.parametrize(
        "text",
        [
            "not json",
            json.dumps({"gates": []}),
            json.dumps({"wires": 1, "gates": [{"type": "toffoli", "wire": 0}]}),
            json.dumps({"wires": 1, "gates": [{"type": "su2", "wire": 0, "matrix": "x"}]}),
        ],
    )
    def test_schema_errors(self, text):
        with pytest.raises(SchemaError):
            load_circuit(text)


class TestSchedule:
    @pytest.mark.parametrize(
        "n_wires, steps, n_sites, n_measured",
        [
            (1, [("h", 0)], 3, 2),
            (1, [("h", 0), ("h", 0)], 5, 4),
            (2, [("cz", 0, 1)], 7, 5),
            (2, [("h", 0), ("cz", 0, 1)], 7, 5),
        ],
    )
    def test_site_counts(self, pattern_builder, n_wires, steps, n_sites, n_measured):
        pattern = pattern_builder(n_wires, steps)
        assert len(pattern.sites) == n_sites
        assert len(pattern.measured_sites) == n_measured
        assert len(pattern.readout_sites) == n_wires

    def test_single_gate_layout(self, pattern_builder):
        pattern = pattern_builder(1, [("h", 0)])
        assert [site.name for site in pattern.sites] == ["S0.0", "K0.0", "R0"]
        assert pattern.site("K0.0").source is ListSource.BORDER
        assert [site.gate_label for site in pattern.gate_sites()] == ["h"]

    def test_vertical_gate_sites(self, pattern_builder):
        pattern = pattern_builder(2, [("cz", 0, 1)])
        assert pattern.site("M0.0").kind is SiteKind.CZ_MID
        assert pattern.site("K0.0").side == "up"
        assert pattern.site("K1.0").side == "down"
        assert pattern.site("K1.0").mid == "M0.0"

    def test_edges_alternate(self):
        assert edges_in_column(0, 4) == [0, 2]
        assert edges_in_column(1, 4) == [1]

    def test_cz_waits_for_a_column_with_its_edge(self, pattern_builder):
        pattern = pattern_builder(3, [("cz", 1, 2)])
        assert pattern.n_columns == 2
        assert pattern.site("M1.1").kind is SiteKind.CZ_MID
        assert pattern.site("M0.0").kind is SiteKind.REMOVAL_MID
        assert pattern.site("K0.0").source is ListSource.REMOVAL

    def test_back_to_back_vertical_gates(self, pattern_builder):
        pattern = pattern_builder(2, [("cz", 0, 1), ("cz", 0, 1)])
        assert pattern.n_columns == 3
        assert pattern.site("M0.2").kind is SiteKind.CZ_MID
        assert not any(site.name == "M0.1" for site in pattern.sites)

    def test_unused_wires_get_border_circles(self, pattern_builder):
        pattern = pattern_builder(3, [("h", 0)])
        assert pattern.site("K2.0").source is ListSource.BORDER
        assert pattern.site("S1.0").gate_label == ""

    @pytest.mark.parametrize("matrix", [np.diag([1, 0]), np.full((2, 2), 0.5)])
    def test_degenerate_targets_are_refused_at_compile_time(self, matrix):
        circuit = CircuitIR(1, (Gate(SU2, (0,), np.asarray(matrix, dtype=complex), "proj"),))
        with pytest.raises(InputError):
            compile(circuit)

    def test_compiled_gate_bases_are_invertible(self, pattern_builder):
        pattern = pattern_builder(3, [("t", 0), ("cz", 1, 2)])
        state = PatternState.start(3)
        for site in (site for site in pattern.sites if site.kind is SiteKind.GATE):
            if site.source is ListSource.REMOVAL:
                state = advance(pattern.site(site.mid), state, 2)
            matrix_list = matrix_list_for(site, state)
            basis = basis_for(site, state)
            for outcome in range(4):
                assert np.linalg.cond(project_site(matrix_list, basis[outcome])) < 1e8


class TestFrameRules:
    def test_site_outcome_sets_the_label(self):
        frame = advance_frame(PauliFrame(("X", "Z")), SiteOutcome(1, 2))
        assert frame.labels == ("X", "Y")

    def test_cz_outcome_pushes_then_applies_the_byproduct(self):
        frame = advance_frame(PauliFrame(("X", "I")), CzOutcome(0, 0, 0, 0))
        assert frame.labels == ("X", "Z")

    @pytest.mark.parametrize("event", [SiteOutcome(0, 4), CzOutcome(0, 0, 5, 0), "bogus"])
    def test_illegal_events(self, event):
        with pytest.raises(InputError):
            advance_frame(PauliFrame.identity(2), event)

    def test_gate_basis_compensates_the_frame(self, pattern_builder):
        pattern = pattern_builder(1, [("h", 0)])
        site = pattern.site("S0.0")
        state = PatternState(PauliFrame(("X",)))
        basis = basis_for(site, state)
        for outcome, sigma in enumerate(PAULIS):
            realized = project_site(matrix_list_for(site, state), basis[outcome])
            assert same_up_to_scale(realized, sigma @ H @ X)

    def test_fixed_bases(self, pattern_builder):
        pattern = pattern_builder(3, [("cz", 0, 1)])
        start = PatternState.start(3)
        assert np.allclose(basis_for(pattern.site("M0.0"), start).vectors, hadamard_basis().vectors)
        assert basis_for(pattern.site("K1.0"), start) is CZ_BASIS
        with pytest.raises(InputError):
            basis_for(pattern.site("R0"), start)

    def test_removal_circles_read_the_mid_outcome(self, pattern_builder):
        pattern = pattern_builder(3, [("h", 0)])
        state = PatternState.start(3)
        state = advance(pattern.site("M0.0"), state, 1)
        assert basis_for(pattern.site("M0.0"), state) is REMOVAL_BASIS
        upper = matrix_list_for(pattern.site("K0.0"), state)
        assert same_up_to_scale(upper[1], X)

    def test_cz_frame_update_happens_on_the_lower_circle(self, pattern_builder):
        pattern = pattern_builder(2, [("cz", 0, 1)])
        state = PatternState(PauliFrame(("X", "I")))
        for name, outcome in (("M0.0", 0), ("K0.0", 0)):
            state = advance(pattern.site(name), state, outcome)
            assert state.frame.labels == ("X", "I")
        state = advance(pattern.site("K1.0"), state, 0)
        assert state.frame.labels == ("X", "Z")
        assert np.allclose(CZ @ kron(X, I2), state.frame.matrix() @ CZ)


class TestPatternCodec:
    def test_round_trip_through_json(self, pattern_builder):
        pattern = pattern_builder(2, [("h", 0), ("cz", 0, 1)], inputs=("+", "0"))
        restored = load_pattern(json.dumps(pattern_to_dict(pattern)))
        assert [site.name for site in restored.sites] == [site.name for site in pattern.sites]
        assert restored.site("S0.0").role is SiteRole.SQUARE_HORIZONTAL
        assert np.allclose(restored.site("S0.0").target, H)
        assert restored.circuit.inputs == ("+", "0")

    def test_bases_are_tabulated(self, pattern_builder):
        record = pattern_to_dict(pattern_builder(1, [("h", 0)]))
        square = record["sites"][0]
        assert sorted(square["bases"]) == ["I", "X", "Y", "Z"]
        assert square["frame_rule"].startswith("wire 0")

    @pytest.mark.parametrize("data", [{"schema": "other"}, {"schema": "peps-mqc/1", "circuit": {}}])
    def test_malformed_patterns(self, data):
        with pytest.raises(SchemaError):
            pattern_from_dict(data)

    def test_invalid_json(self):
        with pytest.raises(SchemaError):
            load_pattern("{")
