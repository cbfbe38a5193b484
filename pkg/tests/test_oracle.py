import numpy as np
import pytest

from peps_mqc.compiler import PatternState, basis_for
from peps_mqc.correlation import BoundaryPair, MeasurementBasis, mps_amplitude
from peps_mqc.exceptions import InputError, ResourceCapError, ShapeError, ZeroProbabilityError
from peps_mqc.honeycomb import MODEL, SiteRole
from peps_mqc.network import Boundaries, Layout, TensorNetwork, build_network, contract_layout
from peps_mqc.numerics import KET_0, KET_1, KET_PLUS
from peps_mqc.oracle import boundaries_for, build_patch, cross_validate, measure_site

ORACLE_CIRCUITS = [
    (1, [("i", 0)], ("1",)),
    (1, [("h", 0)], ()),
    (1, [("rz", 0, np.pi / 4)], ("+",)),
    (1, [("rz", 0, np.pi / 3)], ("+",)),
    (1, [("h", 0), ("h", 0)], ()),
    (1, [("ry", 0, 1.1)], ("-",)),
    (2, [("cz", 0, 1)], ("+", "+")),
    (2, [("h", 0), ("cz", 0, 1)], ("0", "1")),
]


class TestLayout:
    def test_empty_layout(self):
        with pytest.raises(InputError):
            Layout(((),), {})

    def test_order_must_cover_every_site(self):
        with pytest.raises(InputError):
            Layout((("S0.0", "S0.1"),), {"S0.0": SiteRole.SQUARE_HORIZONTAL}, order=("S0.0",))

    def test_mids_join_circles(self):
        with pytest.raises(InputError):
            Layout(
                (("S0.0",),),
                {"S0.0": SiteRole.SQUARE_HORIZONTAL, "M0.0": SiteRole.SQUARE_VERTICAL_MID},
                mids={"M0.0": ("S0.0", "K1.0")},
            )

    def test_from_pattern(self, pattern_builder):
        layout = Layout.from_pattern(pattern_builder(2, [("cz", 0, 1)]))
        assert layout.chains == (("S0.0", "K0.0", "R0"), ("S1.0", "K1.0", "R1"))
        assert layout.mids == {"M0.0": ("K0.0", "K1.0")}
        assert layout.n_sites == 7

    def test_restriction_must_be_contiguous(self, pattern_builder):
        layout = Layout.from_pattern(pattern_builder(1, [("h", 0)]))
        assert layout.restricted(("K0.0", "R0")).chains == (("K0.0", "R0"),)
        with pytest.raises(InputError):
            layout.restricted(("S0.0", "R0"))
        with pytest.raises(InputError):
            layout.restricted(("S9.9",))


class TestContraction:
    def test_row_matches_the_chain_amplitude(self):
        tensor = contract_layout(Layout.row(2), Boundaries(left=KET_0, right=(KET_1,)))
        boundary = BoundaryPair(KET_0, KET_1)
        for i0 in range(4):
            for i1 in range(4):
                expected = mps_amplitude([MODEL.square, MODEL.square], boundary, [i0, i1])
                assert tensor[i0, i1] == pytest.approx(expected)

    def test_open_legs_follow_the_physical_ones(self):
        tensor = contract_layout(Layout.row(1), None)
        assert tensor.shape == (4, 2, 2)
        assert np.allclose(tensor, MODEL.square.entries.transpose(0, 2, 1))

    def test_dangling_circle_is_closed_with_plus(self):
        layout = Layout((("K0.0",),), {"K0.0": SiteRole.CIRCLE})
        tensor = contract_layout(layout, Boundaries())
        expected = [KET_0 @ MODEL.circle.close_vertical(KET_PLUS)[i] @ KET_0 for i in range(4)]
        assert np.allclose(tensor, expected)

    def test_dimension_cap(self):
        with pytest.raises(ResourceCapError):
            contract_layout(Layout.row(3), Boundaries(), max_dim=16)

    def test_network_checks_its_legs(self):
        network = TensorNetwork()
        with pytest.raises(ShapeError):
            network.add(np.eye(2), ["a"])
        network.add(np.eye(2), ["a", "b"])
        network.add(KET_0, ["b"])
        assert network.dangling_legs() == ["a"]
        with pytest.raises(ShapeError):
            network.contract(["b"])
        assert np.allclose(network.contract(["a"]), KET_0)

    def test_build_network_lists_open_legs(self):
        _, output = build_network(Layout.row(1))
        assert output == [("p", "S0.0"), ("h", 0, 0), ("h", 0, 1)]


class TestMeasurement:
    @pytest.fixture
    def single_square(self):
        return build_patch(Layout.row(1), Boundaries())

    def test_patch_is_normalized(self, single_square):
        assert single_square.norm == pytest.approx(1)
        assert np.allclose(np.abs(single_square.vector) ** 2, [0.5, 0, 0, 0.5])

    def test_born_probability_and_collapse(self, single_square):
        probability, post = measure_site(single_square, "S0.0", MeasurementBasis(np.eye(4)), 0)
        assert probability == pytest.approx(0.5)
        assert post.sites == ()

    def test_zero_probability_outcome(self, single_square):
        basis = MeasurementBasis(np.eye(4))
        assert measure_site(single_square, "S0.0", basis, 1) == (0.0, None)
        with pytest.raises(ZeroProbabilityError):
            measure_site(single_square, "S0.0", basis, 1, strict=True)

    def test_unknown_site(self, single_square):
        with pytest.raises(InputError):
            single_square.index("K0.0")

    def test_site_cap(self, pattern_builder):
        with pytest.raises(ResourceCapError):
            build_patch(Layout.from_pattern(pattern_builder(2, [("cz", 0, 1)])), max_sites=5)

    def test_first_gate_site_outcomes_are_uniform(self, circuit_builder, pattern_builder):
        circuit = circuit_builder(1, [("h", 0)], inputs=("+",))
        pattern = pattern_builder(1, [("h", 0)], inputs=("+",))
        patch = build_patch(Layout.from_pattern(pattern), boundaries_for(circuit))
        basis = basis_for(pattern.site("S0.0"), PatternState.start(1))
        probabilities = [measure_site(patch, "S0.0", basis, k)[0] for k in range(4)]
        assert probabilities == pytest.approx([0.25] * 4)

    def test_boundaries_follow_the_circuit_inputs(self, circuit_builder):
        boundaries = boundaries_for(circuit_builder(2, [("skip", 0)], inputs=("1", "+")))
        assert np.allclose(boundaries.right_for(0), KET_1)
        assert np.allclose(boundaries.right_for(1), KET_PLUS)


class TestCrossValidation:
    @pytest.mark.parametrize("n_wires, steps, inputs", ORACLE_CIRCUITS)
    def test_physical_and_correlation_space_agree(self, circuit_builder, n_wires, steps, inputs):
        report = cross_validate(circuit_builder(n_wires, steps, inputs))
        assert report.failures == []
        assert report.total_probability == pytest.approx(1)
        assert report.passed
        assert len(report.branches) == 4 ** len(report.pattern.measured_sites)

    def test_report_form(self, circuit_builder):
        record = cross_validate(circuit_builder(1, [("x", 0)])).to_dict()
        assert record["passed"] is True
        assert record["sites"] == 3
        assert record["marginal"] == pytest.approx([0.0, 1.0])

    def test_oracle_cap(self, circuit_builder):
        with pytest.raises(ResourceCapError):
            cross_validate(circuit_builder(2, [("cz", 0, 1)]), max_sites=6)
