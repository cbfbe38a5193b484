import itertools

import numpy as np
import pytest

from peps_mqc.crossing import (
    MAGIC,
    CanonicalGate,
    completeness_scan,
    crosses,
    filter_matrix,
    magic_transform,
    plane_gate,
    plane_rotation,
    signed_permutations,
    solve,
    verify_family,
    verify_solution,
)
from peps_mqc.exceptions import InputError
from peps_mqc.numerics import (
    CZ,
    H,
    I2,
    PAULIS,
    X,
    Y,
    Z,
    haar_special_unitary,
    is_unitary,
    kron,
    rotation,
    same_up_to_scale,
)

CZ_CLASS = CanonicalGate(0, 0, np.pi / 2)
GENERIC = CanonicalGate(0.3, 0.5, 0.9)
IDENTITY = CanonicalGate(0, 0, 0)


class TestCanonicalGate:
    @pytest.mark.parametrize("values", [(np.pi, 0, 0), (0, -0.1, 0), (0, 0, 4)])
    def test_parameters_live_in_zero_to_pi(self, values):
        with pytest.raises(InputError):
            CanonicalGate(*values)

    @pytest.mark.parametrize("gate", [CZ_CLASS, GENERIC, CanonicalGate(1.2, 0.1, 2.9)])
    def test_magic_basis_diagonalizes(self, gate):
        assert np.allclose(magic_transform(gate.matrix), np.diag(np.exp(0.5j * gate.phases)))

    def test_cz_class_is_cz_up_to_local_gates(self):
        local = kron(rotation(Z, -np.pi / 2), rotation(Z, -np.pi / 2))
        assert same_up_to_scale(CZ_CLASS.matrix @ local, CZ)

    def test_magic_basis_is_unitary(self):
        assert is_unitary(MAGIC)
        with pytest.raises(InputError):
            magic_transform(np.ones((4, 4)))


class TestPlaneGates:
    @pytest.mark.parametrize(
        "plane, factory",
        [
            ("12", lambda t: kron(rotation(X, t), rotation(X, t))),
            ("14", lambda t: kron(rotation(Z, t), rotation(Z, t))),
            ("23", lambda t: kron(rotation(Z, -t), rotation(Z, t))),
        ],
    )
    @pytest.mark.parametrize("theta", [0.3, 1.7, -2.2])
    def test_planes_are_local(self, plane, factory, theta):
        assert same_up_to_scale(plane_gate(plane, theta), factory(theta))

    def test_rotation_sign(self):
        r = plane_rotation("13", np.pi / 2)
        assert np.allclose(r[[0, 2]][:, [0, 2]], [[0, -1], [1, 0]])

    def test_signed_permutations(self):
        assert len(signed_permutations()) == 192
        assert len(signed_permutations(special=False)) == 384


class TestPhaseFilter:
    def test_zero_class_comes_first(self):
        phase_filter = filter_matrix(GENERIC)
        assert phase_filter.classes[0].eta == 0.0
        assert np.array_equal(phase_filter.classes[0].support, np.eye(4, dtype=int))

    @pytest.mark.parametrize("gate", [CZ_CLASS, GENERIC, IDENTITY])
    def test_classes_rebuild_the_filter(self, gate):
        phase_filter = filter_matrix(gate)
        assert np.allclose(phase_filter.reconstruct(), phase_filter.matrix)
        assert sum(c.support for c in phase_filter.classes).tolist() == np.ones((4, 4)).tolist()

    def test_cz_has_two_classes(self):
        classes = filter_matrix(CZ_CLASS).classes
        assert [c.eta for c in classes] == pytest.approx([0, np.pi / 2])
        assert classes[0].entries == [(0, 0), (0, 3), (1, 1), (1, 2), (2, 1), (2, 2), (3, 0), (3, 3)]

    def test_near_coincident_phases_are_reported(self):
        phase_filter = filter_matrix(CanonicalGate(0, 0, np.pi / 2 + 1e-11))
        assert len(phase_filter.classes) == 2
        assert phase_filter.near_merges


class TestSolve:
    def test_cz(self):
        solution = solve(CZ_CLASS)
        assert solution.template == "Z(θ1)Σ(i)⊗Z(θ2)Σ(j)"
        assert [family.shift.label for family in solution.families] == ["I⊗I", "I⊗X"]
        assert solution.unsolved == []

    def test_identity_allows_every_local_gate(self, rng):
        solution = solve(IDENTITY)
        assert solution.template == "U(2)⊗U(2)"
        assert solution.contains(kron(haar_special_unitary(rng), haar_special_unitary(rng)))

    def test_generic_gate_keeps_only_the_reflections(self):
        solution = solve(GENERIC)
        assert solution.template == "L0(i)"
        assert len(solution.unsolved) == 12
        assert solution.families[0].planes == ()

    def test_cz_power_keeps_only_the_zero_class(self):
        solution = solve(CanonicalGate(0, 0, np.pi / 3))
        assert len(solution.families) == 1
        assert solution.unsolved == pytest.approx([np.pi / 3, 2 * np.pi / 3])
        assert solution.template == "Z(θ1)⊗Z(θ2)·L0(i)"

    @pytest.mark.parametrize("reflection, op", [(0, kron(I2, I2)), (1, kron(X, X)), (2, kron(Y, Y)), (3, kron(Z, Z))])
    def test_reflections_cross_every_gate(self, reflection, op):
        family = solve(GENERIC).families[0]
        assert same_up_to_scale(family.member((), reflection), op)
        assert crosses(GENERIC, op)

    def test_non_local_gates_are_not_members(self):
        assert not solve(CZ_CLASS).contains(CZ)
        assert not solve(CZ_CLASS).contains(kron(H, I2))

    def test_members_need_one_angle_per_plane(self):
        family = solve(CZ_CLASS).families[0]
        with pytest.raises(InputError):
            family.member([0.1])

    def test_report_form(self):
        record = solve(CZ_CLASS).to_dict()
        assert record["gate"]["gamma"] == pytest.approx(np.pi / 2)
        assert [family["shift"] for family in record["families"]] == ["I⊗I", "I⊗X"]
        assert len(record["filter"]["classes"]) == 2


class TestVerification:
    @pytest.mark.parametrize("gate", [CZ_CLASS, IDENTITY, GENERIC, CanonicalGate(np.pi / 2, np.pi / 2, 0)])
    def test_sampled_members_cross(self, gate):
        solution = solve(gate)
        verification = verify_solution(solution, samples=100, seed=5)
        assert verification.failed == 0
        assert verification.passed == 100 * len(solution.families)

    def test_a_wrong_family_is_caught(self):
        family = solve(IDENTITY).families[0]
        verification = verify_family(CZ_CLASS, family, samples=30, seed=2)
        assert verification.failed > 0

    def test_cz_scan_finds_no_gaps(self):
        assert completeness_scan(solve(CZ_CLASS), points=8) == []

    def test_generic_scan_finds_no_gaps(self):
        assert completeness_scan(solve(GENERIC), points=6) == []


CLOSURE_GATES = [
    CanonicalGate(np.pi / 2, np.pi / 2, np.pi / 2),
    CanonicalGate(np.pi / 2, 0, 0),
    CanonicalGate(0.3, 0.3, 0),
    CanonicalGate(0.7, 0.7, 0.7),
    CZ_CLASS,
    GENERIC,
]


class TestFamilyStructure:
    @pytest.mark.parametrize("gate", CLOSURE_GATES)
    def test_members_are_closed_under_products_and_inverses(self, gate, rng):
        solution = solve(gate)
        for _ in range(20):
            a = solution.families[rng.integers(len(solution.families))].sample(rng)
            b = solution.families[rng.integers(len(solution.families))].sample(rng)
            assert solution.contains(a @ b)
            assert solution.contains(a.conj().T)

    @pytest.mark.parametrize("gate", CLOSURE_GATES)
    def test_every_crossing_pauli_product_is_a_member(self, gate):
        solution = solve(gate)
        for p, q in itertools.product(PAULIS, repeat=2):
            u = kron(p, q)
            if crosses(gate, u):
                assert solution.contains(u)
