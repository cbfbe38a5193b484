import numpy as np
import pytest

from peps_mqc.correlation import (
    BoundaryPair,
    MatrixList,
    MeasurementBasis,
    byproduct_of,
    expansion_matrix,
    gate_basis,
    gate_product,
    locality_condition,
    mps_amplitude,
    operator_coefficients,
    project_site,
    readout_apply,
    validate_basis,
    vertical_contract,
)
from peps_mqc.exceptions import InputError, ShapeError
from peps_mqc.honeycomb import MODEL, readout_map
from peps_mqc.numerics import (
    CZ,
    H,
    I2,
    KET_0,
    KET_1,
    KET_PLUS,
    PAULIS,
    X,
    Z,
    haar_special_unitary,
    kron,
    rotation,
    same_up_to_scale,
)


@pytest.fixture
def pauli_list():
    return MatrixList(np.array(PAULIS) / np.sqrt(2), name="paulis")


class TestMatrixList:
    def test_shape_is_checked(self):
        with pytest.raises(ShapeError):
            MatrixList(np.zeros((4, 2, 3)))

    def test_square_list_is_orthonormal(self):
        assert MODEL.square.is_orthonormal()
        assert MODEL.square.is_orthogonal_basis()

    def test_b_list_is_orthogonal_but_not_normalized(self):
        assert MODEL.b_list.is_orthogonal_basis()
        assert not MODEL.b_list.is_orthonormal()


class TestAmplitudes:
    def test_right_boundary_is_acted_on_first(self):
        lists = [MatrixList(np.array([X, Z])), MatrixList(np.array([I2, H]))]
        boundary = BoundaryPair(KET_0, KET_1)
        # <0| H X |1> with X at site 1 next to |1>
        assert mps_amplitude(lists, boundary, [0, 1]) == pytest.approx(H[0, 0])

    def test_level_out_of_range(self):
        lists = [MatrixList(np.array([I2]))]
        with pytest.raises(InputError):
            mps_amplitude(lists, BoundaryPair(KET_0, KET_0), [1])

    def test_boundaries_must_be_nonzero(self):
        with pytest.raises(InputError):
            BoundaryPair(np.zeros(2), KET_0)

    def test_projection_is_conjugate_linear(self, pauli_list):
        state = np.array([0, 1j, 0, 0])
        assert np.allclose(project_site(pauli_list, state), -1j * X / np.sqrt(2))

    def test_gate_product_order(self):
        assert np.allclose(gate_product([H, Z]), H @ Z)
        assert np.allclose(gate_product([]), I2)

    def test_byproduct_of(self, rng):
        u = haar_special_unitary(rng)
        assert np.allclose(byproduct_of(Z @ u, u), Z)


class TestGateBasis:
    def test_each_outcome_realizes_its_pauli(self, rng):
        u = haar_special_unitary(rng)
        basis = gate_basis(MODEL.square, u)
        for outcome, sigma in enumerate(PAULIS):
            assert np.allclose(project_site(MODEL.square, basis[outcome]), sigma @ u / np.sqrt(2))

    def test_scaled_lists_keep_the_outcome_map(self):
        basis = gate_basis(MODEL.b_list, H)
        for outcome, sigma in enumerate(PAULIS):
            assert same_up_to_scale(project_site(MODEL.b_list, basis[outcome]), sigma @ H)

    def test_non_bases_are_refused(self):
        with pytest.raises(InputError):
            gate_basis(MatrixList(np.array([I2, I2, X, Z])), H)

    def test_basis_must_be_orthonormal(self):
        with pytest.raises(InputError):
            MeasurementBasis(np.ones((4, 4)))

    def test_validate_basis_catches_singular_operators(self):
        singular = MatrixList(np.array([[[1, 0], [0, 0]], [[0, 1], [0, 0]]]))
        with pytest.raises(InputError):
            validate_basis(singular, MeasurementBasis(np.eye(2)))


class TestReadout:
    def test_readout_columns_are_orthonormal(self):
        readout = readout_map()
        assert np.allclose(readout.matrix.conj().T @ readout.matrix, np.eye(2))

    def test_readout_is_normalized(self):
        state = readout_apply(readout_map(), X, KET_0)
        assert np.linalg.norm(state) == pytest.approx(1)
        assert np.allclose(np.abs(state) ** 2, [0, 0.5, 0.5, 0])

    def test_frame_must_be_unitary(self):
        with pytest.raises(InputError):
            readout_apply(readout_map(), 2 * I2, KET_0)


class TestVerticalAndLocality:
    def test_vertical_contraction_with_product_kets(self):
        up = MODEL.circle.project(np.eye(4)[0])
        assert up.shape == (2, 2, 2)
        joined = vertical_contract(MODEL.circle, MODEL.circle, np.eye(4)[0], np.eye(4)[2])
        # |0> and |1> on the shared leg never meet
        assert np.allclose(joined, 0)
        joined = vertical_contract(MODEL.circle, MODEL.circle, np.eye(4)[1], np.eye(4)[0])
        assert np.allclose(joined, kron(X, I2))

    def test_pauli_passes_through_cz_locally(self):
        result = locality_condition(CZ, X, I2)
        assert result is not None
        g, h = result
        assert np.allclose(kron(g, h), CZ @ kron(X, I2) @ CZ)
        assert np.linalg.det(h) == pytest.approx(1)

    def test_hadamard_does_not_pass_through_cz(self):
        assert locality_condition(CZ, H, I2) is None

    def test_closing_the_vertical_leg(self):
        closed = MODEL.circle.close_vertical(KET_PLUS)
        assert np.allclose(closed.entries, MODEL.b_list.entries / np.sqrt(2))


class TestExpansions:
    def test_expansion_matrix_of_the_identity(self, pauli_list):
        assert np.allclose(expansion_matrix(I2, pauli_list), np.eye(4))

    def test_operator_coefficients_of_cz(self, pauli_list):
        coefficients = operator_coefficients(CZ, pauli_list)
        expected = np.zeros((4, 4))
        expected[0, 0] = expected[0, 3] = expected[3, 0] = 1
        expected[3, 3] = -1
        assert np.allclose(coefficients, expected)

    @pytest.mark.parametrize("draw", range(10))
    def test_locality_condition_agrees_with_the_expansions(self, pauli_list, test_config, draw):
        rng = np.random.default_rng(test_config.SEED + draw)
        e = PAULIS[rng.integers(4)] @ rotation(Z, rng.uniform(0, 2 * np.pi))
        f = PAULIS[rng.integers(4)] @ rotation(Z, rng.uniform(0, 2 * np.pi))
        g, h = locality_condition(CZ, e, f)
        assert np.allclose(CZ @ kron(e, f), kron(g, h) @ CZ)

        coefficients = operator_coefficients(CZ @ kron(e, f) @ CZ, pauli_list)
        assert np.linalg.matrix_rank(coefficients, tol=1e-9) == 1
        g_expansion = expansion_matrix(g, pauli_list)
        h_expansion = expansion_matrix(h, pauli_list)
        assert np.allclose(coefficients, 2 * np.outer(g_expansion[0], h_expansion[0]))
        assert np.allclose(
            np.einsum("mn,nab->mab", g_expansion, pauli_list.entries),
            np.einsum("ab,mbc->mac", g, pauli_list.entries),
        )
