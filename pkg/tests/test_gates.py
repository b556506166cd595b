import math

import numpy as np
import pytest

from hiddencluster.certify import (
    multimode_phase_deviation,
    sample_quantum_numbers,
    two_mode_phase_deviation,
)
from hiddencluster.errors import DomainError
from hiddencluster.gates import (
    CouplingTerm,
    SubsystemOperator,
    chain_adjacency,
    decompose_cz_multimode,
    decompose_cz_two_mode,
    expand_adjacency,
    grid_adjacency,
    interaction_as_controlled_rotation,
    is_trivial_term,
    require_binary_adjacency,
)
from hiddencluster.modular import DEFAULT_ALPHA, SubsystemKind
from hiddencluster.oracle import (
    GridSpec,
    apply_subsystem_coupling,
    apply_subsystem_phase,
    prepare_momentum_state,
    tensor_product,
)

L, M, U = SubsystemKind.LOGICAL, SubsystemKind.GAUGE_BIN, SubsystemKind.GAUGE_MODULAR
PI = math.pi


def term(kind_a, kind_b, coefficient, modes=(0, 1)):
    return CouplingTerm(
        SubsystemOperator(kind_a, modes[0]), SubsystemOperator(kind_b, modes[1]), coefficient
    )


def kinds_and_coeffs(terms):
    return {(t.op_a.kind, t.op_b.kind): t.coefficient for t in terms}


class TestTwoModeDecomposition:
    def test_tuned_keeps_exactly_six_terms(self):
        alpha = DEFAULT_ALPHA
        terms = decompose_cz_two_mode(PI / alpha**2, alpha)
        assert len(terms) == 6
        got = kinds_and_coeffs(terms)
        assert got[(L, L)] == pytest.approx(PI)
        assert got[(U, U)] == pytest.approx(PI / alpha**2)
        assert got[(M, U)] == pytest.approx(2 * PI / alpha)
        assert got[(U, M)] == pytest.approx(2 * PI / alpha)
        assert got[(L, U)] == pytest.approx(PI / alpha)
        assert got[(U, L)] == pytest.approx(PI / alpha)
        # the logical-bin and bin-bin couplings are the pruned ones
        assert (L, M) not in got and (M, L) not in got and (M, M) not in got

    def test_zero_weight_is_identity(self):
        assert decompose_cz_two_mode(0.0, 1.3) == []

    def test_half_tuned_keeps_eight_terms(self):
        alpha = 1.7
        terms = decompose_cz_two_mode(PI / (2 * alpha**2), alpha)
        assert len(terms) == 8
        got = kinds_and_coeffs(terms)
        assert got[(L, M)] == pytest.approx(PI)
        assert (M, M) not in got  # coefficient 2*pi, pruned

    def test_generic_weight_keeps_all_nine(self):
        assert len(decompose_cz_two_mode(0.37, 1.1)) == 9

    def test_rejects_same_mode(self):
        with pytest.raises(DomainError):
            decompose_cz_two_mode(1.0, 1.0, modes=(2, 2))


class TestTrivialityPredicate:
    def test_integer_pair_at_two_pi(self):
        assert is_trivial_term(term(L, M, 2 * PI))

    def test_modular_operand_never_trivial(self):
        assert not is_trivial_term(term(L, U, 2 * PI))

    def test_bin_pair_at_four_pi(self):
        assert is_trivial_term(term(M, M, 4 * PI))

    def test_near_multiple_within_tolerance(self):
        assert is_trivial_term(term(L, M, 2 * PI * (1 + 1e-12)))
        assert not is_trivial_term(term(L, M, 2 * PI * 1.5))


class TestPhaseIdentity:
    """exp(i g x1 x2) must equal the product of the surviving factors."""

    @pytest.mark.parametrize("alpha", [1.0, DEFAULT_ALPHA, 2.0])
    def test_random_weights(self, alpha):
        rng = np.random.default_rng(7)
        tuples = (
            sample_quantum_numbers(rng, alpha, 400),
            sample_quantum_numbers(rng, alpha, 400),
        )
        tuned = PI / alpha**2
        for g in [tuned, tuned / 2, 0.0, *rng.uniform(-2 * tuned, 2 * tuned, 12)]:
            assert two_mode_phase_deviation(g, alpha, tuples) < 1e-10

    def test_pruned_factors_are_unit_phases_on_integers(self):
        alpha = DEFAULT_ALPHA
        g = PI / alpha**2
        ells = np.arange(2.0)
        ms = np.arange(-5.0, 6.0)
        for coeff, va, vb in [
            (2 * g * alpha**2, ells, ms),  # logical-bin
            (2 * g * alpha**2, ms, ells),
            (4 * g * alpha**2, ms, ms),  # bin-bin
        ]:
            phases = np.exp(1j * coeff * np.outer(va, vb))
            assert np.max(np.abs(phases - 1.0)) < 1e-12

    def test_multimode_identity(self):
        rng = np.random.default_rng(11)
        alpha = DEFAULT_ALPHA
        for n_modes in (2, 3, 4):
            upper = np.triu(rng.integers(0, 2, size=(n_modes, n_modes)), k=1).astype(float)
            adjacency = upper + upper.T
            samples = [sample_quantum_numbers(rng, alpha, 1000) for _ in range(n_modes)]
            assert multimode_phase_deviation(adjacency, alpha, samples) < 1e-10


class TestExpandAdjacency:
    def test_two_mode_block_matches_displayed_entries(self):
        for alpha in (1.0, DEFAULT_ALPHA, 2.0):
            tuned = (PI / alpha**2) * np.array([[0.0, 1.0], [1.0, 0.0]])
            expanded = expand_adjacency(tuned, alpha)
            block = np.array(
                [
                    [PI, 2 * PI, PI / alpha],
                    [2 * PI, 4 * PI, 2 * PI / alpha],
                    [PI / alpha, 2 * PI / alpha, PI / alpha**2],
                ]
            )
            assert np.allclose(expanded[0:3, 3:6], block, rtol=1e-12, atol=0.0)
            assert np.allclose(expanded[3:6, 0:3], block, rtol=1e-12, atol=0.0)
            assert np.all(expanded[0:3, 0:3] == 0.0)

    def test_zero_matrix(self):
        assert np.all(expand_adjacency(np.zeros((3, 3)), 1.0) == 0.0)

    def test_path_graph_against_naive_double_loop(self):
        alpha = 1.9
        weights = (PI / alpha**2) * chain_adjacency(3)
        expanded = expand_adjacency(weights, alpha)
        v = np.array([alpha, 2 * alpha, 1.0])
        naive = np.zeros((9, 9))
        for i in range(3):
            for j in range(3):
                for a in range(3):
                    for b in range(3):
                        naive[3 * i + a, 3 * j + b] = weights[i, j] * v[a] * v[b]
        assert np.array_equal(expanded, naive)
        assert np.array_equal(expanded, expanded.T)
        # block tridiagonal: no coupling between the end modes
        assert np.all(expanded[0:3, 6:9] == 0.0)

    def test_rejects_asymmetric(self):
        with pytest.raises(DomainError):
            expand_adjacency(np.array([[0.0, 1.0], [0.5, 0.0]]), 1.0)


class TestMultimodeDecomposition:
    def test_two_mode_partition_is_1_3_2(self):
        result = decompose_cz_multimode(chain_adjacency(2), DEFAULT_ALPHA)
        assert len(result.logical_terms) == 1
        assert len(result.gauge_terms) == 3
        assert len(result.interaction_terms) == 2
        two_mode = decompose_cz_two_mode(PI / DEFAULT_ALPHA**2, DEFAULT_ALPHA)
        assert sorted(result.all_terms, key=repr) == sorted(two_mode, key=repr)

    def test_empty_adjacency(self):
        result = decompose_cz_multimode(np.zeros((3, 3)), 1.0)
        assert result.all_terms == ()

    def test_grid_per_edge_counts(self):
        adjacency = grid_adjacency(2, 3)
        edges = int(adjacency.sum()) // 2
        assert edges == 7
        result = decompose_cz_multimode(adjacency, DEFAULT_ALPHA)
        assert len(result.logical_terms) == edges
        assert len(result.gauge_terms) == 3 * edges
        assert len(result.interaction_terms) == 2 * edges

    def test_partition_matches_prune_pipeline(self):
        # independent route: prune the raw nine-term expansion per edge
        alpha = DEFAULT_ALPHA
        adjacency = grid_adjacency(2, 2)
        expected = []
        for i in range(4):
            for j in range(i + 1, 4):
                if adjacency[i, j]:
                    expected.extend(decompose_cz_two_mode(PI / alpha**2, alpha, modes=(i, j)))
        result = decompose_cz_multimode(adjacency, alpha)
        assert sorted(result.all_terms, key=repr) == sorted(expected, key=repr)
        for t in result.logical_terms:
            assert set(t.kinds) == {L}
        for t in result.gauge_terms:
            assert L not in t.kinds
        for t in result.interaction_terms:
            assert set(t.kinds) == {L, U}

    def test_rejects_non_binary(self):
        with pytest.raises(DomainError):
            decompose_cz_multimode(0.5 * chain_adjacency(2), 1.0)
        with pytest.raises(DomainError):
            require_binary_adjacency(np.array([[0.0, 2.0], [2.0, 0.0]]))


class TestControlledRotationForm:
    def test_shift_coefficient_is_half(self):
        alpha = DEFAULT_ALPHA
        t = term(L, U, PI / alpha, modes=(2, 1))
        form = interaction_as_controlled_rotation(t)
        assert form.control_mode == 1
        assert form.rotated_mode == 2
        assert form.shift_coefficient == pytest.approx(PI / (2 * alpha))
        assert form.rotation_coefficient == pytest.approx(PI / alpha)
        assert "Rz" in form.describe()

    def test_zero_coefficient_gives_identity_factorization(self):
        form = interaction_as_controlled_rotation(term(U, L, 0.0))
        assert form.shift_coefficient == 0.0
        assert form.rotation_coefficient == 0.0

    def test_sqrt_pi_shift(self):
        alpha = DEFAULT_ALPHA  # pi/(2 alpha) = sqrt(pi)/2
        form = interaction_as_controlled_rotation(term(L, U, PI / alpha, modes=(1, 2)))
        assert form.shift_coefficient == pytest.approx(math.sqrt(PI) / 2)

    def test_rejects_wrong_kinds(self):
        with pytest.raises(DomainError):
            interaction_as_controlled_rotation(term(L, M, 1.0))
        with pytest.raises(DomainError):
            interaction_as_controlled_rotation(term(U, U, 1.0))

    def test_oracle_equality_of_both_orderings(self):
        # apply exp(i c u_0 (x) ell_1) directly, then as shift * controlled Rz
        alpha = DEFAULT_ALPHA
        c = PI / alpha
        grid = GridSpec(n=3, alpha=alpha)
        rng = np.random.default_rng(3)
        raw = rng.normal(size=grid.dim**2) + 1j * rng.normal(size=grid.dim**2)
        state = tensor_product([prepare_momentum_state(grid)] * 2)
        state.amplitudes = raw / np.linalg.norm(raw)

        direct = apply_subsystem_coupling(state, (0, U), (1, L), c)

        shifted = apply_subsystem_phase(state, U, 0, c / 2.0)
        u_vals = grid.basis_values(U).reshape(grid.dim, 1)
        z_vals = (1.0 - 2.0 * grid.basis_values(L)).reshape(1, grid.dim)
        rotation = np.exp(-1j * (c * u_vals) * z_vals / 2.0)
        rotated = shifted.amplitudes.reshape(grid.dim, grid.dim) * rotation
        assert np.allclose(direct.amplitudes, rotated.reshape(-1), atol=1e-14)
