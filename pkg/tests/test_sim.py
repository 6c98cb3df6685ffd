"""State-vector simulator: Pauli strings, rotations, expectations.

Oracle strategy: dense matrix construction via Kronecker products is the
independent oracle; the fast bit-mask kernels must reproduce it exactly.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qnnlab.sim import (
    PauliAxis,
    PauliString,
    QuantumState,
    apply_pauli,
    apply_pauli_rotation,
    basis_state,
    expectation_pauli,
    inner_product,
    sample_pauli_measurement,
)

PAULI_MATRICES = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense_pauli(p: PauliString, num_qubits: int) -> np.ndarray:
    """Independent oracle: explicit Kronecker-product matrix (qubit 1 least
    significant, so it is the rightmost factor)."""
    by_qubit = {q: axis.value for q, axis in p.terms}
    out = np.eye(1, dtype=complex)
    for q in range(1, num_qubits + 1):
        factor = PAULI_MATRICES.get(by_qubit.get(q), np.eye(2, dtype=complex))
        out = np.kron(factor, out)
    return out


def random_state(num_qubits: int, rng: np.random.Generator) -> QuantumState:
    amps = rng.normal(size=1 << num_qubits) + 1j * rng.normal(size=1 << num_qubits)
    return QuantumState(num_qubits, amps / np.linalg.norm(amps))


def random_pauli(num_qubits: int, rng: np.random.Generator) -> PauliString:
    support = rng.choice(num_qubits, size=int(rng.integers(1, num_qubits + 1)), replace=False)
    return PauliString.of(
        *((int(q) + 1, rng.choice(["X", "Y", "Z"])) for q in support)
    )


class TestPauliString:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            PauliString(())

    def test_rejects_duplicate_qubits(self):
        with pytest.raises(ValueError):
            PauliString.of((1, "X"), (1, "Z"))

    def test_masks_single_y(self):
        flip, yz, phase = PauliString.of((2, "Y")).masks()
        assert flip == 0b10 and yz == 0b10 and phase == 1j

    def test_masks_xz(self):
        flip, yz, phase = PauliString.of((1, "X"), (3, "Z")).masks()
        assert flip == 0b001 and yz == 0b100 and phase == 1


class TestBasisState:
    def test_all_plus_is_index_zero(self):
        state = basis_state((1, 1, 1))
        assert state.amplitudes[0] == 1.0 and state.norm_sq() == 1.0

    def test_bit_packing(self):
        # z = -1 on qubit 2 only -> index 0b010
        state = basis_state((1, -1, 1))
        assert state.amplitudes[0b010] == 1.0

    def test_readout_appended_in_zero(self):
        state = basis_state((-1,), include_readout=True)
        assert state.num_qubits == 2
        assert state.amplitudes[0b01] == 1.0

    def test_rejects_bad_bits(self):
        with pytest.raises(ValueError):
            basis_state((1, 0))


class TestApplyPauli:
    @pytest.mark.parametrize("seed", range(20))
    def test_matches_dense_oracle(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 7))
        state = random_state(n, rng)
        p = random_pauli(n, rng)
        got = apply_pauli(state, p).amplitudes
        want = dense_pauli(p, n) @ state.amplitudes
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_involution(self, rng):
        state = random_state(5, rng)
        p = random_pauli(5, rng)
        twice = apply_pauli(apply_pauli(state, p), p)
        np.testing.assert_allclose(twice.amplitudes, state.amplitudes, atol=1e-12)

    def test_controlled_acts_only_inside_subspace(self, rng):
        state = random_state(3, rng)
        p = PauliString.of((1, "X"))
        got = apply_pauli(state, p, controls=(3,)).amplitudes
        # control bit 3 clear: untouched; set: swapped on bit 1
        want = state.amplitudes.copy()
        for idx in range(8):
            if idx & 0b100:
                want[idx] = state.amplitudes[idx ^ 0b001]
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_rejects_out_of_range(self, rng):
        state = random_state(2, rng)
        with pytest.raises(ValueError):
            apply_pauli(state, PauliString.of((3, "X")))

    def test_rejects_control_on_support(self, rng):
        state = random_state(2, rng)
        with pytest.raises(ValueError):
            apply_pauli(state, PauliString.of((1, "X")), controls=(1,))


class TestApplyRotation:
    @pytest.mark.parametrize("seed", range(20))
    def test_matches_dense_oracle(self, seed):
        rng = np.random.default_rng(100 + seed)
        n = int(rng.integers(1, 7))
        state = random_state(n, rng)
        p = random_pauli(n, rng)
        angle = float(rng.uniform(-np.pi, np.pi))
        got = apply_pauli_rotation(state, p, angle).amplitudes
        sigma = dense_pauli(p, n)
        want = (np.cos(angle) * np.eye(1 << n) + 1j * np.sin(angle) * sigma) @ state.amplitudes
        np.testing.assert_allclose(got, want, atol=1e-12)

    @given(
        angle=st.floats(-10.0, 10.0),
        angle2=st.floats(-10.0, 10.0),
        seed=st.integers(0, 2**31),
    )
    @settings(max_examples=50, deadline=None)
    def test_rotations_compose_additively(self, angle, angle2, seed):
        rng = np.random.default_rng(seed)
        state = random_state(4, rng)
        p = random_pauli(4, rng)
        chained = apply_pauli_rotation(apply_pauli_rotation(state, p, angle), p, angle2)
        direct = apply_pauli_rotation(state, p, angle + angle2)
        np.testing.assert_allclose(chained.amplitudes, direct.amplitudes, atol=1e-10)

    @given(angle=st.floats(-10.0, 10.0), seed=st.integers(0, 2**31))
    @settings(max_examples=50, deadline=None)
    def test_norm_preserved(self, angle, seed):
        rng = np.random.default_rng(seed)
        state = random_state(5, rng)
        p = random_pauli(5, rng)
        out = apply_pauli_rotation(state, p, angle)
        assert abs(out.norm_sq() - 1.0) < 1e-12

    def test_zero_angle_is_identity(self, rng):
        state = random_state(4, rng)
        out = apply_pauli_rotation(state, random_pauli(4, rng), 0.0)
        np.testing.assert_allclose(out.amplitudes, state.amplitudes, atol=1e-15)


class TestExpectation:
    def test_z_on_basis_state(self):
        assert expectation_pauli(basis_state((1, -1)), PauliString.of((1, "Z"))) == 1.0
        assert expectation_pauli(basis_state((1, -1)), PauliString.of((2, "Z"))) == -1.0

    def test_y_on_basis_state_is_zero(self):
        assert expectation_pauli(basis_state((1, 1)), PauliString.of((1, "Y"))) == 0.0

    @pytest.mark.parametrize("seed", range(10))
    def test_in_unit_interval(self, seed):
        rng = np.random.default_rng(200 + seed)
        val = expectation_pauli(random_state(5, rng), random_pauli(5, rng))
        assert -1.0 - 1e-12 <= val <= 1.0 + 1e-12

    def test_inner_product_conjugate_symmetry(self, rng):
        a, b = random_state(4, rng), random_state(4, rng)
        assert inner_product(a, b) == pytest.approx(np.conj(inner_product(b, a)))


class TestShotSampling:
    def test_definite_outcome_is_exact(self, rng):
        est = sample_pauli_measurement(
            basis_state((1,)), PauliString.of((1, "Z")), shots=17, rng=rng
        )
        assert est.mean == 1.0 and est.outcomes_plus == 17

    def test_seeded_reproducibility(self):
        state = basis_state((1,))
        p = PauliString.of((1, "X"))
        a = sample_pauli_measurement(state, p, 100, np.random.default_rng(7))
        b = sample_pauli_measurement(state, p, 100, np.random.default_rng(7))
        assert a == b

    def test_rejects_zero_shots(self, rng):
        with pytest.raises(ValueError):
            sample_pauli_measurement(basis_state((1,)), PauliString.of((1, "Z")), 0, rng)


class TestQuantumState:
    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            QuantumState(1, np.array([1.0, 1.0]))

    def test_copy_is_independent(self, rng):
        state = random_state(3, rng)
        clone = state.copy()
        clone.amplitudes[0] += 1.0
        assert state.amplitudes[0] != clone.amplitudes[0]
