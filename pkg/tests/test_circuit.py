"""Circuit construction, evaluation, layered builders, and JSON files."""

from __future__ import annotations

import numpy as np
import pytest

from qnnlab.circuit import (
    Bound,
    Circuit,
    Fixed,
    Gate,
    append_layers,
    apply_circuit,
    build_layered_readout_circuit,
    build_random_circuit,
    circuit_from_json,
    circuit_to_json,
    is_data_diagonal,
    load_circuit,
    predicted_label_value,
    save_circuit,
)
from qnnlab.sim import PauliString, basis_state


def single_x_readout(n: int = 1) -> Circuit:
    readout = n + 1
    return Circuit(
        num_qubits=readout,
        readout_qubit=readout,
        num_params=1,
        gates=(Gate(PauliString.of((readout, "X")), Bound(0)),),
    )


class TestCircuitValidation:
    def test_rejects_gate_outside_width(self):
        with pytest.raises(ValueError):
            Circuit(2, 2, 0, (Gate(PauliString.of((3, "X")), Fixed(0.1)),))

    def test_rejects_bad_param_index(self):
        with pytest.raises(ValueError):
            Circuit(2, 2, 1, (Gate(PauliString.of((1, "X")), Bound(1)),))

    def test_rejects_readout_out_of_range(self):
        with pytest.raises(ValueError):
            Circuit(2, 3, 0, ())


class TestEvaluation:
    def test_single_rotation_prediction_is_sin(self):
        """exp(i theta X) on |0> readout gives <Y> = sin(2 theta)."""
        c = single_x_readout()
        state = basis_state((1,), include_readout=True)
        for theta in (0.0, 0.3, -1.1, np.pi / 4):
            assert predicted_label_value(c, (theta,), state) == pytest.approx(
                np.sin(2 * theta), abs=1e-12
            )

    def test_wrong_param_count_rejected(self):
        c = single_x_readout()
        with pytest.raises(ValueError):
            apply_circuit(c, (0.1, 0.2), basis_state((1,), include_readout=True))

    def test_gates_apply_in_sequence_order(self):
        # On |0>: Z first is a pure phase, so X alone sets <Y> = sin(pi/2) = 1.
        # X first, then Z by pi/4 rotates the Y eigenstate onto the X axis.
        z_then_x = Circuit(
            1, 1, 0,
            (
                Gate(PauliString.of((1, "Z")), Fixed(np.pi / 4)),
                Gate(PauliString.of((1, "X")), Fixed(np.pi / 4)),
            ),
        )
        x_then_z = Circuit(1, 1, 0, tuple(reversed(z_then_x.gates)))
        state = basis_state((1,))
        assert predicted_label_value(z_then_x, (), state) == pytest.approx(1.0, abs=1e-12)
        assert predicted_label_value(x_then_z, (), state) == pytest.approx(0.0, abs=1e-12)

    def test_unit_norm_preserved_random_circuits(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            c = build_random_circuit(4, 30, rng)
            params = rng.uniform(-np.pi, np.pi, c.num_params)
            out = apply_circuit(c, params, basis_state((1, 1, 1, 1), include_readout=True))
            assert abs(out.norm_sq() - 1.0) < 1e-12


class TestLayeredBuilders:
    def test_zx_layer_shape(self):
        c = build_layered_readout_circuit(4, ["ZX"])
        assert c.num_params == 4 and len(c.gates) == 4
        assert all(g.pauli.terms[-1][0] == 5 for g in c.gates)

    def test_digit_ansatz_has_96_parameters(self):
        c = build_layered_readout_circuit(16, ["ZX", "XX", "ZX", "XX", "ZX", "XX"])
        assert c.num_params == 96

    def test_batch_ansatz_has_136_parameters(self):
        c = build_layered_readout_circuit(16, ["ZX", "ZZX"])
        assert c.num_params == 16 + 16 * 15 // 2 == 136
        assert is_data_diagonal(c)

    def test_append_layers_shifts_indices(self):
        base = build_layered_readout_circuit(8, ["ZX"])
        grown = append_layers(base, ["XX", "ZX"])
        assert grown.num_params == 24
        indices = [g.binding.param_index for g in grown.gates]
        assert indices == list(range(24))

    def test_append_preserves_base_behavior_with_zero_extras(self):
        rng = np.random.default_rng(5)
        base = build_layered_readout_circuit(3, ["ZX", "XX"])
        grown = append_layers(base, ["XX"])
        params = rng.uniform(-1, 1, base.num_params)
        grown_params = np.concatenate([params, np.zeros(3)])
        state = basis_state((1, -1, 1), include_readout=True)
        assert predicted_label_value(grown, grown_params, state) == pytest.approx(
            predicted_label_value(base, params, state), abs=1e-12
        )

    def test_rejects_unknown_layer(self):
        with pytest.raises(ValueError):
            build_layered_readout_circuit(4, ["XY"])


class TestDataDiagonal:
    def test_x_on_data_is_not_diagonal(self):
        c = build_layered_readout_circuit(4, ["XX"])
        assert not is_data_diagonal(c)

    def test_readout_x_allowed(self):
        c = single_x_readout(2)
        assert is_data_diagonal(c)


class TestRandomCircuit:
    def test_seeded_reproducibility(self):
        a = build_random_circuit(5, 20, np.random.default_rng(11))
        b = build_random_circuit(5, 20, np.random.default_rng(11))
        assert a == b

    def test_restrict_readout_pins_second_qubit(self):
        c = build_random_circuit(5, 40, np.random.default_rng(0), restrict_readout=True)
        for g in c.gates:
            if len(g.pauli.terms) == 2:
                assert g.pauli.terms[-1][0] == 6


class TestJsonFiles:
    def test_round_trip_preserves_circuit(self, tmp_path):
        rng = np.random.default_rng(9)
        c = build_random_circuit(4, 25, rng)
        path = tmp_path / "circuit.json"
        save_circuit(c, path)
        assert load_circuit(path) == c

    def test_round_trip_with_fixed_and_controls(self, tmp_path):
        c = Circuit(
            3, 3, 1,
            (
                Gate(PauliString.of((3, "X")), Fixed(0.25)),
                Gate(PauliString.of((3, "X")), Bound(0, scale=-2.0), frozenset({1, 2})),
            ),
        )
        path = tmp_path / "circuit.json"
        save_circuit(c, path)
        assert load_circuit(path) == c

    def test_dict_form_is_stable(self):
        c = single_x_readout()
        assert circuit_from_json(circuit_to_json(c)) == c
