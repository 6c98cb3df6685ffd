"""Parameterized circuits of Pauli-rotation gates with a designated readout.

A gate applies exp(i * angle * Sigma), optionally conditioned on a set of
control qubits being in |1> (identity elsewhere).  Gates are applied in
sequence order: gates[0] acts first.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .kernels import apply_rotation_inplace
from .sim import PauliAxis, PauliString, QuantumState, _ctrl_mask, expectation_pauli


@dataclass(frozen=True)
class Fixed:
    angle: float


@dataclass(frozen=True)
class Bound:
    param_index: int
    scale: float = 1.0


AngleBinding = Fixed | Bound


@dataclass(frozen=True)
class Gate:
    pauli: PauliString
    binding: AngleBinding
    controls: frozenset[int] = frozenset()


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    readout_qubit: int
    num_params: int
    gates: tuple[Gate, ...]
    readout_axis: PauliAxis = PauliAxis.Y

    def __post_init__(self):
        if self.readout_qubit > self.num_qubits:
            raise ValueError("readout qubit out of range")
        for g in self.gates:
            if g.pauli.max_qubit > self.num_qubits:
                raise ValueError("gate acts outside the circuit")
            if any(q < 1 or q > self.num_qubits for q in g.controls):
                raise ValueError("control qubit out of range")
            if isinstance(g.binding, Bound) and not (
                0 <= g.binding.param_index < self.num_params
            ):
                raise ValueError("parameter index out of range")

    @property
    def num_data_qubits(self) -> int:
        return self.num_qubits - 1

    def readout_pauli(self) -> PauliString:
        return PauliString.of((self.readout_qubit, self.readout_axis))


@lru_cache(maxsize=256)
def _compiled_gates(c: Circuit):
    """Per-gate (flip, yz, phase, ctrl, binding) tuples, computed once."""
    out = []
    for g in c.gates:
        flip, yz, phase = g.pauli.masks()
        out.append((flip, yz, phase, _ctrl_mask(g.controls), g.binding))
    return tuple(out)


def gate_angle(binding: AngleBinding, params: Sequence[float]) -> float:
    if isinstance(binding, Fixed):
        return binding.angle
    return binding.scale * params[binding.param_index]


def apply_circuit_inplace(c: Circuit, params: Sequence[float], amps: np.ndarray) -> None:
    for flip, yz, phase, ctrl, binding in _compiled_gates(c):
        theta = gate_angle(binding, params)
        apply_rotation_inplace(amps, flip, yz, phase, math.cos(theta), math.sin(theta), ctrl)


def apply_circuit(c: Circuit, params: Sequence[float], state: QuantumState) -> QuantumState:
    """U(params)|state>, gates applied in sequence order."""
    if len(params) != c.num_params:
        raise ValueError("wrong number of parameters")
    if state.num_qubits != c.num_qubits:
        raise ValueError("state width mismatch")
    out = state.copy()
    apply_circuit_inplace(c, params, out.amplitudes)
    return out


def predicted_label_value(
    c: Circuit, params: Sequence[float], input_state: QuantumState
) -> float:
    """<in|U* Sigma_readout U|in>, the network's predictor in [-1, 1]."""
    return expectation_pauli(apply_circuit(c, params, input_state), c.readout_pauli())


def is_data_diagonal(c: Circuit) -> bool:
    """True iff every gate uses only Z on data qubits (controls are diagonal)."""
    for g in c.gates:
        for q, axis in g.pauli.terms:
            if q != c.readout_qubit and axis is not PauliAxis.Z:
                return False
    return True


_LAYER_KINDS = ("ZX", "XX", "ZZX")


def build_layered_readout_circuit(n: int, layer_spec: Sequence[str]) -> Circuit:
    """Stack layers of data-qubit-to-readout rotations.

    ZX / XX layers contribute one gate per data qubit; a ZZX layer one gate
    per unordered data-qubit pair (lexicographic order).  One fresh parameter
    per gate, scale 1.
    """
    if n < 1:
        raise ValueError("need at least one data qubit")
    readout = n + 1
    gates: list[Gate] = []
    k = 0
    for kind in layer_spec:
        if kind not in _LAYER_KINDS:
            raise ValueError(f"unknown layer kind {kind!r}")
        if kind == "ZZX":
            for i in range(1, n + 1):
                for j in range(i + 1, n + 1):
                    p = PauliString.of((i, "Z"), (j, "Z"), (readout, "X"))
                    gates.append(Gate(p, Bound(k)))
                    k += 1
        else:
            axis = "Z" if kind == "ZX" else "X"
            for i in range(1, n + 1):
                p = PauliString.of((i, axis), (readout, "X"))
                gates.append(Gate(p, Bound(k)))
                k += 1
    return Circuit(num_qubits=readout, readout_qubit=readout, num_params=k, gates=tuple(gates))


def append_layers(c: Circuit, layer_spec: Sequence[str]) -> Circuit:
    """Extend a circuit with fresh-parameter readout layers."""
    extra = build_layered_readout_circuit(c.num_data_qubits, layer_spec)
    shifted = tuple(
        Gate(g.pauli, Bound(g.binding.param_index + c.num_params, g.binding.scale))
        for g in extra.gates
    )
    return Circuit(
        num_qubits=c.num_qubits,
        readout_qubit=c.readout_qubit,
        num_params=c.num_params + extra.num_params,
        gates=c.gates + shifted,
        readout_axis=c.readout_axis,
    )


ONE_QUBIT_KINDS = ("X", "Y", "Z")
TWO_QUBIT_KINDS = ("XY", "YZ", "ZX", "XX", "YY", "ZZ")
GATE_POOL = ONE_QUBIT_KINDS + TWO_QUBIT_KINDS


def build_random_circuit(
    n: int,
    length: int,
    rng: np.random.Generator,
    gate_pool: Sequence[str] = GATE_POOL,
    restrict_readout: bool = False,
) -> Circuit:
    """Uniformly random gate kinds and placements, one parameter per gate.

    ``restrict_readout`` pins the second qubit of every two-qubit gate to the
    readout (first drawn from the data qubits), the variant used for the
    layered digit classifier ansatz search.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    readout = n + 1
    if any(len(k) == 2 for k in gate_pool) and readout < 2:
        raise ValueError("two-qubit gates need at least two qubits")
    gates = []
    for k in range(length):
        kind = gate_pool[int(rng.integers(len(gate_pool)))]
        if len(kind) == 1:
            q = int(rng.integers(1, readout + 1))
            p = PauliString.of((q, kind))
        else:
            if restrict_readout:
                q1 = int(rng.integers(1, n + 1))
                q2 = readout
            else:
                q1, q2 = rng.choice(readout, size=2, replace=False) + 1
                q1, q2 = int(q1), int(q2)
            p = PauliString.of((q1, kind[0]), (q2, kind[1]))
        gates.append(Gate(p, Bound(k)))
    return Circuit(
        num_qubits=readout, readout_qubit=readout, num_params=length, gates=tuple(gates)
    )


# ---------------------------------------------------------------------------
# JSON circuit files


def _binding_to_json(b: AngleBinding) -> dict:
    if isinstance(b, Fixed):
        return {"fixed": b.angle}
    return {"param": b.param_index, "scale": b.scale}


def _binding_from_json(d: dict) -> AngleBinding:
    if "fixed" in d:
        return Fixed(float(d["fixed"]))
    return Bound(int(d["param"]), float(d.get("scale", 1.0)))


def circuit_to_json(c: Circuit) -> dict:
    gates = []
    for g in c.gates:
        entry = {
            "pauli": [[q, axis.value] for q, axis in g.pauli.terms],
            "binding": _binding_to_json(g.binding),
        }
        if g.controls:
            entry["controls"] = sorted(g.controls)
        gates.append(entry)
    return {
        "num_qubits": c.num_qubits,
        "readout_qubit": c.readout_qubit,
        "readout_axis": c.readout_axis.value,
        "num_params": c.num_params,
        "gates": gates,
    }


def circuit_from_json(d: dict) -> Circuit:
    gates = tuple(
        Gate(
            PauliString.of(*[(int(q), a) for q, a in entry["pauli"]]),
            _binding_from_json(entry["binding"]),
            frozenset(entry.get("controls", ())),
        )
        for entry in d["gates"]
    )
    return Circuit(
        num_qubits=int(d["num_qubits"]),
        readout_qubit=int(d["readout_qubit"]),
        num_params=int(d["num_params"]),
        gates=gates,
        readout_axis=PauliAxis(d["readout_axis"]),
    )


def save_circuit(c: Circuit, path) -> None:
    with open(path, "w") as f:
        json.dump(circuit_to_json(c), f, indent=1)


def load_circuit(path) -> Circuit:
    with open(path) as f:
        return circuit_from_json(json.load(f))
