"""Dense state-vector simulation of Pauli strings and Pauli rotations.

Conventions (fixed for file-format stability):

* qubit ``i`` (1-based) occupies bit position ``i-1`` of the amplitude
  index, so qubit 1 is least significant;
* bit variables: ``z = +1`` maps to |0> and ``z = -1`` to |1>
  (``b = (1 - z) / 2``);
* Pauli matrices are the standard X = [[0,1],[1,0]], Y = [[0,-i],[i,0]],
  Z = [[1,0],[0,-1]];
* the readout qubit is initialized in the Z=+1 eigenstate |0>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .kernels import apply_pauli_inplace, apply_rotation_inplace

NORM_TOL = 1e-12


class PauliAxis(str, Enum):
    X = "X"
    Y = "Y"
    Z = "Z"


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis on distinct 1-based qubits."""

    terms: tuple[tuple[int, PauliAxis], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("PauliString must be non-empty")
        qubits = [q for q, _ in self.terms]
        if any(q < 1 for q in qubits):
            raise ValueError("qubit indices are 1-based")
        if len(set(qubits)) != len(qubits):
            raise ValueError("qubit indices must be distinct")

    @classmethod
    def of(cls, *terms: tuple[int, PauliAxis | str]) -> "PauliString":
        return cls(tuple((q, PauliAxis(a)) for q, a in terms))

    @property
    def max_qubit(self) -> int:
        return max(q for q, _ in self.terms)

    def masks(self) -> tuple[int, int, complex]:
        """(flip, yz, phase) encoding; see kernels module."""
        flip = 0
        yz = 0
        n_y = 0
        for q, axis in self.terms:
            bit = 1 << (q - 1)
            if axis is PauliAxis.X:
                flip |= bit
            elif axis is PauliAxis.Y:
                flip |= bit
                yz |= bit
                n_y += 1
            else:
                yz |= bit
        phase = (1j) ** (n_y % 4)
        return flip, yz, complex(phase)


@dataclass
class QuantumState:
    """Unit-norm complex amplitude vector over 2^num_qubits basis states."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("need at least one qubit")
        self.amplitudes = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValueError("amplitude length must be 2^num_qubits")
        if abs(self.norm_sq() - 1.0) > 1e-10:
            raise ValueError("state must be normalized")

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def copy(self) -> "QuantumState":
        out = object.__new__(QuantumState)
        out.num_qubits = self.num_qubits
        out.amplitudes = self.amplitudes.copy()
        return out


@dataclass(frozen=True)
class ShotEstimate:
    """Mean of `shots` observed +/-1 outcomes."""

    mean: float
    shots: int
    outcomes_plus: int

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be >= 1")


def _ctrl_mask(controls: Iterable[int]) -> int:
    mask = 0
    for q in controls:
        mask |= 1 << (q - 1)
    return mask


def _check_support(state: QuantumState, p: PauliString, controls: Iterable[int] = ()):
    if p.max_qubit > state.num_qubits:
        raise ValueError("Pauli string acts outside the state")
    support = {q for q, _ in p.terms}
    for q in controls:
        if q < 1 or q > state.num_qubits:
            raise ValueError("control qubit out of range")
        if q in support:
            raise ValueError("control qubit overlaps Pauli support")


def basis_state(bits: Sequence[int], include_readout: bool = False) -> QuantumState:
    """Computational basis state for a +/-1 string, optional readout |0>."""
    if len(bits) == 0:
        raise ValueError("empty bit sequence")
    index = 0
    for i, z in enumerate(bits):
        if z == -1:
            index |= 1 << i
        elif z != 1:
            raise ValueError("bits must be +1 or -1")
    n = len(bits) + (1 if include_readout else 0)
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[index] = 1.0
    state = object.__new__(QuantumState)
    state.num_qubits = n
    state.amplitudes = amps
    return state


def apply_pauli(
    state: QuantumState,
    p: PauliString,
    controls: Iterable[int] = (),
    zero_outside: bool = False,
) -> QuantumState:
    """Sigma|state>; with controls, acts only where all control bits are 1.

    ``zero_outside`` applies the projected operator (B_ctrl * Sigma) instead
    of the controlled one: amplitudes outside the control subspace are zeroed.
    This is what gradient insertion needs for controlled rotations.
    """
    controls = tuple(controls)
    _check_support(state, p, controls)
    out = state.copy()
    flip, yz, phase = p.masks()
    ctrl = _ctrl_mask(controls)
    if zero_outside and ctrl:
        idx = np.arange(out.amplitudes.shape[0], dtype=np.uint64)
        out.amplitudes[(idx & np.uint64(ctrl)) != np.uint64(ctrl)] = 0.0
    apply_pauli_inplace(out.amplitudes, flip, yz, phase, ctrl)
    return out


def apply_pauli_rotation(
    state: QuantumState,
    p: PauliString,
    angle: float,
    controls: Iterable[int] = (),
) -> QuantumState:
    """exp(i*angle*Sigma)|state> = cos|state> + i sin Sigma|state>."""
    controls = tuple(controls)
    _check_support(state, p, controls)
    out = state.copy()
    flip, yz, phase = p.masks()
    apply_rotation_inplace(
        out.amplitudes, flip, yz, phase, math.cos(angle), math.sin(angle), _ctrl_mask(controls)
    )
    return out


def expectation_pauli(state: QuantumState, p: PauliString) -> float:
    """<state|Sigma|state>, real in [-1, 1]."""
    sigma_psi = apply_pauli(state, p)
    val = np.vdot(state.amplitudes, sigma_psi.amplitudes)
    if abs(val.imag) > 1e-9:
        raise AssertionError(f"expectation not real: {val}")
    return float(val.real)


def inner_product(a: QuantumState, b: QuantumState) -> complex:
    """<a|b>."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("dimension mismatch")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def sample_pauli_measurement(
    state: QuantumState, p: PauliString, shots: int, rng: np.random.Generator
) -> ShotEstimate:
    """Draw `shots` +/-1 outcomes with P(+1) = (1 + <Sigma>)/2."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    exact = expectation_pauli(state, p)
    p_plus = min(1.0, max(0.0, 0.5 * (1.0 + exact)))
    plus = int(rng.binomial(shots, p_plus))
    return ShotEstimate(mean=(2 * plus - shots) / shots, shots=shots, outcomes_plus=plus)
