"""Compiles label-function descriptions into circuits and computes true labels.

Supported label families: arbitrary Boolean truth tables (via the Reed-Muller
/ algebraic normal form), subset parity, subset majority, and the sign of a
ZZ-Ising Hamiltonian expectation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import Bound, Circuit, Fixed, Gate
from .sim import PauliString, QuantumState, expectation_pauli

LABEL_TIE_TOL = 1e-12


class AmbiguousLabelError(ValueError):
    """Hamiltonian expectation too close to zero to assign a sign label."""


@dataclass(frozen=True)
class BooleanTruthTable:
    """0/1 values indexed by the b-bit pattern (b_i in bit position i-1)."""

    n: int
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != 1 << self.n:
            raise ValueError("table length must be 2^n")
        if any(v not in (0, 1) for v in self.values):
            raise ValueError("table entries must be 0 or 1")

    @classmethod
    def from_hex(cls, n: int, hex_string: str) -> "BooleanTruthTable":
        """Hex encoding of the value bitstring, entry k in bit k."""
        number = int(hex_string, 16)
        return cls(n, tuple((number >> k) & 1 for k in range(1 << n)))

    def to_hex(self) -> str:
        number = sum(v << k for k, v in enumerate(self.values))
        return format(number, "x")


@dataclass(frozen=True)
class ReedMullerForm:
    """GF(2) polynomial: b(x) = XOR over monomials of prod_{i in S} b_i."""

    n: int
    monomials: frozenset[frozenset[int]]

    def evaluate(self, b_bits: Sequence[int]) -> int:
        acc = 0
        for mono in self.monomials:
            if all(b_bits[i - 1] for i in mono):
                acc ^= 1
        return acc


@dataclass(frozen=True)
class SubsetSpec:
    n: int
    members: frozenset[int]

    def __post_init__(self):
        if not self.members:
            raise ValueError("subset must be non-empty")
        if any(j < 1 or j > self.n for j in self.members):
            raise ValueError("subset members out of range")


@dataclass(frozen=True)
class IsingHamiltonian:
    """Sum over graph edges of J_ij Z_i Z_j with J_ij = +/-1."""

    n: int
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        seen = set()
        for i, j, coupling in self.edges:
            if not (1 <= i < j <= self.n):
                raise ValueError("edges must satisfy 1 <= i < j <= n")
            if coupling not in (+1, -1):
                raise ValueError("couplings must be +1 or -1")
            if (i, j) in seen:
                raise ValueError("duplicate edge")
            seen.add((i, j))

    @property
    def num_terms(self) -> int:
        return len(self.edges)


def reed_muller_transform(t: BooleanTruthTable) -> ReedMullerForm:
    """GF(2) Moebius transform of a truth table (the unique ANF)."""
    a = np.array(t.values, dtype=np.uint8)
    for i in range(t.n):
        step = 1 << i
        idx = np.arange(1 << t.n)
        hi = idx[(idx & step) != 0]
        a[hi] ^= a[hi ^ step]
    monomials = frozenset(
        frozenset(i + 1 for i in range(t.n) if mask & (1 << i))
        for mask in range(1 << t.n)
        if a[mask]
    )
    return ReedMullerForm(t.n, monomials)


def _sorted_monomials(rm: ReedMullerForm):
    return sorted(rm.monomials, key=lambda s: (len(s), sorted(s)))


def compile_label_circuit(rm: ReedMullerForm) -> Circuit:
    """Exact representation circuit for the label l = 1 - 2b on n+1 qubits.

    One fixed pi/4 X-rotation on the readout, then per monomial a -pi/2
    X-rotation controlled on the monomial's bits being 1.
    """
    readout = rm.n + 1
    x_readout = PauliString.of((readout, "X"))
    gates = [Gate(x_readout, Fixed(math.pi / 4))]
    for mono in _sorted_monomials(rm):
        gates.append(Gate(x_readout, Fixed(-math.pi / 2), frozenset(mono)))
    return Circuit(num_qubits=readout, readout_qubit=readout, num_params=0, gates=tuple(gates))


def subset_parity_circuit(spec: SubsetSpec, parameterized: bool = False) -> Circuit:
    """Fixed pi/4 X on the readout, then one controlled X-rotation per bit.

    Parameterized: gate j carries angle -theta_j on the b_j = 1 subspace.
    Fixed: theta_j = pi/2 for members, 0 otherwise (exact subset parity).
    """
    readout = spec.n + 1
    x_readout = PauliString.of((readout, "X"))
    gates = [Gate(x_readout, Fixed(math.pi / 4))]
    for j in range(1, spec.n + 1):
        if parameterized:
            binding = Bound(j - 1, scale=-1.0)
        else:
            binding = Fixed(-math.pi / 2 if j in spec.members else 0.0)
        gates.append(Gate(x_readout, binding, frozenset({j})))
    return Circuit(
        num_qubits=readout,
        readout_qubit=readout,
        num_params=spec.n if parameterized else 0,
        gates=tuple(gates),
    )


def subset_majority_circuit(
    spec: SubsetSpec, beta: float, parameterized: bool = False
) -> Circuit:
    """One Z_j X_readout rotation per data qubit; prediction sin(beta sum a_j z_j).

    Parameterized gates carry angle (beta/2) * theta_j; the fixed form pins
    theta_j to the subset indicator.  Exact majority thresholding needs an
    odd subset.
    """
    if not parameterized and len(spec.members) % 2 == 0:
        raise ValueError("majority label needs an odd subset size")
    readout = spec.n + 1
    gates = []
    for j in range(1, spec.n + 1):
        p = PauliString.of((j, "Z"), (readout, "X"))
        if parameterized:
            binding = Bound(j - 1, scale=beta / 2)
        else:
            binding = Fixed(beta / 2 if j in spec.members else 0.0)
        gates.append(Gate(p, binding))
    return Circuit(
        num_qubits=readout,
        readout_qubit=readout,
        num_params=spec.n if parameterized else 0,
        gates=tuple(gates),
    )


def hamiltonian_label_circuit(
    h: IsingHamiltonian, parameterized: bool = False, beta: float = 0.05
) -> Circuit:
    """One Z_i Z_j X_readout rotation per edge; fixed angles beta * J_ij
    realize exp(i beta H X_readout)."""
    readout = h.n + 1
    gates = []
    for k, (i, j, coupling) in enumerate(h.edges):
        p = PauliString.of((i, "Z"), (j, "Z"), (readout, "X"))
        binding = Bound(k) if parameterized else Fixed(beta * coupling)
        gates.append(Gate(p, binding))
    return Circuit(
        num_qubits=readout,
        readout_qubit=readout,
        num_params=h.num_terms if parameterized else 0,
        gates=tuple(gates),
    )


def hamiltonian_expectation(h: IsingHamiltonian, state: QuantumState) -> float:
    """<psi|H|psi> from the ZZ term expectations (readout qubit ignored)."""
    total = 0.0
    for i, j, coupling in h.edges:
        total += coupling * expectation_pauli(state, PauliString.of((i, "Z"), (j, "Z")))
    return total


def parity_label(spec: SubsetSpec, bits: Sequence[int]) -> int:
    out = 1
    for j in spec.members:
        out *= bits[j - 1]
    return out


def majority_label(spec: SubsetSpec, bits: Sequence[int]) -> int:
    if len(spec.members) % 2 == 0:
        raise ValueError("majority label needs an odd subset size")
    return 1 if sum(bits[j - 1] for j in spec.members) > 0 else -1


def truth_table_label(t: BooleanTruthTable, bits: Sequence[int]) -> int:
    index = sum(1 << i for i, z in enumerate(bits) if z == -1)
    return 1 - 2 * t.values[index]


def hamiltonian_label(h: IsingHamiltonian, state: QuantumState) -> int:
    value = hamiltonian_expectation(h, state)
    if abs(value) <= LABEL_TIE_TOL:
        raise AmbiguousLabelError("<H> too close to zero")
    return 1 if value > 0 else -1


def true_label(kind: str, descriptor, inp) -> int:
    """Dispatch on label family; `inp` is a +/-1 bitstring or a QuantumState."""
    if kind == "parity":
        return parity_label(descriptor, inp)
    if kind == "majority":
        return majority_label(descriptor, inp)
    if kind == "truth-table":
        return truth_table_label(descriptor, inp)
    if kind == "hamiltonian":
        return hamiltonian_label(descriptor, inp)
    raise ValueError(f"unknown label kind {kind!r}")


def save_hamiltonian(h: IsingHamiltonian, path) -> None:
    with open(path, "w") as f:
        for i, j, coupling in h.edges:
            f.write(f"{i} {j} {coupling:+d}\n")


def load_hamiltonian(n: int, path) -> IsingHamiltonian:
    edges = []
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                i, j, coupling = line.split()
                edges.append((int(i), int(j), int(coupling)))
            except ValueError as e:
                raise ValueError(f"{path}:{lineno}: bad edge line {line!r}") from e
    return IsingHamiltonian(n, tuple(edges))
