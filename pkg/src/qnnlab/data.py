"""Dataset construction: labeled bitstrings, IDX image ingestion, superposition
batch states, random product states, and random regular coupling graphs."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .compiler import IsingHamiltonian
from .sim import QuantumState, basis_state


@dataclass(frozen=True)
class LabeledSample:
    bits: tuple[int, ...]
    label: int
    multiplicity: int = 1

    def __post_init__(self):
        if any(z not in (+1, -1) for z in self.bits):
            raise ValueError("bits must be +1 or -1")
        if self.label not in (+1, -1):
            raise ValueError("label must be +1 or -1")
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be >= 1")


@dataclass(frozen=True)
class LabeledDataset:
    n: int
    samples: tuple[LabeledSample, ...]

    def __post_init__(self):
        if any(len(s.bits) != self.n for s in self.samples):
            raise ValueError("all bitstrings must have length n")

    @property
    def total_count(self) -> int:
        return sum(s.multiplicity for s in self.samples)

    def distinct_strings(self) -> int:
        return len({s.bits for s in self.samples})


def _bits_from_index(index: int, n: int) -> tuple[int, ...]:
    return tuple(-1 if (index >> i) & 1 else +1 for i in range(n))


def exhaustive_dataset(n: int, label_fn: Callable) -> LabeledDataset:
    """All 2^n strings, labeled by `label_fn(bits) -> +/-1`."""
    if n > 20:
        raise ValueError("exhaustive enumeration capped at n=20")
    samples = []
    for index in range(1 << n):
        bits = _bits_from_index(index, n)
        samples.append(LabeledSample(bits, label_fn(bits)))
    return LabeledDataset(n, tuple(samples))


def sampled_dataset(
    n: int, label_fn: Callable, count: int, rng: np.random.Generator
) -> LabeledDataset:
    samples = []
    for _ in range(count):
        bits = tuple(1 - 2 * int(b) for b in rng.integers(0, 2, size=n))
        samples.append(LabeledSample(bits, label_fn(bits)))
    return LabeledDataset(n, tuple(samples))


def aggregate(ds: LabeledDataset) -> LabeledDataset:
    """Merge identical (bits, label) pairs into multiplicities."""
    counts: dict[tuple, int] = {}
    for s in ds.samples:
        key = (s.bits, s.label)
        counts[key] = counts.get(key, 0) + s.multiplicity
    samples = tuple(
        LabeledSample(bits, label, mult) for (bits, label), mult in sorted(counts.items())
    )
    return LabeledDataset(ds.n, samples)


def remove_ambiguous(ds: LabeledDataset) -> LabeledDataset:
    """Drop every bitstring that occurs with both labels."""
    labels_seen: dict[tuple, set[int]] = {}
    for s in ds.samples:
        labels_seen.setdefault(s.bits, set()).add(s.label)
    kept = tuple(s for s in ds.samples if len(labels_seen[s.bits]) == 1)
    return LabeledDataset(ds.n, kept)


# ---------------------------------------------------------------------------
# IDX (MNIST-format) ingestion

_CELL = 7  # 28x28 -> 4x4 by averaging 7x7 blocks
_THRESHOLD = 0.5 * 255


def _read_idx_images(path) -> np.ndarray:
    with open(path, "rb") as f:
        magic, count, rows, cols = struct.unpack(">IIII", f.read(16))
        if magic != 2051:
            raise ValueError(f"{path}: bad IDX image magic {magic}")
        raw = f.read(count * rows * cols)
    if len(raw) != count * rows * cols:
        raise ValueError(f"{path}: truncated IDX image file")
    return np.frombuffer(raw, dtype=np.uint8).reshape(count, rows, cols)


def _read_idx_labels(path) -> np.ndarray:
    with open(path, "rb") as f:
        magic, count = struct.unpack(">II", f.read(8))
        if magic != 2049:
            raise ValueError(f"{path}: bad IDX label magic {magic}")
        raw = f.read(count)
    if len(raw) != count:
        raise ValueError(f"{path}: truncated IDX label file")
    return np.frombuffer(raw, dtype=np.uint8)


def downsample_image(image: np.ndarray) -> tuple[int, ...]:
    """28x28 grayscale -> 16 z-bits: 7x7 average pooling, threshold at 128.

    A bright (inked) cell maps to b=1, i.e. z=-1.
    """
    if image.shape != (28, 28):
        raise ValueError("expected a 28x28 image")
    pooled = image.astype(np.float64).reshape(4, _CELL, 4, _CELL).mean(axis=(1, 3))
    return tuple(-1 if v >= _THRESHOLD else +1 for v in pooled.ravel())


def ingest_mnist(images_path, labels_path, digit_a: int, digit_b: int) -> LabeledDataset:
    """Keep images of the two digits (a -> +1, b -> -1), downsample to 16 bits,
    aggregate identical strings into multiplicities."""
    if digit_a == digit_b:
        raise ValueError("digits must differ")
    images = _read_idx_images(images_path)
    labels = _read_idx_labels(labels_path)
    if len(images) != len(labels):
        raise ValueError("image/label count mismatch")
    samples = []
    for image, digit in zip(images, labels):
        if digit == digit_a:
            label = +1
        elif digit == digit_b:
            label = -1
        else:
            continue
        samples.append(LabeledSample(downsample_image(image), label))
    return aggregate(LabeledDataset(16, tuple(samples)))


# ---------------------------------------------------------------------------
# Quantum inputs

@dataclass(frozen=True)
class SuperpositionSpec:
    phases: Mapping[tuple[int, ...], float] = None
    weighting: str = "multiplicity"

    def phase_of(self, bits) -> float:
        if self.phases is None:
            return 0.0
        return self.phases.get(tuple(bits), 0.0)


def build_superposition(
    ds: LabeledDataset, label: int, spec: SuperpositionSpec = SuperpositionSpec()
) -> QuantumState:
    """Normalized sum of e^{i phi_z} w_z |z, readout=0> over strings with the
    given label; w_z is the multiplicity (or 1 under uniform weighting)."""
    amps = np.zeros(1 << (ds.n + 1), dtype=np.complex128)
    found = False
    for s in ds.samples:
        if s.label != label:
            continue
        found = True
        index = sum(1 << i for i, z in enumerate(s.bits) if z == -1)
        weight = s.multiplicity if spec.weighting == "multiplicity" else 1
        amps[index] += weight * np.exp(1j * spec.phase_of(s.bits))
    if not found:
        raise ValueError(f"no samples with label {label:+d}")
    amps /= np.linalg.norm(amps)
    return QuantumState(ds.n + 1, amps)


def product_state_from_angles(angles: Sequence[float]) -> QuantumState:
    """Per-qubit X=+1 eigenstates rotated about y: exp(i phi Y) (|0>+|1>)/sqrt2,
    with the readout appended in |0>."""
    amps = np.ones(1, dtype=np.complex128)
    for phi in angles:  # qubit 1 ends least significant
        c, s = np.cos(phi), np.sin(phi)
        single = np.array([c + s, c - s], dtype=np.complex128) / np.sqrt(2)
        amps = np.kron(single, amps)
    full = np.concatenate([amps, np.zeros_like(amps)])
    return QuantumState(len(angles) + 1, full)


def random_product_state(n: int, rng: np.random.Generator) -> QuantumState:
    return product_state_from_angles(rng.uniform(0.0, 2 * np.pi, size=n))


# ---------------------------------------------------------------------------
# Random regular graphs

@dataclass(frozen=True)
class RegularGraph:
    n: int
    degree: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        deg = {v: 0 for v in range(1, self.n + 1)}
        seen = set()
        for i, j in self.edges:
            if not (1 <= i < j <= self.n):
                raise ValueError("edges must satisfy 1 <= i < j <= n")
            if (i, j) in seen:
                raise ValueError("multi-edge")
            seen.add((i, j))
            deg[i] += 1
            deg[j] += 1
        if any(d != self.degree for d in deg.values()):
            raise ValueError("graph is not regular")


def random_regular_graph(n: int, degree: int, rng: np.random.Generator) -> RegularGraph:
    """Pairing-model generation with rejection of self-loops and multi-edges."""
    if degree >= n or (n * degree) % 2 != 0:
        raise ValueError("infeasible degree sequence")
    while True:
        stubs = np.repeat(np.arange(1, n + 1), degree)
        rng.shuffle(stubs)
        pairs = stubs.reshape(-1, 2)
        edges = set()
        ok = True
        for i, j in pairs:
            i, j = int(min(i, j)), int(max(i, j))
            if i == j or (i, j) in edges:
                ok = False
                break
            edges.add((i, j))
        if ok:
            return RegularGraph(n, degree, tuple(sorted(edges)))


def random_ising_hamiltonian(n: int, degree: int, rng: np.random.Generator) -> IsingHamiltonian:
    """Random regular coupling graph with independent +/-1 couplings."""
    graph = random_regular_graph(n, degree, rng)
    couplings = rng.choice([1, -1], size=len(graph.edges))
    return IsingHamiltonian(
        n, tuple((i, j, int(c)) for (i, j), c in zip(graph.edges, couplings))
    )


# ---------------------------------------------------------------------------
# Dataset text files: "bitstring<TAB>label<TAB>multiplicity" per line,
# bit char '0' <-> z=+1, '1' <-> z=-1.

def save_dataset(ds: LabeledDataset, path) -> None:
    with open(path, "w") as f:
        for s in ds.samples:
            bitstr = "".join("1" if z == -1 else "0" for z in s.bits)
            label = "+1" if s.label == 1 else "-1"
            f.write(f"{bitstr}\t{label}\t{s.multiplicity}\n")


def load_dataset(path) -> LabeledDataset:
    samples = []
    n = None
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                bitstr, label_str, mult_str = line.split("\t")
                if label_str not in ("+1", "-1"):
                    raise ValueError(f"bad label {label_str!r}")
                bits = tuple(-1 if ch == "1" else +1 if ch == "0" else None for ch in bitstr)
                if None in bits:
                    raise ValueError("bad bit character")
                samples.append(LabeledSample(bits, int(label_str), int(mult_str)))
            except ValueError as e:
                raise ValueError(f"{path}:{lineno}: {e}") from e
            if n is None:
                n = len(bits)
    if n is None:
        raise ValueError(f"{path}: empty dataset file")
    return LabeledDataset(n, tuple(samples))


def basis_inputs(ds: LabeledDataset) -> list[tuple[QuantumState, int, int]]:
    """(input state, label, multiplicity) triples with the readout appended."""
    return [
        (basis_state(s.bits, include_readout=True), s.label, s.multiplicity)
        for s in ds.samples
    ]
