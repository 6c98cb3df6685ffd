"""Benchmark the compiled kernels against the pure-python fallback.

Usage: python benchmarks/bench_kernels.py [--qubits N] [--repeats R]

Times the three hot operations (rotation, Pauli application, fused backward
step) and one end-to-end loss+gradient evaluation on the 96-parameter layered
circuit.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qnnlab import _kernels_py

try:
    from qnnlab import _kernels as _kernels_cy
except ImportError:
    _kernels_cy = None


def random_amps(num_qubits: int, rng: np.random.Generator) -> np.ndarray:
    amps = rng.normal(size=1 << num_qubits) + 1j * rng.normal(size=1 << num_qubits)
    return amps / np.linalg.norm(amps)


def time_op(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_kernels(num_qubits: int, repeats: int) -> None:
    rng = np.random.default_rng(0)
    phi = random_amps(num_qubits, rng)
    lam = random_amps(num_qubits, rng)
    flip, yz, phase = 0b101, 0b110, 1j  # an XYZ-flavoured string
    c, s = np.cos(0.37), np.sin(0.37)

    backends = [("python", _kernels_py)]
    if _kernels_cy is not None:
        backends.append(("cython", _kernels_cy))

    print(f"\nper-kernel timings at {num_qubits} qubits "
          f"(best of {repeats}, state of {1 << num_qubits} amplitudes)")
    header = f"{'operation':<24}" + "".join(f"{name:>12}" for name, _ in backends)
    print(header)
    rows = {
        "apply_rotation_inplace": lambda mod, a: mod.apply_rotation_inplace(
            a, flip, yz, phase, c, s, 0
        ),
        "apply_pauli_inplace": lambda mod, a: mod.apply_pauli_inplace(
            a, flip, yz, phase, 0
        ),
        "backward_step_inplace": lambda mod, a: mod.backward_step_inplace(
            a, lam.copy(), flip, yz, phase, c, s, 0
        ),
    }
    times: dict[str, dict[str, float]] = {}
    for label, op in rows.items():
        times[label] = {}
        line = f"{label:<24}"
        for name, mod in backends:
            t = time_op(lambda: op(mod, phi.copy()), repeats)
            times[label][name] = t
            line += f"{t * 1e3:>10.3f}ms"
        print(line)
    if _kernels_cy is not None:
        print("speedups (python / cython): " + ", ".join(
            f"{label.split('_')[1]} {times[label]['python'] / times[label]['cython']:.1f}x"
            for label in rows
        ))


def bench_gradient(num_data_qubits: int, repeats: int) -> None:
    import os

    from qnnlab.circuit import build_layered_readout_circuit
    from qnnlab.objective import loss_and_gradient
    from qnnlab.sim import basis_state
    from qnnlab import kernels

    rng = np.random.default_rng(1)
    c = build_layered_readout_circuit(
        num_data_qubits, ["ZX", "XX", "ZX", "XX", "ZX", "XX"]
    )
    params = rng.uniform(-0.5, 0.5, c.num_params)
    bits = tuple(int(b) for b in 1 - 2 * rng.integers(0, 2, num_data_qubits))
    sample = (basis_state(bits, include_readout=True), 1)
    t = time_op(lambda: loss_and_gradient(c, params, sample), repeats)
    print(
        f"\nend-to-end loss+gradient, {c.num_params}-parameter circuit at "
        f"{num_data_qubits + 1} qubits [{kernels.BACKEND} backend]: {t:.3f}s"
    )
    print("(set QNNLAB_PURE_PYTHON=1 to rerun on the fallback backend)")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--qubits", type=int, default=17)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    bench_kernels(args.qubits, args.repeats)
    bench_gradient(args.qubits - 1, args.repeats)
