"""Sample loss, empirical risk (sample-average and superposition forms),
gradient procedures (analytic two-sweep, symmetric finite difference,
ancilla-interference shot protocol), and closed-form parity oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import Bound, Circuit, apply_circuit, gate_angle, predicted_label_value
from .data import LabeledDataset, LabeledSample
from .kernels import (
    apply_pauli_inplace,
    apply_rotation_inplace,
    backward_step_inplace,
)
from .sim import QuantumState, _ctrl_mask, basis_state

FD_EPSILON_DEFAULT = 1e-4


@dataclass(frozen=True)
class GradientVector:
    components: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "components", np.asarray(self.components, dtype=np.float64)
        )

    @property
    def norm_sq(self) -> float:
        return float(np.dot(self.components, self.components))


def _as_state_and_label(c: Circuit, sample) -> tuple[QuantumState, int]:
    if isinstance(sample, LabeledSample):
        state = basis_state(sample.bits, include_readout=True)
        if state.num_qubits != c.num_qubits:
            raise ValueError("sample width does not match the circuit")
        return state, sample.label
    state, label = sample
    return state, label


def sample_loss(c: Circuit, params: Sequence[float], sample) -> float:
    """1 - l(z) * predicted label value; 0 perfect, 1 random guessing."""
    state, label = _as_state_and_label(c, sample)
    return 1.0 - label * predicted_label_value(c, params, state)


def empirical_risk(c: Circuit, params: Sequence[float], ds: LabeledDataset) -> float:
    """Multiplicity-weighted mean of the sample loss over the dataset."""
    if not ds.samples:
        raise ValueError("empty dataset")
    total = 0.0
    weight = 0
    for s in ds.samples:
        total += s.multiplicity * sample_loss(c, params, s)
        weight += s.multiplicity
    return total / weight


def batch_risk(
    c: Circuit, params: Sequence[float], plus: QuantumState, minus: QuantumState
) -> float:
    """1 - (1/2)(<+1|U*YU|+1> - <-1|U*YU|-1>), the superposition-state risk."""
    e_plus = predicted_label_value(c, params, plus)
    e_minus = predicted_label_value(c, params, minus)
    return 1.0 - 0.5 * (e_plus - e_minus)


# ---------------------------------------------------------------------------
# Analytic gradient: forward/backward sweeps, O(L) gate applications total.

def prediction_and_gradient(
    c: Circuit, params: Sequence[float], state: QuantumState
) -> tuple[float, np.ndarray]:
    """Predicted label value and its exact parameter gradient.

    For gate k with generator Sigma_k (projected onto the control subspace
    when the gate is controlled),
    d<Y>/d theta_k = -2 Im <lam_k| Sigma_k |phi_k> * scale_k,
    with phi_k the state after gates 1..k and lam_k the co-state; a parameter
    bound to several gates accumulates a product-rule sum.
    """
    if len(params) != c.num_params:
        raise ValueError("wrong number of parameters")
    if state.num_qubits != c.num_qubits:
        raise ValueError("state width mismatch")
    gates = []
    for g in c.gates:
        flip, yz, phase = g.pauli.masks()
        gates.append((flip, yz, phase, _ctrl_mask(g.controls), g.binding))

    phi = state.amplitudes.copy()
    for flip, yz, phase, ctrl, binding in gates:
        t = gate_angle(binding, params)
        apply_rotation_inplace(phi, flip, yz, phase, math.cos(t), math.sin(t), ctrl)

    r_flip, r_yz, r_phase = c.readout_pauli().masks()
    lam = phi.copy()
    apply_pauli_inplace(lam, r_flip, r_yz, r_phase, 0)
    prediction = float(np.vdot(phi, lam).real)

    grad = np.zeros(c.num_params, dtype=np.float64)
    for flip, yz, phase, ctrl, binding in reversed(gates):
        t = gate_angle(binding, params)
        if isinstance(binding, Bound):
            # fused: M = <lam|P_ctrl Sigma|phi>, then undo the gate on both sweeps
            m = backward_step_inplace(
                phi, lam, flip, yz, phase, math.cos(t), math.sin(t), ctrl
            )
            grad[binding.param_index] += -2.0 * m.imag * binding.scale
        else:
            apply_rotation_inplace(phi, flip, yz, phase, math.cos(t), -math.sin(t), ctrl)
            apply_rotation_inplace(lam, flip, yz, phase, math.cos(t), -math.sin(t), ctrl)
    return prediction, grad


def grad_analytic(c: Circuit, params: Sequence[float], sample) -> GradientVector:
    """Exact gradient of the sample loss (d/d theta of 1 - l * prediction)."""
    state, label = _as_state_and_label(c, sample)
    _, dpred = prediction_and_gradient(c, params, state)
    return GradientVector(-label * dpred)


def loss_and_gradient(c: Circuit, params: Sequence[float], sample) -> tuple[float, GradientVector]:
    state, label = _as_state_and_label(c, sample)
    pred, dpred = prediction_and_gradient(c, params, state)
    return 1.0 - label * pred, GradientVector(-label * dpred)


def batch_risk_and_gradient(
    c: Circuit, params: Sequence[float], plus: QuantumState, minus: QuantumState
) -> tuple[float, GradientVector]:
    e_plus, d_plus = prediction_and_gradient(c, params, plus)
    e_minus, d_minus = prediction_and_gradient(c, params, minus)
    risk = 1.0 - 0.5 * (e_plus - e_minus)
    return risk, GradientVector(-0.5 * (d_plus - d_minus))


def grad_finite_difference(
    c: Circuit, params: Sequence[float], sample, epsilon: float = FD_EPSILON_DEFAULT
) -> GradientVector:
    """Symmetric difference (loss(t+e) - loss(t-e)) / 2e, exact expectations."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    state, label = _as_state_and_label(c, sample)
    theta = np.asarray(params, dtype=np.float64)
    grad = np.zeros(c.num_params)
    for k in range(c.num_params):
        shifted = theta.copy()
        shifted[k] = theta[k] + epsilon
        up = 1.0 - label * predicted_label_value(c, shifted, state)
        shifted[k] = theta[k] - epsilon
        down = 1.0 - label * predicted_label_value(c, shifted, state)
        grad[k] = (up - down) / (2.0 * epsilon)
    return GradientVector(grad)


# ---------------------------------------------------------------------------
# Ancilla interference protocol for one gradient component.

def _insertion_branch(c: Circuit, params: Sequence[float], state: QuantumState, k: int):
    """U_1^..U_L^ Y U_L..U_{k+1} Sigma_k U_k..U_1 |state>, plus the gate scale."""
    bound = [i for i, g in enumerate(c.gates) if isinstance(g.binding, Bound) and g.binding.param_index == k]
    if len(bound) != 1:
        raise ValueError("parameter must bind exactly one gate for the ancilla protocol")
    gate_pos = bound[0]
    gate = c.gates[gate_pos]
    if gate.controls:
        raise ValueError("controlled gates have a non-unitary generator; use grad_analytic")

    chi = state.copy()
    specs = []
    for g in c.gates:
        flip, yz, phase = g.pauli.masks()
        specs.append((flip, yz, phase, _ctrl_mask(g.controls), gate_angle(g.binding, params)))
    for flip, yz, phase, ctrl, t in specs[: gate_pos + 1]:
        apply_rotation_inplace(chi.amplitudes, flip, yz, phase, math.cos(t), math.sin(t), ctrl)
    g_flip, g_yz, g_phase = gate.pauli.masks()
    apply_pauli_inplace(chi.amplitudes, g_flip, g_yz, g_phase, 0)
    for flip, yz, phase, ctrl, t in specs[gate_pos + 1 :]:
        apply_rotation_inplace(chi.amplitudes, flip, yz, phase, math.cos(t), math.sin(t), ctrl)
    r_flip, r_yz, r_phase = c.readout_pauli().masks()
    apply_pauli_inplace(chi.amplitudes, r_flip, r_yz, r_phase, 0)
    for flip, yz, phase, ctrl, t in reversed(specs):
        apply_rotation_inplace(chi.amplitudes, flip, yz, phase, math.cos(t), -math.sin(t), ctrl)
    return chi, gate.binding.scale


def hadamard_test_probability(
    c: Circuit, params: Sequence[float], sample, k: int
) -> float:
    """P(ancilla reads 0) = 1/2 - 1/2 Im<in|U_1^..Y..U_1|in>.

    Simulates the interference protocol on the doubled register: the ancilla
    superposition splits the state into an identity branch and an i*U branch;
    the final Hadamard recombines them.
    """
    state, _ = _as_state_and_label(c, sample)
    chi, _ = _insertion_branch(c, params, state, k)
    branch0 = state.amplitudes / math.sqrt(2.0)
    branch1 = 1j * chi.amplitudes / math.sqrt(2.0)
    out0 = (branch0 + branch1) / math.sqrt(2.0)
    return float(np.vdot(out0, out0).real)


def grad_hadamard_test(
    c: Circuit,
    params: Sequence[float],
    sample,
    k: int,
    shots: int = 0,
    rng: np.random.Generator | None = None,
) -> float:
    """Gradient component k of the sample loss via the ancilla protocol.

    shots=0 returns the exact probability-derived value (equal to the
    analytic component); otherwise the probability is estimated from `shots`
    ancilla measurements.
    """
    if not (0 <= k < c.num_params):
        raise ValueError("parameter index out of range")
    state, label = _as_state_and_label(c, sample)
    chi, scale = _insertion_branch(c, params, state, k)
    p0 = float(
        np.vdot(
            (state.amplitudes + 1j * chi.amplitudes) / 2.0,
            (state.amplitudes + 1j * chi.amplitudes) / 2.0,
        ).real
    )
    if shots > 0:
        if rng is None:
            raise ValueError("shot mode needs an rng")
        p0 = rng.binomial(shots, min(1.0, max(0.0, p0))) / shots
    im = 1.0 - 2.0 * p0
    # d(pred)/d theta = -2 Im(M); d(loss)/d theta = +2 l Im(M) * scale
    return 2.0 * label * im * scale


# ---------------------------------------------------------------------------
# Closed-form parity oracles.

def parity_expectation_oracle(thetas: Sequence[float], z: Sequence[int]) -> float:
    """cos(2 sum_j theta_j b_j) with b_j = (1 - z_j)/2."""
    if len(thetas) != len(z):
        raise ValueError("length mismatch")
    acc = sum(t for t, zj in zip(thetas, z) if zj == -1)
    return math.cos(2.0 * acc)


def parity_risk_oracle(thetas: Sequence[float]) -> float:
    """Full-subset parity empirical risk 1 - cos(sum theta) prod sin(theta_j),
    valid for n a multiple of 4."""
    n = len(thetas)
    if n % 4 != 0:
        raise ValueError("closed form only stated for n a multiple of 4")
    return 1.0 - math.cos(sum(thetas)) * math.prod(math.sin(t) for t in thetas)
