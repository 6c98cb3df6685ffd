"""Stochastic gradient descent on the per-sample loss, full-gradient descent
on the superposition batch risk, label-noise injection, and categorical
evaluation with CSV metrics traces."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .circuit import Circuit, predicted_label_value
from .data import LabeledDataset, LabeledSample, basis_inputs
from .objective import (
    GradientVector,
    batch_risk_and_gradient,
    grad_hadamard_test,
    grad_finite_difference,
    loss_and_gradient,
    sample_loss,
)
from .sim import QuantumState

GRADIENT_MODES = ("analytic", "finite-difference", "hadamard-shots")


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.5
    max_steps: int = 1000
    gradient_mode: str = "analytic"
    shots: int = 0  # 0 = exact expectations
    fd_epsilon: float = 1e-4
    seed: int = 0
    gradient_floor: float = 1e-12
    label_noise_rate: float = 0.0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if self.gradient_mode not in GRADIENT_MODES:
            raise ValueError(f"unknown gradient mode {self.gradient_mode!r}")
        if not (0.0 <= self.label_noise_rate < 1.0):
            raise ValueError("label noise rate must be in [0, 1)")


@dataclass
class MetricsRecord:
    step: int
    loss_or_risk: float
    grad_norm: float
    stalled: bool
    categorical_error: float | None = None


@dataclass
class StepInfo:
    loss: float
    grad_norm_sq: float
    stalled: bool


def _gradient(c, params, sample, cfg: TrainConfig, rng) -> tuple[float, GradientVector]:
    if cfg.gradient_mode == "analytic":
        return loss_and_gradient(c, params, sample)
    if cfg.gradient_mode == "finite-difference":
        loss = sample_loss(c, params, sample)
        return loss, grad_finite_difference(c, params, sample, cfg.fd_epsilon)
    comps = np.array(
        [grad_hadamard_test(c, params, sample, k, cfg.shots, rng) for k in range(c.num_params)]
    )
    return sample_loss(c, params, sample), GradientVector(comps)


def sgd_step(
    c: Circuit,
    params: np.ndarray,
    sample,
    cfg: TrainConfig,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, StepInfo]:
    """theta -> theta - r (loss/|g|^2) g; no movement below the gradient floor."""
    loss, grad = _gradient(c, params, sample, cfg, rng)
    g2 = grad.norm_sq
    if g2 < cfg.gradient_floor:
        return np.asarray(params, dtype=np.float64), StepInfo(loss, g2, stalled=True)
    step = cfg.learning_rate * loss / g2
    return np.asarray(params) - step * grad.components, StepInfo(loss, g2, stalled=False)


def categorical_error(c: Circuit, params, samples) -> float:
    """Weighted fraction with sign(prediction) != label; prediction 0 reads +1.

    `samples` is a LabeledDataset or a sequence of (state, label, multiplicity).
    """
    if isinstance(samples, LabeledDataset):
        samples = basis_inputs(samples)
    wrong = 0
    total = 0
    for state, label, mult in samples:
        pred = predicted_label_value(c, params, state)
        sign = 1 if pred >= 0 else -1
        if sign != label:
            wrong += mult
        total += mult
    if total == 0:
        return 0.0
    return wrong / total


def train_stochastic(
    c: Circuit,
    init_params,
    ds,
    cfg: TrainConfig,
    eval_every: int = 0,
    eval_samples=None,
    target_error: float | None = None,
    record_params: bool = False,
) -> tuple[np.ndarray, list[MetricsRecord]]:
    """SGD over samples drawn uniformly with replacement (seeded).

    `ds` is a LabeledDataset or a sequence of (state, label, multiplicity)
    triples.  When `eval_every` is set, categorical error on `eval_samples`
    (default: the training set) is recorded periodically and training stops
    once it reaches `target_error`.
    """
    if isinstance(ds, LabeledDataset):
        if not ds.samples:
            raise ValueError("empty dataset")
        pool = [
            (LabeledSample(s.bits, s.label), s.multiplicity) for s in ds.samples
        ]
    else:
        pool = [((state, label), mult) for state, label, mult in ds]
        if not pool:
            raise ValueError("empty dataset")
    weights = np.array([m for _, m in pool], dtype=np.float64)
    weights /= weights.sum()
    rng = np.random.default_rng(cfg.seed)
    if eval_samples is None:
        eval_samples = ds

    params = np.asarray(init_params, dtype=np.float64).copy()
    trace: list[MetricsRecord] = []
    for step in range(1, cfg.max_steps + 1):
        sample = pool[int(rng.choice(len(pool), p=weights))][0]
        params, info = sgd_step(c, params, sample, cfg, rng)
        record = MetricsRecord(step, info.loss, info.grad_norm_sq**0.5, info.stalled)
        if eval_every and step % eval_every == 0:
            record.categorical_error = categorical_error(c, params, eval_samples)
        trace.append(record)
        if (
            target_error is not None
            and record.categorical_error is not None
            and record.categorical_error <= target_error
        ):
            break
    return params, trace


def train_batch_risk(
    c: Circuit,
    init_params,
    plus: QuantumState,
    minus: QuantumState,
    cfg: TrainConfig,
    min_step: float = 1e-9,
) -> tuple[np.ndarray, list[MetricsRecord]]:
    """Full-gradient descent on the batch risk with halving-on-increase.

    A candidate step that raises the risk is rejected and the step size is
    halved, so the recorded risk trace is non-increasing.
    """
    params = np.asarray(init_params, dtype=np.float64).copy()
    step_size = cfg.learning_rate
    risk, grad = batch_risk_and_gradient(c, params, plus, minus)
    trace = [MetricsRecord(0, risk, grad.norm_sq**0.5, False)]
    for step in range(1, cfg.max_steps + 1):
        if grad.norm_sq < cfg.gradient_floor:
            trace.append(MetricsRecord(step, risk, grad.norm_sq**0.5, True))
            break
        candidate = params - step_size * grad.components
        new_risk, new_grad = batch_risk_and_gradient(c, candidate, plus, minus)
        if new_risk > risk:
            step_size *= 0.5
            if step_size < min_step:
                break
            continue
        params, risk, grad = candidate, new_risk, new_grad
        trace.append(MetricsRecord(step, risk, grad.norm_sq**0.5, False))
    return params, trace


def inject_label_noise(
    ds: LabeledDataset, rate: float, rng: np.random.Generator
) -> LabeledDataset:
    """Independently flip each sample's label with the given probability."""
    if not (0.0 <= rate < 1.0):
        raise ValueError("rate must be in [0, 1)")
    samples = tuple(
        LabeledSample(s.bits, -s.label if rng.random() < rate else s.label, s.multiplicity)
        for s in ds.samples
    )
    return LabeledDataset(ds.n, samples)


def write_metrics_csv(path, trace: Sequence[MetricsRecord]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["step", "loss_or_risk", "categorical_error", "grad_norm", "stalled_flag"])
        for rec in trace:
            err = "" if rec.categorical_error is None else f"{rec.categorical_error:.6f}"
            writer.writerow(
                [rec.step, f"{rec.loss_or_risk:.12g}", err, f"{rec.grad_norm:.12g}", int(rec.stalled)]
            )
