"""Training harness: normalized SGD steps, batch-risk descent, label noise,
categorical evaluation, and the metrics CSV."""

from __future__ import annotations

import csv

import numpy as np
import pytest

from qnnlab.circuit import build_layered_readout_circuit
from qnnlab.compiler import SubsetSpec, parity_label, subset_parity_circuit
from qnnlab.data import (
    LabeledDataset,
    LabeledSample,
    build_superposition,
    exhaustive_dataset,
    remove_ambiguous,
    sampled_dataset,
)
from qnnlab.objective import loss_and_gradient, sample_loss
from qnnlab.trainer import (
    TrainConfig,
    categorical_error,
    inject_label_noise,
    sgd_step,
    train_batch_risk,
    train_stochastic,
    write_metrics_csv,
)


def parity_setup(n: int = 3):
    spec = SubsetSpec(n, frozenset(range(1, n + 1)))
    c = subset_parity_circuit(spec, parameterized=True)
    ds = exhaustive_dataset(n, lambda bits: parity_label(spec, bits))
    return c, ds


class TestTrainConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            TrainConfig(learning_rate=0.0)
        with pytest.raises(ValueError):
            TrainConfig(gradient_mode="newton")
        with pytest.raises(ValueError):
            TrainConfig(label_noise_rate=1.0)


class TestSgdStep:
    def test_formula(self, rng):
        """theta' = theta - r (loss / |g|^2) g, checked against a manual
        evaluation of loss and gradient."""
        c, ds = parity_setup()
        params = rng.uniform(-1, 1, c.num_params)
        sample = ds.samples[5]
        cfg = TrainConfig(learning_rate=0.25)
        new_params, info = sgd_step(c, params, sample, cfg)
        loss, grad = loss_and_gradient(c, params, sample)
        assert info.loss == pytest.approx(loss)
        want = params - 0.25 * (loss / grad.norm_sq) * grad.components
        np.testing.assert_allclose(new_params, want, atol=1e-12)

    def test_stall_below_gradient_floor(self):
        c, ds = parity_setup()
        params = np.full(c.num_params, np.pi / 2)  # loss 0, gradient 0
        sample = ds.samples[0]
        new_params, info = sgd_step(c, params, sample, TrainConfig())
        assert info.stalled
        np.testing.assert_array_equal(new_params, params)

    def test_finite_difference_mode_agrees(self, rng):
        c, ds = parity_setup()
        params = rng.uniform(-1, 1, c.num_params)
        sample = ds.samples[3]
        a, _ = sgd_step(c, params, sample, TrainConfig(gradient_mode="analytic"))
        b, _ = sgd_step(
            c, params, sample, TrainConfig(gradient_mode="finite-difference")
        )
        np.testing.assert_allclose(a, b, atol=1e-5)


class TestTrainStochastic:
    def test_seeded_runs_are_identical(self):
        c, ds = parity_setup()
        cfg = TrainConfig(learning_rate=0.5, max_steps=50, seed=9)
        init = np.zeros(c.num_params) + 0.1
        a, _ = train_stochastic(c, init, ds, cfg)
        b, _ = train_stochastic(c, init, ds, cfg)
        np.testing.assert_array_equal(a, b)

    def test_early_stop_at_target_error(self):
        c, ds = parity_setup()
        rng = np.random.default_rng(2)
        init = rng.uniform(0, 2 * np.pi, c.num_params)
        cfg = TrainConfig(learning_rate=0.5, max_steps=2000, seed=2)
        params, trace = train_stochastic(
            c, init, ds, cfg, eval_every=8, target_error=0.0
        )
        assert trace[-1].categorical_error == 0.0
        assert len(trace) < 2000

    def test_accepts_state_triples(self, rng):
        c, ds = parity_setup()
        from qnnlab.data import basis_inputs

        triples = basis_inputs(ds)
        cfg = TrainConfig(learning_rate=0.5, max_steps=10, seed=0)
        params, trace = train_stochastic(c, np.zeros(c.num_params) + 0.2, triples, cfg)
        assert len(trace) == 10

    def test_empty_dataset_rejected(self):
        c, _ = parity_setup()
        with pytest.raises(ValueError):
            train_stochastic(c, np.zeros(3), [], TrainConfig(max_steps=1))


class TestTrainBatchRisk:
    def test_trace_is_non_increasing(self, rng):
        ds = remove_ambiguous(
            sampled_dataset(4, lambda bits: 1 if sum(bits) >= 0 else -1, 80, rng)
        )
        plus = build_superposition(ds, +1)
        minus = build_superposition(ds, -1)
        c = build_layered_readout_circuit(4, ["ZX", "ZZX"])
        init = rng.uniform(-0.1, 0.1, c.num_params)
        cfg = TrainConfig(learning_rate=0.3, max_steps=40, seed=0)
        _, trace = train_batch_risk(c, init, plus, minus, cfg)
        risks = [rec.loss_or_risk for rec in trace]
        assert all(b <= a + 1e-12 for a, b in zip(risks, risks[1:]))

    def test_descends_on_majority_labels(self, rng):
        ds = remove_ambiguous(
            sampled_dataset(4, lambda bits: 1 if sum(bits) >= 0 else -1, 80, rng)
        )
        plus = build_superposition(ds, +1)
        minus = build_superposition(ds, -1)
        c = build_layered_readout_circuit(4, ["ZX", "ZZX"])
        init = rng.uniform(-0.1, 0.1, c.num_params)
        cfg = TrainConfig(learning_rate=0.3, max_steps=60, seed=0)
        _, trace = train_batch_risk(c, init, plus, minus, cfg)
        assert trace[-1].loss_or_risk < 0.5 * trace[0].loss_or_risk


class TestLabelNoise:
    def test_zero_rate_is_identity(self, rng):
        _, ds = parity_setup()
        assert inject_label_noise(ds, 0.0, rng) == ds

    def test_flip_rate_is_approximately_respected(self):
        _, ds = parity_setup(8)
        noisy = inject_label_noise(ds, 0.1, np.random.default_rng(0))
        flipped = sum(
            1 for a, b in zip(ds.samples, noisy.samples) if a.label != b.label
        )
        assert 0.05 < flipped / len(ds.samples) < 0.15

    def test_bad_rate_rejected(self, rng):
        _, ds = parity_setup()
        with pytest.raises(ValueError):
            inject_label_noise(ds, 1.0, rng)


class TestCategoricalError:
    def test_multiplicity_weighting(self):
        c, _ = parity_setup(1)
        # theta = pi/2 labels (+1 -> +1, -1 -> -1) exactly
        ds = LabeledDataset(
            1, (LabeledSample((1,), +1, 3), LabeledSample((-1,), +1, 1))
        )
        err = categorical_error(c, np.array([np.pi / 2]), ds)
        assert err == pytest.approx(0.25)

    def test_perfect_circuit(self):
        c, ds = parity_setup()
        assert categorical_error(c, np.full(3, np.pi / 2), ds) == 0.0


class TestMetricsCsv:
    def test_schema_and_round_trip(self, tmp_path, rng):
        c, ds = parity_setup()
        cfg = TrainConfig(learning_rate=0.5, max_steps=12, seed=1)
        _, trace = train_stochastic(
            c, rng.uniform(0, 1, c.num_params), ds, cfg, eval_every=4
        )
        path = tmp_path / "metrics.csv"
        write_metrics_csv(path, trace)
        with open(path) as f:
            rows = list(csv.reader(f))
        assert rows[0] == [
            "step",
            "loss_or_risk",
            "categorical_error",
            "grad_norm",
            "stalled_flag",
        ]
        assert len(rows) == 13
        assert rows[4][2] != ""  # eval_every=4 populated the error column
