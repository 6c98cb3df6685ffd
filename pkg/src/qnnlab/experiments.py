"""End-to-end experiment drivers shared by the command-line interface and the
acceptance suite.

Each driver owns one training pipeline: which circuit to build, how to draw
data, and which descent schedule to run.  All randomness flows through seeded
`numpy` generators so every run is bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial

import numpy as np

from . import compiler, data, objective, trainer
from .circuit import Circuit, append_layers, build_layered_readout_circuit
from .compiler import AmbiguousLabelError, IsingHamiltonian, SubsetSpec
from .data import LabeledDataset, SuperpositionSpec
from .trainer import MetricsRecord, TrainConfig

DIGITS_LAYERS = ("ZX", "XX", "ZX", "XX", "ZX", "XX")
BATCH_LAYERS = ("ZX", "ZZX")
HAMILTONIAN_EXTRA_LAYERS = ("XX", "ZX", "XX", "ZX")


@dataclass
class ExperimentResult:
    params: np.ndarray
    trace: list[MetricsRecord]
    categorical_error: float
    presentations: int
    summary: dict


# ---------------------------------------------------------------------------
# parity / majority: exhaustive synthetic label functions
# ---------------------------------------------------------------------------


def run_parity(
    n: int,
    subset: frozenset[int] | None = None,
    seed: int = 0,
    learning_rate: float = 0.5,
    noise: float = 0.0,
    budget: int | None = None,
    eval_every: int = 0,
) -> ExperimentResult:
    """SGD on the parameterized subset-parity circuit over the full input set.

    Stops early once exhaustive categorical error on the clean labels hits
    zero; the presentation budget defaults to 10 passes over the 2^n inputs.
    """
    spec = SubsetSpec(n, subset or frozenset(range(1, n + 1)))
    c = compiler.subset_parity_circuit(spec, parameterized=True)
    clean = data.exhaustive_dataset(n, partial(compiler.parity_label, spec))
    rng = np.random.default_rng(seed)
    train = clean if noise == 0.0 else trainer.inject_label_noise(clean, noise, rng)
    if budget is None:
        budget = (1 << n) * 10
    if not eval_every:
        eval_every = 1 << max(n - 3, 0)
    init = rng.uniform(0.0, 2.0 * np.pi, c.num_params)
    cfg = TrainConfig(learning_rate=learning_rate, max_steps=budget, seed=seed)
    params, trace = trainer.train_stochastic(
        c, init, train, cfg, eval_every=eval_every, eval_samples=clean, target_error=0.0
    )
    err = trainer.categorical_error(c, params, clean)
    return ExperimentResult(
        params,
        trace,
        err,
        len(trace),
        {"n": n, "noise": noise, "clean_error": err, "budget": budget},
    )


def run_majority(
    n: int,
    subset: frozenset[int] | None = None,
    beta: float | None = None,
    seed: int = 0,
    learning_rate: float = 0.5,
    budget: int | None = None,
) -> ExperimentResult:
    """SGD on the parameterized majority circuit; exhaustive evaluation."""
    members = subset or frozenset(range(1, n + 1))
    if len(members) % 2 == 0:
        raise ValueError("majority label needs an odd subset size")
    spec = SubsetSpec(n, members)
    if beta is None:
        beta = 0.9 * np.pi / n
    c = compiler.subset_majority_circuit(spec, beta, parameterized=True)
    ds = data.exhaustive_dataset(n, partial(compiler.majority_label, spec))
    rng = np.random.default_rng(seed)
    if budget is None:
        budget = (1 << n) * 10
    init = rng.uniform(-0.1, 0.1, c.num_params)
    cfg = TrainConfig(learning_rate=learning_rate, max_steps=budget, seed=seed)
    params, trace = trainer.train_stochastic(
        c, init, ds, cfg, eval_every=1 << max(n - 3, 0), target_error=0.0
    )
    err = trainer.categorical_error(c, params, ds)
    return ExperimentResult(
        params, trace, err, len(trace), {"n": n, "beta": beta, "train_error": err}
    )


# ---------------------------------------------------------------------------
# digits: 16-bit images, 96-parameter alternating-layer circuit
# ---------------------------------------------------------------------------


def dataset_report(raw: LabeledDataset, clean: LabeledDataset) -> dict:
    """Ingestion counts: retained samples and distinct strings per label."""
    return {
        "distinct_raw": len(raw.samples),
        "distinct_clean": len(clean.samples),
        "distinct_removed": len({s.bits for s in raw.samples})
        - len({s.bits for s in clean.samples}),
        "samples_clean": sum(s.multiplicity for s in clean.samples),
        "distinct_plus": sum(1 for s in clean.samples if s.label == +1),
        "distinct_minus": sum(1 for s in clean.samples if s.label == -1),
    }


def run_digits(
    clean: LabeledDataset,
    seed: int = 1,
    learning_rate: float = 0.05,
    eval_every: int = 100,
    target_error: float = 0.05,
    max_steps: int | None = None,
) -> ExperimentResult:
    """One SGD pass (at most) over the digit dataset on the 96-parameter
    circuit, stopping at the target train categorical error."""
    c = build_layered_readout_circuit(clean.n, list(DIGITS_LAYERS))
    rng = np.random.default_rng(seed)
    init = rng.uniform(-0.05, 0.05, c.num_params)
    if max_steps is None:
        max_steps = sum(s.multiplicity for s in clean.samples)
    cfg = TrainConfig(learning_rate=learning_rate, max_steps=max_steps, seed=seed)
    params, trace = trainer.train_stochastic(
        c, init, clean, cfg, eval_every=eval_every, target_error=target_error
    )
    err = trainer.categorical_error(c, params, clean)
    return ExperimentResult(
        params,
        trace,
        err,
        len(trace),
        {"train_error": err, "presentations": len(trace), "seed": seed},
    )


# ---------------------------------------------------------------------------
# batch: superposition states, 136-parameter diagonal circuit
# ---------------------------------------------------------------------------


def run_batch(
    clean: LabeledDataset,
    seed: int = 0,
    learning_rate: float = 0.2,
    max_steps: int = 120,
    init_scale: float = 0.1,
) -> ExperimentResult:
    """Full-gradient descent on the two-superposition batch risk."""
    spec = SuperpositionSpec()
    plus = data.build_superposition(clean, +1, spec)
    minus = data.build_superposition(clean, -1, spec)
    c = build_layered_readout_circuit(clean.n, list(BATCH_LAYERS))
    rng = np.random.default_rng(seed)
    init = rng.uniform(-init_scale, init_scale, c.num_params)
    cfg = TrainConfig(learning_rate=learning_rate, max_steps=max_steps, seed=seed)
    params, trace = trainer.train_batch_risk(c, init, plus, minus, cfg)
    err = trainer.categorical_error(c, params, clean)
    return ExperimentResult(
        params,
        trace,
        err,
        len(trace) - 1,
        {
            "initial_risk": trace[0].loss_or_risk,
            "final_risk": trace[-1].loss_or_risk,
            "train_error": err,
            "seed": seed,
        },
    )


# ---------------------------------------------------------------------------
# hamiltonian: random product states labeled by an Ising energy sign
# ---------------------------------------------------------------------------


def hamiltonian_states(
    count: int, rng: np.random.Generator, h: IsingHamiltonian
) -> list[tuple]:
    """Draw labeled random product states, resampling near-tie energies."""
    out: list[tuple] = []
    while len(out) < count:
        state = data.random_product_state(h.n, rng)
        try:
            label = compiler.hamiltonian_label(h, state)
        except AmbiguousLabelError:
            continue
        out.append((state, label, 1))
    return out


def _minibatch_gradient(c: Circuit, params, states, idx) -> np.ndarray:
    g = np.zeros_like(params)
    for i in idx:
        state, label, _ = states[i]
        _, gi = objective.loss_and_gradient(c, params, (state, label))
        g += gi.components
    return g / len(idx)


def capped_minibatch_descent(
    c: Circuit,
    params: np.ndarray,
    states,
    rng: np.random.Generator,
    learning_rate: float,
    steps: int,
    norm_cap: float,
    batch_size: int = 50,
) -> np.ndarray:
    """Minibatch gradient descent projected onto an L2 ball, returning the
    average of the second-half iterates (tail averaging)."""
    acc = np.zeros_like(params)
    count = 0
    for it in range(1, steps + 1):
        idx = rng.integers(0, len(states), batch_size)
        params = params - learning_rate * _minibatch_gradient(c, params, states, idx)
        norm = np.linalg.norm(params)
        if norm > norm_cap:
            params = params * (norm_cap / norm)
        if it > steps // 2:
            acc += params
            count += 1
    return acc / count


def online_pass(
    c: Circuit,
    params: np.ndarray,
    states,
    rng: np.random.Generator,
    learning_rate: float,
    tail_fraction: float = 0.5,
) -> np.ndarray:
    """A single normalized-SGD pass over the states in random order,
    returning the tail average of the iterates."""
    params = np.asarray(params, dtype=np.float64).copy()
    order = rng.permutation(len(states))
    acc = np.zeros_like(params)
    count = 0
    tail_from = int(len(states) * (1.0 - tail_fraction))
    cfg = TrainConfig(learning_rate=learning_rate, max_steps=1, seed=0)
    for i, j in enumerate(order):
        state, label, _ = states[j]
        params, _ = trainer.train_stochastic(c, params, [(state, label, 1)], cfg)
        if i >= tail_from:
            acc += params
            count += 1
    return acc / count


def run_hamiltonian(
    graph_seed: int = 11,
    train_seed: int = 1,
    extended: bool = False,
    train_count: int = 1000,
    test_count: int = 500,
    learning_rate: float = 0.1,
    steps: int = 600,
    online_rate: float = 0.002,
) -> ExperimentResult:
    """Train the edge-parameterized Ising-label circuit on random product
    states.

    Base run: norm-capped minibatch descent on the 12-parameter circuit with
    tail averaging.  Extended run: embed the trained parameters into the
    44-parameter circuit (extra layers start at zero) and make one online
    fine-tuning pass over the same training states.
    """
    rng = np.random.default_rng(graph_seed)
    h = data.random_ising_hamiltonian(8, 3, rng)
    c = compiler.hamiltonian_label_circuit(h, parameterized=True)
    train_states = hamiltonian_states(train_count, rng, h)
    test_states = hamiltonian_states(test_count, rng, h)

    opt_rng = np.random.default_rng(train_seed)
    init = opt_rng.uniform(-0.02, 0.02, c.num_params)
    norm_cap = 0.05 * np.sqrt(c.num_params)
    params = capped_minibatch_descent(
        c, init, train_states, opt_rng, learning_rate, steps, norm_cap
    )
    base_error = trainer.categorical_error(c, params, test_states)
    presentations = steps * 50

    if extended:
        c = append_layers(c, list(HAMILTONIAN_EXTRA_LAYERS))
        grown = np.zeros(c.num_params)
        grown[: len(params)] = params
        params = online_pass(c, grown, train_states, opt_rng, online_rate)
        presentations += len(train_states)
    err = trainer.categorical_error(c, params, test_states)
    return ExperimentResult(
        params,
        [],
        err,
        presentations,
        {
            "graph_seed": graph_seed,
            "train_seed": train_seed,
            "num_params": c.num_params,
            "base_test_error": base_error,
            "test_error": err,
        },
    )
