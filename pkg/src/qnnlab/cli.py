"""Command-line entry point: experiment drivers and verification suites.

Exit codes: 0 success, 1 quality-threshold failure, 2 usage or config error
(click's default for bad invocations).
"""

from __future__ import annotations

import json
import sys
import time
from functools import partial
from pathlib import Path

import click
import numpy as np

from . import compiler, data, experiments, objective, trainer
from .circuit import build_random_circuit, predicted_label_value, save_circuit
from .compiler import BooleanTruthTable, SubsetSpec
from .sim import basis_state

# Full-MNIST 3-vs-6 reference counts for the ingestion report (retained
# samples, distinct per label, ambiguous strings).  Reported, never asserted:
# they depend on the exact downsampling method.
MNIST_REFERENCE = {"samples": 6031, "distinct_a": 797, "distinct_b": 617, "ambiguous": 197}


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"bad config file: {exc}")


def _pick(flag, config: dict, key: str, default):
    """Flag beats config file beats built-in default."""
    if flag is not None:
        return flag
    return config.get(key, default)


def _parse_subset(text: str | None) -> frozenset[int] | None:
    if not text:
        return None
    try:
        return frozenset(int(tok) for tok in text.split(","))
    except ValueError:
        raise click.UsageError(f"bad subset {text!r}; expected comma-separated integers")


def _write_outputs(out, c, result, label: str) -> None:
    if out is None:
        return
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    trainer.write_metrics_csv(out / f"{label}_metrics.csv", result.trace)
    np.savetxt(out / f"{label}_params.txt", result.params)
    save_circuit(c, out / f"{label}_circuit.json")


def _summary(result, elapsed: float, seed) -> None:
    for key, value in result.summary.items():
        click.echo(f"{key}: {value}")
    click.echo(f"presentations: {result.presentations}")
    click.echo(f"categorical_error: {result.categorical_error:.4f}")
    click.echo(f"wall_time_s: {elapsed:.1f}")
    click.echo(f"seed: {seed}")


@click.group()
def main() -> None:
    """Quantum neural network laboratory."""


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------


@main.command("repr-check")
@click.option("--n", type=int, required=True)
@click.option("--kind", type=click.Choice(["parity", "majority", "truth-table"]), default="parity")
@click.option("--subset", type=str, default=None, help="comma-separated qubit indices")
@click.option("--beta", type=float, default=None)
@click.option("--trials", type=int, default=10, help="random truth tables to check")
@click.option("--seed", type=int, default=0)
def cmd_repr_check(n, kind, subset, beta, trials, seed) -> None:
    """Compile label circuits and verify predictions exhaustively."""
    if n > 10:
        raise click.UsageError("exhaustive checks are limited to n <= 10")
    members = _parse_subset(subset) or frozenset(range(1, n + 1))
    rng = np.random.default_rng(seed)
    worst = 0.0
    failures = 0

    def check(c, label_fn, tol):
        nonlocal worst, failures
        for index in range(1 << n):
            bits = tuple(1 - 2 * ((index >> i) & 1) for i in range(n))
            state = basis_state(bits, include_readout=True)
            pred = predicted_label_value(c, (), state)
            target = label_fn(bits)
            if kind == "majority":
                ok = pred * target > 0
                worst = max(worst, 0.0 if ok else 1.0)
            else:
                dev = abs(pred - target)
                worst = max(worst, dev)
                ok = dev <= tol
            if not ok:
                failures += 1
                click.echo(f"FAIL input={bits} prediction={pred:+.6f} label={target:+d}")

    if kind == "parity":
        spec = SubsetSpec(n, members)
        check(compiler.subset_parity_circuit(spec), partial(compiler.parity_label, spec), 1e-10)
    elif kind == "majority":
        spec = SubsetSpec(n, members)
        b = beta if beta is not None else 0.9 * np.pi / n
        check(
            compiler.subset_majority_circuit(spec, b),
            partial(compiler.majority_label, spec),
            0.0,
        )
    else:
        for _ in range(trials):
            table = BooleanTruthTable(n, tuple(int(b) for b in rng.integers(0, 2, 1 << n)))
            c = compiler.compile_label_circuit(compiler.reed_muller_transform(table))
            check(c, partial(compiler.truth_table_label, table), 1e-10)

    click.echo(f"checked kind={kind} n={n}; worst deviation {worst:.3e}")
    if failures:
        click.echo(f"{failures} violations")
        sys.exit(1)
    click.echo("PASS")


@main.command("grad-check")
@click.option("--trials", type=int, default=100)
@click.option("--max-qubits", type=int, default=8)
@click.option("--max-gates", type=int, default=50)
@click.option("--fd-eps", type=float, default=1e-4)
@click.option("--seed", type=int, default=0)
def cmd_grad_check(trials, max_qubits, max_gates, fd_eps, seed) -> None:
    """Cross-check the three gradient paths on random circuits."""
    rng = np.random.default_rng(seed)
    worst_fd = 0.0
    worst_hadamard = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, max_qubits))  # data qubits; +1 readout
        c = build_random_circuit(n, int(rng.integers(1, max_gates + 1)), rng)
        params = rng.uniform(-np.pi, np.pi, c.num_params)
        bits = tuple(int(b) for b in 1 - 2 * rng.integers(0, 2, n))
        sample = (basis_state(bits, include_readout=True), int(1 - 2 * rng.integers(0, 2)))
        analytic = objective.grad_analytic(c, params, sample).components
        fd = objective.grad_finite_difference(c, params, sample, fd_eps).components
        worst_fd = max(worst_fd, float(np.abs(analytic - fd).max()))
        for k in range(c.num_params):
            exact = objective.grad_hadamard_test(c, params, sample, k)
            worst_hadamard = max(worst_hadamard, abs(exact - analytic[k]))
    click.echo(f"analytic vs finite-difference, worst component: {worst_fd:.3e}")
    click.echo(f"analytic vs exact ancilla test, worst component: {worst_hadamard:.3e}")
    if worst_fd > 1e-6 or worst_hadamard > 1e-10:
        sys.exit(1)
    click.echo("PASS")


# ---------------------------------------------------------------------------
# training experiments
# ---------------------------------------------------------------------------


@main.command("train-parity")
@click.option("--n", type=int, default=None)
@click.option("--subset", type=str, default=None)
@click.option("--rate", type=float, default=None)
@click.option("--steps", type=int, default=None)
@click.option("--noise", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.option("--config", type=click.Path(exists=True), default=None)
def cmd_train_parity(n, subset, rate, steps, noise, seed, out, config) -> None:
    """SGD on the parameterized subset-parity circuit."""
    cfg = _load_config(config)
    n = _pick(n, cfg, "n", 8)
    seed = _pick(seed, cfg, "seed", 0)
    noise = _pick(noise, cfg, "noise", 0.0)
    start = time.time()
    result = experiments.run_parity(
        n,
        subset=_parse_subset(_pick(subset, cfg, "subset", None)),
        seed=seed,
        learning_rate=_pick(rate, cfg, "rate", 0.5),
        noise=noise,
        budget=_pick(steps, cfg, "steps", None),
    )
    spec = SubsetSpec(n, frozenset(range(1, n + 1)))
    _write_outputs(out, compiler.subset_parity_circuit(spec, parameterized=True), result, "parity")
    _summary(result, time.time() - start, seed)
    target = 0.01 if noise else 0.0
    sys.exit(0 if result.categorical_error <= target else 1)


@main.command("train-majority")
@click.option("--n", type=int, default=None)
@click.option("--subset", type=str, default=None)
@click.option("--beta", type=float, default=None)
@click.option("--rate", type=float, default=None)
@click.option("--steps", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.option("--config", type=click.Path(exists=True), default=None)
def cmd_train_majority(n, subset, beta, rate, steps, seed, out, config) -> None:
    """SGD on the parameterized majority-threshold circuit."""
    cfg = _load_config(config)
    n = _pick(n, cfg, "n", 5)
    seed = _pick(seed, cfg, "seed", 0)
    start = time.time()
    result = experiments.run_majority(
        n,
        subset=_parse_subset(_pick(subset, cfg, "subset", None)),
        beta=_pick(beta, cfg, "beta", None),
        seed=seed,
        learning_rate=_pick(rate, cfg, "rate", 0.5),
        budget=_pick(steps, cfg, "steps", None),
    )
    spec = SubsetSpec(n, frozenset(range(1, n + 1)))
    circuit = compiler.subset_majority_circuit(
        spec, result.summary["beta"], parameterized=True
    )
    _write_outputs(out, circuit, result, "majority")
    _summary(result, time.time() - start, seed)
    sys.exit(0 if result.categorical_error == 0.0 else 1)


def _load_digit_dataset(dataset, images, labels, digit_a, digit_b):
    if dataset is not None:
        raw = data.load_dataset(dataset)
    elif images is not None and labels is not None:
        raw = data.ingest_mnist(images, labels, digit_a, digit_b)
    else:
        raise click.UsageError("need either --dataset or --images plus --labels")
    clean = data.remove_ambiguous(raw)
    return raw, clean


@main.command("train-digits")
@click.option("--images", type=click.Path(exists=True), default=None)
@click.option("--labels", type=click.Path(exists=True), default=None)
@click.option("--dataset", type=click.Path(exists=True), default=None)
@click.option("--digit-a", type=int, default=3)
@click.option("--digit-b", type=int, default=6)
@click.option("--rate", type=float, default=None)
@click.option("--steps", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.option("--config", type=click.Path(exists=True), default=None)
def cmd_train_digits(images, labels, dataset, digit_a, digit_b, rate, steps, seed, out, config) -> None:
    """One-pass SGD on the 96-parameter digit classifier."""
    cfg = _load_config(config)
    seed = _pick(seed, cfg, "seed", 1)
    raw, clean = _load_digit_dataset(dataset, images, labels, digit_a, digit_b)
    for key, value in experiments.dataset_report(raw, clean).items():
        click.echo(f"{key}: {value}")
    start = time.time()
    result = experiments.run_digits(
        clean,
        seed=seed,
        learning_rate=_pick(rate, cfg, "rate", 0.05),
        max_steps=_pick(steps, cfg, "steps", None),
    )
    from .circuit import build_layered_readout_circuit

    c = build_layered_readout_circuit(clean.n, list(experiments.DIGITS_LAYERS))
    _write_outputs(out, c, result, "digits")
    _summary(result, time.time() - start, seed)
    sys.exit(0 if result.categorical_error <= 0.05 else 1)


@main.command("train-batch")
@click.option("--images", type=click.Path(exists=True), default=None)
@click.option("--labels", type=click.Path(exists=True), default=None)
@click.option("--dataset", type=click.Path(exists=True), default=None)
@click.option("--digit-a", type=int, default=3)
@click.option("--digit-b", type=int, default=6)
@click.option("--rate", type=float, default=None)
@click.option("--steps", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.option("--config", type=click.Path(exists=True), default=None)
def cmd_train_batch(images, labels, dataset, digit_a, digit_b, rate, steps, seed, out, config) -> None:
    """Full-gradient descent on the two-superposition batch risk."""
    cfg = _load_config(config)
    seed = _pick(seed, cfg, "seed", 0)
    _, clean = _load_digit_dataset(dataset, images, labels, digit_a, digit_b)
    start = time.time()
    result = experiments.run_batch(
        clean,
        seed=seed,
        learning_rate=_pick(rate, cfg, "rate", 0.2),
        max_steps=_pick(steps, cfg, "steps", 120),
    )
    from .circuit import build_layered_readout_circuit

    c = build_layered_readout_circuit(clean.n, list(experiments.BATCH_LAYERS))
    _write_outputs(out, c, result, "batch")
    _summary(result, time.time() - start, seed)
    ok = result.summary["final_risk"] <= 0.6 and result.categorical_error <= 0.10
    sys.exit(0 if ok else 1)


@main.command("train-hamiltonian")
@click.option("--graph-seed", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--extended/--base", default=False, help="grow to the 44-parameter circuit")
@click.option("--rate", type=float, default=None)
@click.option("--steps", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.option("--config", type=click.Path(exists=True), default=None)
def cmd_train_hamiltonian(graph_seed, seed, extended, rate, steps, out, config) -> None:
    """Classify random product states by the sign of an Ising energy."""
    cfg = _load_config(config)
    graph_seed = _pick(graph_seed, cfg, "graph_seed", 11)
    seed = _pick(seed, cfg, "seed", 1)
    start = time.time()
    result = experiments.run_hamiltonian(
        graph_seed=graph_seed,
        train_seed=seed,
        extended=extended,
        learning_rate=_pick(rate, cfg, "rate", 0.1),
        steps=_pick(steps, cfg, "steps", 600),
    )
    if out is not None:
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        np.savetxt(out_dir / "hamiltonian_params.txt", result.params)
    _summary(result, time.time() - start, seed)
    sys.exit(0 if result.categorical_error <= 0.05 else 1)


# ---------------------------------------------------------------------------
# data plumbing
# ---------------------------------------------------------------------------


@main.command("ingest-mnist")
@click.option("--images", type=click.Path(exists=True), required=True)
@click.option("--labels", type=click.Path(exists=True), required=True)
@click.option("--digit-a", type=int, default=3)
@click.option("--digit-b", type=int, default=6)
@click.option("--out", type=click.Path(), required=True)
def cmd_ingest_mnist(images, labels, digit_a, digit_b, out) -> None:
    """Downsample an IDX image set to 16-bit strings and save the dataset."""
    raw = data.ingest_mnist(images, labels, digit_a, digit_b)
    clean = data.remove_ambiguous(raw)
    data.save_dataset(clean, out)
    report = experiments.dataset_report(raw, clean)
    for key, value in report.items():
        click.echo(f"{key}: {value}")
    click.echo(
        "full-MNIST 3-vs-6 reference (not asserted): "
        f"{MNIST_REFERENCE['samples']} samples, "
        f"{MNIST_REFERENCE['distinct_a']}/{MNIST_REFERENCE['distinct_b']} distinct, "
        f"{MNIST_REFERENCE['ambiguous']} ambiguous"
    )
    click.echo(f"saved {out}")


if __name__ == "__main__":
    main()
