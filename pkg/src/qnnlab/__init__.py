"""qnnlab: a laboratory for binary classifiers built from Pauli-rotation
circuits on a dense state-vector simulator.

The readout convention everywhere: data qubits 1..n, readout qubit n+1,
prediction = <Y> on the readout after the circuit acts on |z, 1>.
"""

from .kernels import BACKEND
from .sim import PauliAxis, PauliString, QuantumState, basis_state
from .circuit import (
    Bound,
    Circuit,
    Fixed,
    Gate,
    append_layers,
    build_layered_readout_circuit,
    build_random_circuit,
    load_circuit,
    predicted_label_value,
    save_circuit,
)
from .compiler import (
    AmbiguousLabelError,
    BooleanTruthTable,
    IsingHamiltonian,
    ReedMullerForm,
    SubsetSpec,
    compile_label_circuit,
    hamiltonian_label_circuit,
    reed_muller_transform,
    subset_majority_circuit,
    subset_parity_circuit,
)
from .data import (
    LabeledDataset,
    LabeledSample,
    SuperpositionSpec,
    build_superposition,
    exhaustive_dataset,
    ingest_mnist,
    load_dataset,
    random_ising_hamiltonian,
    random_product_state,
    remove_ambiguous,
    sampled_dataset,
    save_dataset,
)
from .objective import (
    GradientVector,
    batch_risk,
    empirical_risk,
    grad_analytic,
    grad_finite_difference,
    grad_hadamard_test,
    loss_and_gradient,
    sample_loss,
)
from .trainer import (
    MetricsRecord,
    TrainConfig,
    categorical_error,
    inject_label_noise,
    train_batch_risk,
    train_stochastic,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "PauliAxis",
    "PauliString",
    "QuantumState",
    "basis_state",
    "Bound",
    "Circuit",
    "Fixed",
    "Gate",
    "append_layers",
    "build_layered_readout_circuit",
    "build_random_circuit",
    "load_circuit",
    "predicted_label_value",
    "save_circuit",
    "AmbiguousLabelError",
    "BooleanTruthTable",
    "IsingHamiltonian",
    "ReedMullerForm",
    "SubsetSpec",
    "compile_label_circuit",
    "hamiltonian_label_circuit",
    "reed_muller_transform",
    "subset_majority_circuit",
    "subset_parity_circuit",
    "LabeledDataset",
    "LabeledSample",
    "SuperpositionSpec",
    "build_superposition",
    "exhaustive_dataset",
    "ingest_mnist",
    "load_dataset",
    "random_ising_hamiltonian",
    "random_product_state",
    "remove_ambiguous",
    "sampled_dataset",
    "save_dataset",
    "GradientVector",
    "batch_risk",
    "empirical_risk",
    "grad_analytic",
    "grad_finite_difference",
    "grad_hadamard_test",
    "loss_and_gradient",
    "sample_loss",
    "MetricsRecord",
    "TrainConfig",
    "categorical_error",
    "inject_label_noise",
    "train_batch_risk",
    "train_stochastic",
    "__version__",
]
