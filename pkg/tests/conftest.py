"""Shared fixtures: seeded RNGs and a desk-scale IDX digit corpus.

The digit corpus is built once per session from scikit-learn's 8x8 digits,
upscaled to the 28x28 IDX layout the ingestion pipeline expects.  It stands
in for the full MNIST train set, which is too large to vendor; the pipeline
code path (IDX parse -> pooling -> thresholding -> aggregation) is identical.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
import pytest


# Acceptance tests append their verdict lines here; the summary hook replays
# them after the run so they survive pytest's output capture.
CRITERION_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter) -> None:
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


def write_idx_images(path: Path, images: np.ndarray) -> None:
    count, rows, cols = images.shape
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 2051, count, rows, cols))
        f.write(images.astype(np.uint8).tobytes())


def write_idx_labels(path: Path, labels: np.ndarray) -> None:
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 2049, len(labels)))
        f.write(labels.astype(np.uint8).tobytes())


@pytest.fixture(scope="session")
def digit_idx_files(tmp_path_factory) -> tuple[Path, Path]:
    """(images_path, labels_path) in IDX format, 28x28, ten digit classes."""
    cv2 = pytest.importorskip("cv2")
    sklearn_datasets = pytest.importorskip("sklearn.datasets")
    digits = sklearn_datasets.load_digits()
    upscaled = np.stack(
        [
            cv2.resize(
                (image * 255.0 / 16.0).astype(np.uint8),
                (28, 28),
                interpolation=cv2.INTER_CUBIC,
            )
            for image in digits.images
        ]
    )
    root = tmp_path_factory.mktemp("idx")
    images_path = root / "images-idx3-ubyte"
    labels_path = root / "labels-idx1-ubyte"
    write_idx_images(images_path, upscaled)
    write_idx_labels(labels_path, digits.target)
    return images_path, labels_path


@pytest.fixture(scope="session")
def digit_dataset(digit_idx_files):
    """Ambiguity-free 3-vs-6 dataset ingested from the session IDX corpus."""
    from qnnlab import data

    images_path, labels_path = digit_idx_files
    raw = data.ingest_mnist(images_path, labels_path, 3, 6)
    return raw, data.remove_ambiguous(raw)
