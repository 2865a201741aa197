import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tabsel.ingest import Dataset  # noqa: E402


def planted_dataset(seed, n=500, n_informative=5, n_noise=15, flip=0.1):
    """Label copies with ``flip`` label noise plus permuted-copy noise columns."""
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 2, n)
    informative = np.stack(
        [np.where(rng.random(n) < flip, 1 - y, y) for _ in range(n_informative)], axis=1
    ).astype(float)
    noise = np.stack([rng.permutation(informative[:, i % n_informative]) for i in range(n_noise)], axis=1)
    X = np.hstack([informative, noise])
    names = [f"inf{i}" for i in range(n_informative)] + [f"noise{i}" for i in range(n_noise)]
    return Dataset(X, y, names, ["neg", "pos"])


def blobs(seed, n_per_class=100, sep=6.0, d=2, k=2):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n_per_class * k, d))
    y = np.repeat(np.arange(k), n_per_class)
    X[:, 0] += sep * y - sep * (k - 1) / 2
    return Dataset(X, y, [f"x{i}" for i in range(d)], [f"c{i}" for i in range(k)])


@pytest.fixture
def planted():
    return planted_dataset


@pytest.fixture
def make_blobs():
    return blobs


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
