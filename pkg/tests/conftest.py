import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from macrocluster.metrics import DistanceMatrix  # noqa: E402

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


def labelled(d, prefix="N"):
    """DistanceMatrix with codes N0, N1, ... for a raw array."""
    d = np.asarray(d, dtype=float)
    return DistanceMatrix([f"{prefix}{i}" for i in range(d.shape[0])], d, "euclidean")


def abc(ab=1.0, bc=2.0, ac=3.0):
    """Three-node matrix used throughout the hierarchy examples."""
    return DistanceMatrix(["A", "B", "C"], [[0, ab, ac], [ab, 0, bc], [ac, bc, 0]], "euclidean")
