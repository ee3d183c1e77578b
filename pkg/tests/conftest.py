import sys

import numpy as np
import pytest

from kohsurvey.tables import CategoricalDataset, Question, build_disjunctive, correct_table

TINY4_CSV = "id,Q1,Q2\ni1,A1,B1\ni2,A1,B2\ni3,A2,B1\ni4,A2,B2\n"


def make_tiny4():
    questions = (Question("Q1", ("A1", "A2")), Question("Q2", ("B1", "B2")))
    return CategoricalDataset(("i1", "i2", "i3", "i4"), questions, [[0, 0], [0, 1], [1, 0], [1, 1]])


def random_dataset(rng, n_max=50, k_max=6, m_max=5, n_min=1):
    """Random survey in which every declared modality is chosen at least once."""
    k = int(rng.integers(1, k_max + 1))
    sizes = [int(rng.integers(1, m_max + 1)) for _ in range(k)]
    n = int(rng.integers(max(n_min, max(sizes)), n_max + 1))
    cols = []
    for m in sizes:
        col = np.concatenate([np.arange(m), rng.integers(m, size=n - m)])
        cols.append(rng.permutation(col))
    questions = tuple(
        Question(f"Q{q}", tuple(f"Q{q}m{a}" for a in range(m))) for q, m in enumerate(sizes)
    )
    ids = tuple(f"r{i}" for i in range(n))
    return CategoricalDataset(ids, questions, np.stack(cols, axis=1))


@pytest.fixture
def tiny4():
    return make_tiny4()


@pytest.fixture
def tiny4_D(tiny4):
    return build_disjunctive(tiny4)


@pytest.fixture
def tiny4_Dc(tiny4_D):
    return correct_table(tiny4_D)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)
