import numpy as np
import pytest

from mixedclust.dataset import MixedDataset, Schema


def random_dataset(rng, n=None, p=None, q=None, max_levels=5):
    n = int(rng.integers(1, 40)) if n is None else n
    p = int(rng.integers(0, 5)) if p is None else p
    q = int(rng.integers(0, 5)) if q is None else q
    if p + q == 0:
        p = 1
    levels = tuple(int(m) for m in rng.integers(2, max_levels + 1, size=p))
    schema = Schema.from_levels(levels, q)
    codes = np.column_stack([rng.integers(0, m, n) for m in levels]) if p else np.empty((n, 0), dtype=np.int64)
    values = rng.normal(size=(n, q)) * rng.uniform(0.1, 5.0)
    return MixedDataset(schema, codes, values)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
