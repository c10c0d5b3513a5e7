import functools

import numpy as np
import pytest

from hpcgblas import GridDims, build_from_triplets, build_hierarchy, set_num_threads


def laplacian_1d(n):
    """Tridiagonal [-1, 2, -1] matrix."""
    trip = [(i, i, 2.0) for i in range(n)]
    trip += [(i, i + 1, -1.0) for i in range(n - 1)]
    trip += [(i + 1, i, -1.0) for i in range(n - 1)]
    return build_from_triplets(n, n, trip)


@functools.lru_cache(maxsize=None)
def hierarchy(n, levels):
    return build_hierarchy(GridDims(n, n, n), levels)


def random_sparse(rng, nrows, ncols, density=0.3):
    dense = rng.standard_normal((nrows, ncols)) * (rng.random((nrows, ncols)) < density)
    r, c = np.nonzero(dense)
    return build_from_triplets(nrows, ncols, list(zip(r.tolist(), c.tolist(), dense[r, c].tolist())))


@pytest.fixture(autouse=True)
def _serial():
    set_num_threads(1)
    yield
    set_num_threads(1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
