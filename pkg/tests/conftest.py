import numpy as np
import pytest

from psifrac import _backend


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # JIT-compile (or load from cache) the hot kernels once, so timed
    # acceptance sections measure steady-state throughput
    _backend.l1_weights(np.linspace(0.0, 1.0, 8), 0.5)
    _backend.ml_series(np.array([0.5, 2.0]), 0.8, 1e-12, 200)
    yield
