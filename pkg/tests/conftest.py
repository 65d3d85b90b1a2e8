import numpy as np
import pytest

import compoplab as C


def fit_slope(x, y):
    return float(np.polyfit(np.asarray(x, dtype=float), np.asarray(y, dtype=float), 1)[0])


@pytest.fixture(scope="session")
def roster():
    return C.shipped_symbols()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
