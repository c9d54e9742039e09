import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def haar_qubit_unitaries(n, rng):
    out = []
    for _ in range(n):
        z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        q, r = np.linalg.qr(z)
        out.append(q * (np.diag(r) / np.abs(np.diag(r))))
    return out
