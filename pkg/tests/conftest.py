import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def unit(v):
    v = np.asarray(v, dtype=np.float64)
    return v / np.linalg.norm(v)


def brute_sphere_max(T, samples, seed=0, chunk=200_000):
    """Max of T(x, y, z) over sampled unit x, y with z solved exactly."""
    rng = np.random.default_rng(seed)
    best = -np.inf
    n1, n2, _ = T.shape
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        x = rng.standard_normal((k, n1))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        y = rng.standard_normal((k, n2))
        y /= np.linalg.norm(y, axis=1, keepdims=True)
        g = np.einsum("ijk,si,sj->sk", T, x, y)
        best = max(best, float(np.max(np.linalg.norm(g, axis=1))))
        done += k
    return best
