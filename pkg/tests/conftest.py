import numpy as np
import pytest

from bandclust import BandMatrix, from_dense


@pytest.fixture
def m3() -> BandMatrix:
    """3x3 tridiagonal example used throughout the docs and tests."""
    return from_dense([[1, .5, 0], [.5, 1, .2], [0, .2, 1]], h=2)


def random_band(p: int, h: int, rng, definite: bool = True) -> BandMatrix:
    """Random symmetric band matrix; row-dominant diagonal when definite."""
    a = np.zeros((p, p))
    for d in range(1, h):
        vals = rng.uniform(size=p - d)
        idx = np.arange(p - d)
        a[idx, idx + d] = vals
        a[idx + d, idx] = vals
    if definite:
        np.fill_diagonal(a, 1.0 + a.sum(axis=1))
    else:
        np.fill_diagonal(a, rng.uniform(-1, 1, size=p))
    return from_dense(a, h=h)


def brute_pencil(dense: np.ndarray, r: int, l: int) -> float:
    """Literal double sum over the forward pencil index set (1-based r, l)."""
    total = 0.0
    for a in range(1, r + 1):
        for b in range(1, r + 1):
            if abs(a - b) < l:
                total += dense[a - 1, b - 1]
    return total


def brute_pencil_backward(dense: np.ndarray, r: int, l: int) -> float:
    p = dense.shape[0]
    total = 0.0
    for a in range(r, p + 1):
        for b in range(r, p + 1):
            if abs(a - b) < l:
                total += dense[a - 1, b - 1]
    return total
