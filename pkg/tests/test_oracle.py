import numpy as np
import pytest

from bandclust import cluster_naive, euclidean_ward_check, from_dense, to_dense
from conftest import random_band


class TestClusterNaive:
    def test_m3(self, m3):
        d = cluster_naive(m3)
        assert list(d.left) == [-1, 1] and list(d.right) == [-2, -3]
        assert d.heights[0] == pytest.approx(0.5)
        assert d.heights[1] == pytest.approx(3 / 2 + 1 - 4.4 / 3)

    def test_identity2(self):
        d = cluster_naive(np.eye(2))
        assert d.heights[0] == pytest.approx(1.0)

    def test_constant_matrix(self):
        d = cluster_naive(np.full((5, 5), 0.7))
        assert np.allclose(d.heights, 0.0)
        # leftmost tie rule: first merge joins positions 1 and 2
        assert d.starts[0] == 1 and d.ends[0] == 2

    def test_accepts_band_matrix(self, m3):
        assert np.array_equal(cluster_naive(m3).heights,
                              cluster_naive(to_dense(m3)).heights)


class TestEuclideanWard:
    def test_collinear_spacing_one(self):
        d = euclidean_ward_check(np.array([[0.0], [1.0], [2.0]]))
        assert d.heights[0] == pytest.approx(0.5)

    def test_coincident_points(self):
        d = euclidean_ward_check(np.array([[1.0, 2.0], [1.0, 2.0]]))
        assert d.heights[0] == pytest.approx(0.0)

    def test_two_points(self):
        d = euclidean_ward_check(np.array([[0.0], [2.0]]))
        assert d.heights[0] == pytest.approx(2.0)

    @pytest.mark.parametrize("p,dim,seed", [(5, 1, 0), (12, 2, 1), (30, 5, 2)])
    def test_matches_gram_path(self, p, dim, seed):
        # validates the similarity-space linkage formula against direct ESS
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(p, dim))
        de = euclidean_ward_check(x)
        dg = cluster_naive(x @ x.T)
        assert np.array_equal(de.splits, dg.splits)
        np.testing.assert_allclose(de.heights, dg.heights, rtol=1e-9, atol=1e-12)


def test_naive_equals_fast_at_full_bandwidth():
    from bandclust import cluster
    rng = np.random.default_rng(77)
    for p in (5, 37, 120):
        m = random_band(p, p, rng)
        d = cluster(m)
        o = cluster_naive(to_dense(m))
        assert np.array_equal(d.splits, o.splits)
        np.testing.assert_allclose(d.heights, o.heights, rtol=1e-9)
