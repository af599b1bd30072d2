import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixedclust.dataset import MixedDataset, Schema
from mixedclust.distance import (Bins, distance_profile, ed_vector, euclidean, hamming, hd_vector,
                                 make_bins)

from conftest import random_dataset


def _ds(codes, values, levels=None):
    codes = np.asarray(codes, dtype=np.int64)
    values = np.asarray(values, dtype=np.float64)
    levels = levels or tuple(int(codes[:, j].max()) + 2 for j in range(codes.shape[1]))
    return MixedDataset(Schema.from_levels(levels, values.shape[1]), codes, values)


def test_hamming_examples():
    assert hamming([0, 1, 2], [0, 1, 2]) == 0
    assert hamming(["a", "b", "c"], ["a", "b", "d"]) == 1
    assert hamming(["a", "b"], ["c", "d"]) == 2


def test_euclidean_examples():
    assert euclidean([1.5, 2.0], [1.5, 2.0]) == 0.0
    assert euclidean([0, 0], [3, 4]) == 5.0
    assert euclidean([1], [-2]) == 3.0


def test_length_mismatch():
    with pytest.raises(ValueError):
        hamming([0, 1], [0])
    with pytest.raises(ValueError):
        euclidean([0.0], [0.0, 1.0])


def test_hd_vector_examples():
    ds = _ds([[0, 0], [0, 1], [1, 1], [1, 0]], np.zeros((4, 0)), (2, 2))
    np.testing.assert_array_equal(hd_vector(ds, [0, 0]), [1, 2, 1])
    same = _ds([[1, 2]] * 5, np.zeros((5, 0)), (3, 3))
    np.testing.assert_array_equal(hd_vector(same, [1, 2]), [5, 0, 0])
    one = _ds([[1, 1, 1]], np.zeros((1, 0)), (2, 2, 2))
    np.testing.assert_array_equal(hd_vector(one, [0, 0, 0]), [0, 0, 0, 1])


def test_make_bins_examples():
    ds = _ds([[0]], [[3.0, 4.0]])
    b = make_bins(ds, [0.0, 0.0], 10)
    np.testing.assert_allclose(b.edges, np.arange(11) * 0.5, rtol=0, atol=1e-15)
    assert b.upper == 5.0
    b1 = make_bins(_ds([[0], [1]], [[0.0], [2.0]]), [0.0], 1)
    np.testing.assert_array_equal(ed_vector(_ds([[0], [1]], [[0.0], [2.0]]), [0.0], b1), [2])


def test_degenerate_bins_all_at_T():
    ds = _ds([[0]] * 4, [[1.0, 1.0]] * 4)
    b = make_bins(ds, [1.0, 1.0], 10)
    V = ed_vector(ds, [1.0, 1.0], b)
    assert V[0] == 4 and V.sum() == 4


def test_ed_vector_examples():
    b = Bins(np.array([0.0, 1.0, 2.0, 3.0]))
    ds = _ds([[0]] * 3, [[0.0], [0.4], [2.6]])
    np.testing.assert_array_equal(ed_vector(ds, [0.0], b), [2, 0, 1])
    # right-closed: a distance on an interior edge belongs to the lower bin
    edge = _ds([[0]] * 2, [[1.0], [3.0]])
    np.testing.assert_array_equal(ed_vector(edge, [0.0], b), [1, 0, 1])
    two = _ds([[0]] * 2, [[2.0], [3.0]])
    np.testing.assert_array_equal(ed_vector(two, [0.0], b), [0, 1, 1])


def test_ed_vector_rejects_foreign_bins():
    b = Bins(np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        ed_vector(_ds([[0]], [[5.0]]), [0.0], b)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_profile_counts_sum_to_n(seed, l):
    rng = np.random.default_rng(seed)
    ds = random_dataset(rng)
    i = int(rng.integers(ds.n))
    prof = distance_profile(ds, ds.codes[i], ds.values[i], l)
    assert prof.U.sum() == ds.n
    assert prof.V.sum() == ds.n
    assert len(prof.U) == ds.schema.p + 1 and len(prof.V) == l


def test_bins_are_right_closed_at_every_edge():
    b = Bins(np.linspace(0.0, 4.0, 5))
    np.testing.assert_array_equal(b.index([0.0, 1.0, 1.0 + 1e-12, 4.0, 4.5]), [0, 0, 1, 3, 4])
    np.testing.assert_array_equal(b.index([4.5], clamp=True), [3])


def test_euclidean_matches_math_dist(rng):
    for _ in range(50):
        a, c = rng.normal(size=4), rng.normal(size=4)
        assert math.isclose(euclidean(a, c), math.dist(a, c), rel_tol=1e-12)
