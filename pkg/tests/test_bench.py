import csv
import io
import math

import numpy as np
import pytest

from mixedclust.bench import (TABLES, SynthConfig, classification_rate, gen_mixed, information_gain,
                              replicate_seed, report_csv, run_setting, summarize, table_config)
from mixedclust.config import ClusterConfig


def test_table1_generator():
    ld = gen_mixed(table_config(1, 0.25, seed=2))
    assert ld.data.n == 200 and (ld.data.schema.p, ld.data.schema.q) == (10, 10)
    np.testing.assert_array_equal(np.bincount(ld.truth)[1:], [100, 75, 25])
    assert set(ld.data.schema.levels) <= {4, 5, 6}


def test_categorical_centers_separated():
    for seed in range(10):
        ld = gen_mixed(table_config(3, seed=seed))
        c = ld.cat_centers
        for a in range(len(c)):
            for b in range(a):
                assert np.count_nonzero(c[a] != c[b]) >= 5


def test_zero_variance_rows_sit_on_centers():
    ld = gen_mixed(SynthConfig(sizes=(5, 5), sigma2=0.0, seed=1))
    np.testing.assert_array_equal(ld.data.values, ld.cont_centers[ld.truth - 1])


def test_single_cluster():
    ld = gen_mixed(SynthConfig(sizes=(50,), seed=4))
    assert set(ld.truth.tolist()) == {1}


def test_generator_deterministic():
    a, b = gen_mixed(table_config(2, 0.5, 9)), gen_mixed(table_config(2, 0.5, 9))
    assert a.data.equals(b.data) and np.array_equal(a.truth, b.truth)


def test_center_level_frequency():
    ld = gen_mixed(SynthConfig(sizes=(10000,), p=3, q=1, seed=0))
    freq = (ld.data.codes == ld.cat_centers[0]).mean(axis=0)
    assert np.all(np.abs(freq - 0.7) <= 0.03)


@pytest.mark.parametrize("kw", [dict(sizes=(0, 0)), dict(sigma2=-1.0), dict(center_prob=0.2), dict(level_pool=(1,))])
def test_synth_config_rejects(kw):
    with pytest.raises(ValueError):
        SynthConfig(**kw)


def test_classification_rate_examples():
    assert classification_rate([1, 1, 2, 2], [1, 1, 2, 2]) == 1.0
    assert classification_rate([1, 1, 2, 2], [2, 2, 1, 1]) == 1.0
    assert classification_rate([1, 1, 2, 2], [1, 2, 1, 2]) == 0.5
    assert classification_rate([1, 1, 2, 2], [0, 0, 0, 0]) == 0.0
    with pytest.raises(ValueError):
        classification_rate([1, 2], [1])


def test_classification_rate_relabel_invariant(rng):
    for _ in range(30):
        t = rng.integers(1, 4, 50)
        p = rng.integers(0, 5, 50)
        perm = np.concatenate([[0], rng.permutation(np.arange(1, 5)) + 10])
        assert classification_rate(t, p) == classification_rate(t * 7, perm[p])
        assert 0.0 <= classification_rate(t, p) <= 1.0


def test_information_gain_examples():
    assert information_gain([1, 1, 2, 2], [5, 5, 9, 9]) == pytest.approx(1.0, abs=1e-12)
    assert information_gain([1, 1, 2, 2], [3, 3, 3, 3]) == pytest.approx(0.0, abs=1e-12)
    h = -(2 / 3) * math.log2(2 / 3) - (1 / 3) * math.log2(1 / 3)
    assert information_gain([1, 1, 2, 2], [1, 1, 1, 2]) == pytest.approx(1 - 0.75 * h, abs=1e-12)
    assert information_gain([1, 1, 2, 2], [1, 1, 1, 2]) == pytest.approx(0.3113, abs=1e-4)
    with pytest.raises(ValueError):
        information_gain([1, 1, 1], [1, 2, 3])


def test_information_gain_bounds(rng):
    for _ in range(30):
        t = rng.integers(1, 4, 40)
        t[:2] = [1, 2]
        v = information_gain(t, rng.integers(0, 6, 40))
        assert 0.0 <= v <= 1.0


def test_replicate_seeds_distinct():
    seeds = {replicate_seed(0, t, v, r) for t in TABLES for v in (0.25, 0.5) for r in range(10)}
    assert len(seeds) == len(TABLES) * 2 * 10


def test_report_layout():
    cfg = ClusterConfig(calib_B=19)
    rows = run_setting(1, 0.25, 2, cfg, seed=0, p=4, q=4)
    text = report_csv(rows)
    table = list(csv.reader(io.StringIO(text)))
    assert table[0][:6] == ["replicate", "setting", "CR", "IG", "clusters_found", "runtime_ms"]
    assert [r[0] for r in table[1:]] == ["0", "1", "mean", "std"]
    s = summarize(rows)["table1_var0.25"]
    assert s["CR_mean"] == pytest.approx(np.mean([r.CR for r in rows]))
