"""Synthetic mixed-data benchmark: generator, scoring metrics and table sweeps."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from .cluster import run_clustering
from .config import ClusterConfig
from .dataset import MixedDataset, Schema


@dataclass(frozen=True)
class SynthConfig:
    p: int = 10
    q: int = 10
    level_pool: tuple[int, ...] = (4, 5, 6)
    sizes: tuple[int, ...] = (100, 75, 25)
    center_prob: float = 0.7
    sigma2: float = 0.25
    center_gap: float = 3.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        object.__setattr__(self, "level_pool", tuple(int(m) for m in self.level_pool))
        if self.p < 0 or self.q < 0 or self.p + self.q < 1:
            raise ValueError("need p >= 0, q >= 0, p + q >= 1")
        if not self.sizes or min(self.sizes) < 0 or sum(self.sizes) == 0:
            raise ValueError(f"invalid cluster sizes {self.sizes}")
        if self.p and (not self.level_pool or min(self.level_pool) < 2):
            raise ValueError("level pool must hold level counts >= 2")
        if self.p and not 1.0 / min(self.level_pool) < self.center_prob <= 1.0:
            raise ValueError("center_prob must lie in (1/m_j, 1] for every level count")
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be >= 0")

    @property
    def K(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)


@dataclass(frozen=True)
class LabeledDataset:
    data: MixedDataset
    truth: np.ndarray
    cat_centers: np.ndarray = field(repr=False, default=None)
    cont_centers: np.ndarray = field(repr=False, default=None)


def _cat_centers(rng, levels, K):
    p = len(levels)
    min_hd = math.ceil(p / 2)
    centers = []
    while len(centers) < K:
        c = np.array([rng.integers(0, m) for m in levels], dtype=np.int64)
        if all(np.count_nonzero(c != o) >= min_hd for o in centers):
            centers.append(c)
    return np.array(centers, dtype=np.int64).reshape(K, p)


def gen_mixed(cfg: SynthConfig) -> LabeledDataset:
    """Draw a labelled dataset of ``K`` clusters.

    Cluster ``k`` (1-based) keeps each categorical center level with probability
    ``center_prob`` and spreads the rest evenly over the other levels; its
    continuous part is normal around ``(gap * k, ..., gap * k)`` with variance
    ``sigma2`` per coordinate.
    """
    rng = np.random.default_rng(cfg.seed)
    levels = tuple(int(rng.choice(cfg.level_pool)) for _ in range(cfg.p))
    schema = Schema.from_levels(levels, cfg.q)
    centers = _cat_centers(rng, levels, cfg.K)
    cont_centers = np.array([[cfg.center_gap * k] * cfg.q for k in range(1, cfg.K + 1)], dtype=np.float64)

    codes, values, truth = [], [], []
    sd = math.sqrt(cfg.sigma2)
    for k, n_k in enumerate(cfg.sizes):
        block = np.empty((n_k, cfg.p), dtype=np.int64)
        for j, m in enumerate(levels):
            keep = rng.random(n_k) < cfg.center_prob
            # uniform over the m - 1 non-center levels
            other = rng.integers(0, m - 1, size=n_k)
            other = other + (other >= centers[k, j])
            block[:, j] = np.where(keep, centers[k, j], other)
        codes.append(block)
        values.append(cont_centers[k] + sd * rng.standard_normal((n_k, cfg.q)))
        truth.append(np.full(n_k, k + 1, dtype=np.int64))
    ds = MixedDataset(schema, np.vstack(codes), np.vstack(values))
    return LabeledDataset(ds, np.concatenate(truth), centers, cont_centers)


def _check_pair(truth, pred):
    truth = np.asarray(truth)
    pred = np.asarray(pred)
    if truth.shape != pred.shape or truth.ndim != 1:
        raise ValueError(f"label length mismatch: {truth.shape} vs {pred.shape}")
    return truth, pred


def classification_rate(truth, pred) -> float:
    """Share of rows agreeing under the best one-to-one cluster matching.

    Predicted label 0 (unassigned) never matches a truth cluster.
    """
    truth, pred = _check_pair(truth, pred)
    if truth.size == 0:
        return 0.0
    t_labels = np.unique(truth)
    p_labels = np.unique(pred[pred != 0])
    if p_labels.size == 0:
        return 0.0
    confusion = np.zeros((p_labels.size, t_labels.size), dtype=np.int64)
    np.add.at(
        confusion,
        (np.searchsorted(p_labels, pred[pred != 0]), np.searchsorted(t_labels, truth[pred != 0])),
        1,
    )
    rows, cols = linear_sum_assignment(confusion, maximize=True)
    return float(confusion[rows, cols].sum() / truth.size)


def _entropy(counts) -> float:
    counts = np.asarray(counts, dtype=np.float64)
    counts = counts[counts > 0]
    prob = counts / counts.sum()
    return float(-(prob * np.log2(prob)).sum())


def information_gain(truth, pred) -> float:
    """Uncertainty coefficient ``(H(truth) - H(truth | pred)) / H(truth)`` in bits.

    Unassigned rows (label 0) form their own predicted group.
    """
    truth, pred = _check_pair(truth, pred)
    _, t_idx = np.unique(truth, return_inverse=True)
    if t_idx.max(initial=0) < 1:
        raise ValueError("information gain needs at least two truth classes")
    h = _entropy(np.bincount(t_idx))
    n = truth.size
    h_cond = 0.0
    for g in np.unique(pred):
        mask = pred == g
        h_cond += mask.sum() / n * _entropy(np.bincount(t_idx[mask]))
    ig = (h - h_cond) / h
    return float(min(max(ig, 0.0), 1.0))


# Tables 1-4: cluster sizes; each table is run at three continuous variances
TABLES = {
    1: (100, 75, 25),
    2: (130, 45, 25),
    3: (40, 25, 15, 10, 10),
    4: (35, 25, 20, 10, 10),
}
VARIANCES = (0.25, 0.5, 1.0)


def table_config(table: int, sigma2: float = 0.25, seed: int = 0, **kw) -> SynthConfig:
    return SynthConfig(sizes=TABLES[table], sigma2=sigma2, seed=seed, **kw)


def replicate_seed(seed: int, table: int, sigma2: float, replicate: int) -> int:
    ss = np.random.SeedSequence([int(seed), int(table), int(round(sigma2 * 1000)), int(replicate)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


@dataclass
class BenchRow:
    replicate: int
    setting: str
    CR: float
    IG: float
    clusters_found: int
    runtime_ms: float
    CR_cat: float | None = None
    IG_cat: float | None = None
    CR_cont: float | None = None
    IG_cont: float | None = None


def _portion(ld: LabeledDataset, keep: str) -> MixedDataset:
    ds = ld.data
    if keep == "cat":
        schema = Schema(ds.schema.cat_attrs, ())
        return MixedDataset(schema, ds.codes, np.empty((ds.n, 0)))
    schema = Schema((), ds.schema.cont_attrs)
    return MixedDataset(schema, np.empty((ds.n, 0), dtype=np.int64), ds.values)


def run_replicate(synth: SynthConfig, config: ClusterConfig, replicate: int = 0,
                  setting: str = "", per_portion: bool = False) -> BenchRow:
    ld = gen_mixed(synth)
    t0 = time.perf_counter()
    res = run_clustering(ld.data, config)
    ms = (time.perf_counter() - t0) * 1000.0
    pred = res.labels()
    row = BenchRow(replicate, setting, classification_rate(ld.truth, pred),
                   information_gain(ld.truth, pred), len(res.clusters), ms)
    if per_portion:
        for keep in ("cat", "cont"):
            part = run_clustering(_portion(ld, keep), config).labels()
            setattr(row, f"CR_{keep}", classification_rate(ld.truth, part))
            setattr(row, f"IG_{keep}", information_gain(ld.truth, part))
    return row


def run_setting(table: int, sigma2: float, replicates: int, config: ClusterConfig,
                seed: int = 0, per_portion: bool = False, **synth_kw) -> list[BenchRow]:
    setting = f"table{table}_var{sigma2:g}"
    rows = []
    for r in range(replicates):
        synth = table_config(table, sigma2, replicate_seed(seed, table, sigma2, r), **synth_kw)
        # each replicate gets its own null/calibration streams
        cfg = replace(config, null_seed=synth.seed, calib_seed=synth.seed)
        rows.append(run_replicate(synth, cfg, r, setting, per_portion))
    return rows


_COLUMNS = ["replicate", "setting", "CR", "IG", "clusters_found", "runtime_ms",
            "CR_cat", "IG_cat", "CR_cont", "IG_cont"]


def summarize(rows: list[BenchRow]) -> dict[str, dict[str, float]]:
    """Mean and standard deviation of each metric per setting."""
    out = {}
    for setting in dict.fromkeys(r.setting for r in rows):
        sel = [r for r in rows if r.setting == setting]
        stats = {}
        for col in _COLUMNS[2:]:
            vals = [getattr(r, col) for r in sel if getattr(r, col) is not None]
            if vals:
                stats[f"{col}_mean"] = float(np.mean(vals))
                stats[f"{col}_std"] = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
        out[setting] = stats
    return out


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def report_csv(rows: list[BenchRow]) -> str:
    """Per-replicate rows followed by ``mean`` and ``std`` rows for each setting."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_COLUMNS)
    for r in rows:
        w.writerow([_fmt(getattr(r, c)) for c in _COLUMNS])
    for setting, stats in summarize(rows).items():
        for kind in ("mean", "std"):
            w.writerow([kind, setting] + [_fmt(stats.get(f"{c}_{kind}")) for c in _COLUMNS[2:]])
    return buf.getvalue()
