"""Cut-off points, the modified chi-square statistics and threshold calibration."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .config import ClusterConfig, rank_of
from .dataset import MixedDataset, Schema
from .nullmodel import NullSample, sample_null, uhd_vector


@dataclass(frozen=True)
class TestResult:
    r_c: int
    r_d: int
    chi_c: float
    chi_d: float
    chi_w: float
    tail_empty: bool = False

    __test__ = False  # not a pytest class


@dataclass(frozen=True)
class Threshold:
    alpha: float
    value: float
    B: int
    seed: object
    null_maxima: np.ndarray | None = None


def _as_float(a):
    return np.asarray(a, dtype=np.float64)


def cutoff_categorical(U, eps, floor: float = 0.5) -> int:
    """First ``j > 0`` where ``U_j / eps_j < 1``, minus one; ``p - 1`` if the curves never cross.

    Cells with expected count ``eps_j < floor`` are skipped.
    """
    U, eps = _as_float(U), _as_float(eps)
    if U.shape != eps.shape or U.ndim != 1 or U.size < 2:
        raise ValueError("U and eps must be equal-length vectors of length p + 1 >= 2")
    if (eps <= 0).any():
        raise ValueError("eps must be strictly positive")
    return int(_kernels.cutoff_cat(U, eps, float(floor)))


def cutoff_continuous(V, nu, minus_one: bool = False) -> int:
    """First 1-based ``j`` in ``2..l-1`` with ``V_j / nu_j < 1`` (empty null bins skipped).

    Falls back to ``l - 1``. ``minus_one`` gives the variant that subtracts one,
    mirroring the categorical cut-off.
    """
    V, nu = _as_float(V), _as_float(nu)
    if V.shape != nu.shape or V.ndim != 1 or V.size < 2:
        raise ValueError("V and nu must be equal-length vectors with l >= 2")
    return int(_kernels.cutoff_cont(V, nu, bool(minus_one)))


def chisq_categorical(U, eps, r_c: int) -> float:
    U, eps = _as_float(U), _as_float(eps)
    p = U.size - 1
    if not 0 <= r_c <= p - 1:
        raise ValueError(f"r_c must lie in [0, {p - 1}], got {r_c}")
    return float(_kernels.chisq_cat(U, eps, int(r_c)))


def chisq_continuous(V, nu, r_d: int, delta: float = 0.5, return_window: bool = False):
    """Continuous statistic over bins ``1..r_d`` plus the pooled tail term.

    Window bins with ``nu_j = 0`` contribute ``V_j**2 / delta``. An empty null
    tail with a nonzero window imbalance yields ``inf``; ``return_window`` also
    returns the finite window sum so callers can fall back on it.
    """
    V, nu = _as_float(V), _as_float(nu)
    l = V.size
    if not 1 <= r_d <= l - 1:
        raise ValueError(f"r_d must lie in [1, {l - 1}], got {r_d}")
    total, window = _kernels.chisq_cont(V, nu, int(r_d), float(delta))
    return (float(total), float(window)) if return_window else float(total)


def chisq_weighted(chi_c, chi_d, p: int, q: int):
    if p < 0 or q < 0 or p + q < 1:
        raise ValueError("need p >= 0, q >= 0 and p + q >= 1")
    c = chi_c / p if p else 0.0 * np.asarray(chi_c)
    d = chi_d / q if q else 0.0 * np.asarray(chi_d)
    out = c + d
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Scan:
    """Statistics at every row of a dataset used as reference position."""

    chi_c: np.ndarray
    chi_d: np.ndarray
    chi_d_window: np.ndarray
    r_c: np.ndarray
    r_d: np.ndarray
    p: int
    q: int

    @property
    def chi_w(self) -> np.ndarray:
        return chisq_weighted(self.chi_c, self.chi_d, self.p, self.q)

    @property
    def tail_empty(self) -> np.ndarray:
        return np.isinf(self.chi_d)

    def scores(self, threshold: float | None = None) -> np.ndarray:
        """Ranking scores for center selection.

        Positions whose continuous statistic is infinite are scored on the finite
        window term instead, and count as maximal only when that score already
        reaches ``threshold``.
        """
        d = np.where(self.tail_empty, self.chi_d_window, self.chi_d)
        finite = chisq_weighted(self.chi_c, d, self.p, self.q)
        if threshold is None:
            return finite
        return np.where(self.tail_empty & (finite >= threshold), math.inf, finite)

    def result(self, k: int) -> TestResult:
        return TestResult(
            int(self.r_c[k]),
            int(self.r_d[k]),
            float(self.chi_c[k]),
            float(self.chi_d[k]),
            float(self.chi_w[k]),
            bool(self.tail_empty[k]),
        )


def scan_statistics(
    ds: MixedDataset,
    null: NullSample,
    config: ClusterConfig | None = None,
    eps=None,
    backend=None,
) -> Scan:
    """Evaluate cut-offs and statistics with each row of ``ds`` as reference ``(S, T)``.

    Rows are split into contiguous chunks across ``config.threads`` workers; the
    output does not depend on the thread count.
    """
    cfg = config or ClusterConfig()
    n = ds.n
    if eps is None:
        eps = uhd_vector(ds.schema, n)
    centers = np.arange(n, dtype=np.int64)
    args = (ds.codes, ds.values)
    tail = (null.values, eps, cfg.bins, cfg.zero_floor, cfg.continuous_minus_one)
    workers = min(cfg.threads, n)
    if workers <= 1:
        parts = [_kernels.scan(*args, centers, *tail, backend=backend)]
    else:
        chunks = np.array_split(centers, workers)
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda c: _kernels.scan(*args, c, *tail, backend=backend), chunks))
    cols = [np.concatenate([part[i] for part in parts]) for i in range(5)]
    return Scan(*cols, p=ds.schema.p, q=ds.schema.q)


def null_dataset(schema: Schema, n: int, rng, box=None) -> MixedDataset:
    """Structureless dataset: uniform lattice codes and uniform values over ``box``."""
    codes = np.empty((n, schema.p), dtype=np.int64)
    for j, m in enumerate(schema.levels):
        codes[:, j] = rng.integers(0, m, size=n)
    lo, hi = box if box is not None else (np.zeros(schema.q), np.ones(schema.q))
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    values = lo + (hi - lo) * rng.random((n, schema.q))
    return MixedDataset(schema, codes, values)


def null_max_statistic(schema: Schema, n: int, seed, config: ClusterConfig, box=None, backend=None):
    """Largest ranking score over all rows of one simulated structureless dataset."""
    rng = np.random.default_rng(seed)
    ds = null_dataset(schema, n, rng, box)
    null = sample_null(ds, config.null_size_for(n), rng, config.null_mode)
    single = ClusterConfig(**{**config.__dict__, "threads": 1})
    return float(scan_statistics(ds, null, single, backend=backend).scores().max())


def calibrate_threshold(
    schema: Schema,
    n: int,
    l: int = 10,
    alpha: float = 0.05,
    B: int = 199,
    seed=0,
    box=None,
    config: ClusterConfig | None = None,
    backend=None,
) -> Threshold:
    """Monte-Carlo critical value for the maximum weighted statistic.

    Simulates ``B`` structureless datasets of size ``n`` (uniform lattice times
    uniform ``box``), takes the maximum statistic over each dataset's own rows,
    and returns the ``(B + 1)(1 - alpha)``-th smallest maximum.
    """
    if B < 19:
        raise ValueError(f"B must be >= 19, got {B}")
    k = rank_of(B, alpha)
    base = config or ClusterConfig()
    cfg = ClusterConfig(**{**base.__dict__, "bins": l, "alpha": alpha, "calib_B": B})
    if box is not None:
        # the null maximum depends on the box only through its side lengths, so
        # calibrate on a canonical box; reordering or moving the data cannot change it
        lo, hi = (np.asarray(b, dtype=np.float64) for b in box)
        width = np.sort(hi - lo)[::-1]
        box = (np.zeros_like(width), width)
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    seeds = ss.spawn(B)
    run = lambda s: null_max_statistic(schema, n, s, cfg, box, backend)  # noqa: E731
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            maxima = np.array(list(pool.map(run, seeds)))
    else:
        maxima = np.array([run(s) for s in seeds])
    value = float(np.sort(maxima)[k - 1])
    return Threshold(alpha, value, B, seed, maxima)
