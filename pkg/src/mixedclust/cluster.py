"""Center selection, radius estimation and the iterative extraction loop."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .config import ClusterConfig
from .dataset import MixedDataset
from .distance import Bins, euclidean_to, hamming_to, make_bins
from .nullmodel import NullSample, data_box, sample_null, ued_vector, uhd_vector
from .stat import Scan, TestResult, Threshold, calibrate_threshold, scan_statistics

log = logging.getLogger(__name__)

_NULL_STREAM = 0
_CALIB_STREAM = 1


@dataclass(frozen=True)
class Cluster:
    center_row: int
    center_cat: np.ndarray
    center_cont: np.ndarray
    R_c: int
    R_d: float
    members: np.ndarray
    stat: TestResult

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class IterationRecord:
    """What the extraction loop saw at one iteration, winning center included."""

    iteration: int
    n_remaining: int
    center_row: int
    score: float
    threshold: float
    significant: bool
    stat: TestResult
    U: np.ndarray
    eps: np.ndarray
    V: np.ndarray
    nu: np.ndarray
    edges: np.ndarray
    sorted_ed: np.ndarray
    R_c: int | None = None
    R_d: float | None = None
    n_members: int = 0


@dataclass
class ClusterResult:
    n: int
    clusters: list[Cluster] = field(default_factory=list)
    unassigned: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    iterations: list[IterationRecord] = field(default_factory=list)

    def labels(self) -> np.ndarray:
        """Per-row labels ``1..K`` in extraction order; ``0`` marks unassigned rows."""
        out = np.zeros(self.n, dtype=np.int64)
        for k, c in enumerate(self.clusters, start=1):
            out[c.members] = k
        return out


def best_center(ds: MixedDataset, null: NullSample, config: ClusterConfig | None = None,
                threshold: float | None = None, scan: Scan | None = None):
    """Row maximising the weighted statistic; the first (lowest-index) row wins ties.

    Returns ``(row, TestResult, score)``.
    """
    if ds.n < 1:
        raise ValueError("empty dataset")
    scan = scan or scan_statistics(ds, null, config)
    scores = scan.scores(threshold)
    k = int(np.argmax(scores))
    return k, scan.result(k), float(scores[k])


def radius_categorical(U, r_c: int) -> int:
    """Index of the first strict interior local minimum of ``U``, minus one.

    The search starts at the cut-off (``j >= r_c + 1``): up to it, every count
    exceeds its uniform expectation, so a dip there is noise inside the
    concentration rather than its edge. Falls back to ``r_c`` when no such
    minimum exists (always the case for ``p < 2``).
    """
    U = np.asarray(U)
    p = len(U) - 1
    for j in range(max(1, int(r_c) + 1), p):
        if U[j] < min(U[j - 1], U[j + 1]):
            return j - 1
    return int(r_c)


MIN_BEFORE_JUMP = 3


def radius_continuous(eds, bins: Bins, r_d: int, jump_factor: float = 5.0) -> float:
    """Distance just before the first jump in the sorted distances up to the cut-off bin.

    Only distances not beyond the upper edge of bin ``r_d`` are considered. The
    center's own zero distance (and exact duplicates) never opens a jump. A gap
    is a jump when it exceeds ``jump_factor`` times the standard deviation of
    the positive distances below it, once at least ``MIN_BEFORE_JUMP`` of them
    have been seen. Without a jump the radius is the largest considered distance.
    """
    eds = np.sort(np.asarray(eds, dtype=np.float64))
    considered = eds[eds <= bins.edges[r_d]]
    if considered.size < 2:
        return 0.0
    pos = considered[considered > 0]
    if pos.size == 0:
        return 0.0
    gaps = np.diff(pos)
    count = np.arange(1, pos.size + 1)
    # running population sd of pos[:i + 1]
    mean = np.cumsum(pos) / count
    var = np.maximum(np.cumsum(pos * pos) / count - mean * mean, 0.0)
    spread = np.sqrt(var)[:-1]
    ok = (count[:-1] >= MIN_BEFORE_JUMP) & (spread > 0) & (gaps > jump_factor * spread)
    jumps = np.flatnonzero(ok)
    if jumps.size == 0:
        return float(considered[-1])
    return float(pos[jumps[0]])


def extract(ds: MixedDataset, center_cat, center_cont, R_c: int, R_d: float, rule: str = "and") -> np.ndarray:
    """Row indices of ``ds`` within both radii of the center (either radius for ``rule="or"``)."""
    in_cat = hamming_to(ds.codes, np.asarray(center_cat)) <= R_c
    in_cont = euclidean_to(ds.values, np.asarray(center_cont)) <= R_d
    mask = in_cat & in_cont if rule == "and" else in_cat | in_cont
    return np.flatnonzero(mask)


def _seed(base: int, stream: int, iteration: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(base), stream, iteration])


def iteration_threshold(cur: MixedDataset, cfg: ClusterConfig, iteration: int) -> Threshold:
    if cfg.threshold_fixed is not None:
        return Threshold(cfg.alpha, float(cfg.threshold_fixed), 0, None)
    box = data_box(cur.values) if cur.schema.q else None
    return calibrate_threshold(
        cur.schema, cur.n, cfg.bins, cfg.alpha, cfg.calib_B,
        seed=_seed(cfg.calib_seed, _CALIB_STREAM, iteration), box=box, config=cfg,
    )


def run_clustering(ds: MixedDataset, config: ClusterConfig | None = None) -> ClusterResult:
    """Extract clusters one at a time until no significant pattern remains.

    Each iteration works on the rows not yet extracted: rebuild the null
    references for the current size, scan every remaining row as a candidate
    center, stop if the best weighted statistic is below the critical value,
    otherwise extract the rows within the radii of the best-scoring
    significant center whose extraction reaches ``min_cluster_size``.
    """
    cfg = config or ClusterConfig()
    if ds.n < 1:
        raise ValueError("empty dataset")
    p, q = ds.schema.p, ds.schema.q
    result = ClusterResult(ds.n)
    remaining = np.arange(ds.n, dtype=np.int64)
    it = 0
    while remaining.size >= max(cfg.min_cluster_size, 1):
        cur = ds.subset(remaining)
        null = sample_null(cur, cfg.null_size_for(cur.n), _seed(cfg.null_seed, _NULL_STREAM, it), cfg.null_mode)
        thr = iteration_threshold(cur, cfg, it)
        scan = scan_statistics(cur, null, cfg)
        scores = scan.scores(thr.value)
        eps = uhd_vector(cur.schema, cur.n)
        # candidates in decreasing score; stable sort keeps the lowest index first on ties
        order = np.argsort(-scores, kind="stable")
        # strict: ties with the critical value do not reject (exact Monte-Carlo level)
        viable = [int(k) for k in order if scores[k] > thr.value]
        if not viable:
            viable = [int(order[0])]
        picked = None
        for k in viable:
            test, score = scan.result(k), float(scores[k])
            S, T = cur.codes[k], cur.values[k]
            U = np.bincount(hamming_to(cur.codes, S), minlength=p + 1)
            ed = euclidean_to(cur.values, T)
            if q:
                bins = make_bins(cur, T, cfg.bins)
                V = np.bincount(bins.index(ed), minlength=bins.l)
                nu = ued_vector(null, T, bins, cur.n)
            else:
                bins = Bins(np.zeros(cfg.bins + 1))
                V = np.zeros(cfg.bins, dtype=np.int64)
                nu = np.zeros(cfg.bins)
            significant = score > thr.value
            record = dict(
                iteration=it, n_remaining=cur.n, center_row=int(remaining[k]), score=score,
                threshold=thr.value, significant=significant, stat=test, U=U, eps=eps, V=V, nu=nu,
                edges=bins.edges, sorted_ed=np.sort(ed),
            )
            if picked is None:
                first = record
            if not significant:
                break
            R_c = radius_categorical(U, test.r_c) if p else 0
            R_d = radius_continuous(ed, bins, test.r_d, cfg.jump_factor) if q else 0.0
            local = extract(cur, S, T, R_c, R_d, cfg.membership)
            if k not in local:  # the center sits at distance 0 from itself
                raise AssertionError("center row not captured by its own radii")
            if local.size >= cfg.min_cluster_size:
                picked = (k, S, T, R_c, R_d, local, test, record)
                break
        log.info("iteration %d: n=%d max chi_w=%.4g threshold=%.4g", it, cur.n, float(scores[order[0]]), thr.value)
        if picked is None:
            # nothing significant, or every significant center captures too few rows
            result.iterations.append(IterationRecord(**first))
            break
        k, S, T, R_c, R_d, local, test, record = picked
        members = remaining[local]
        result.clusters.append(Cluster(int(remaining[k]), S.copy(), T.copy(), R_c, R_d, members, test))
        result.iterations.append(IterationRecord(**record, R_c=R_c, R_d=R_d, n_members=len(members)))
        remaining = np.delete(remaining, local)
        it += 1
    result.unassigned = remaining
    return result
