"""Hamming/Euclidean distances and their frequency vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import bin_edges
from .dataset import MixedDataset


def hamming(x1, x2) -> int:
    x1 = np.asarray(x1)
    x2 = np.asarray(x2)
    if x1.shape != x2.shape:
        raise ValueError(f"length mismatch: {x1.shape} vs {x2.shape}")
    return int(np.count_nonzero(x1 != x2))


def euclidean(z1, z2) -> float:
    z1 = np.asarray(z1, dtype=np.float64)
    z2 = np.asarray(z2, dtype=np.float64)
    if z1.shape != z2.shape:
        raise ValueError(f"length mismatch: {z1.shape} vs {z2.shape}")
    return float(np.sqrt(((z1 - z2) ** 2).sum()))


def hamming_to(codes, s) -> np.ndarray:
    """Hamming distance from every row of ``codes`` to position ``s``."""
    codes = np.asarray(codes)
    s = np.asarray(s)
    if codes.shape[1:] != s.shape:
        raise ValueError(f"position has shape {s.shape}, rows have {codes.shape[1:]}")
    return (codes != s).sum(axis=1)


def euclidean_to(values, t) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if values.shape[1:] != t.shape:
        raise ValueError(f"position has shape {t.shape}, rows have {values.shape[1:]}")
    return np.sqrt(((values - t) ** 2).sum(axis=1))


@dataclass(frozen=True)
class Bins:
    """Equal-width bins ``[0, b_1], (b_1, b_2], ..., (b_{l-1}, b_l]``."""

    edges: np.ndarray

    @property
    def l(self) -> int:
        return len(self.edges) - 1

    @property
    def upper(self) -> float:
        return float(self.edges[-1])

    def index(self, d, clamp=False) -> np.ndarray:
        """0-based bin index of each distance; ``l`` marks distances past the last edge."""
        idx = np.searchsorted(self.edges[1:], np.asarray(d, dtype=np.float64), side="left")
        if clamp:
            idx = np.minimum(idx, self.l - 1)
        return idx


def make_bins(ds: MixedDataset, T, l: int = 10) -> Bins:
    if l < 1:
        raise ValueError(f"bin count must be >= 1, got {l}")
    d = euclidean_to(ds.values, T)
    d_max = float(d.max()) if d.size else 0.0
    return Bins(bin_edges(d_max, l))


def hd_vector(ds: MixedDataset, S) -> np.ndarray:
    """Counts ``U_j`` of rows at Hamming distance ``j`` from ``S``, ``j = 0..p``."""
    return np.bincount(hamming_to(ds.codes, S), minlength=ds.schema.p + 1)


def ed_vector(ds: MixedDataset, T, bins: Bins) -> np.ndarray:
    """Counts ``V_j`` of rows whose Euclidean distance to ``T`` falls in bin ``j``."""
    idx = bins.index(euclidean_to(ds.values, T))
    if idx.size and idx.max() >= bins.l:
        raise ValueError("distance exceeds the last bin edge; bins were built for other data")
    return np.bincount(idx, minlength=bins.l)


@dataclass(frozen=True)
class DistanceProfile:
    ref_cat: np.ndarray
    ref_cont: np.ndarray
    U: np.ndarray
    V: np.ndarray
    bins: Bins


def distance_profile(ds: MixedDataset, S, T, l: int = 10) -> DistanceProfile:
    S = np.asarray(S)
    T = np.asarray(T, dtype=np.float64)
    bins = make_bins(ds, T, l)
    return DistanceProfile(S, T, hd_vector(ds, S), ed_vector(ds, T, bins), bins)
