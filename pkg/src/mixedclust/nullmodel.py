"""Reference vectors for data with no cluster structure.

The categorical reference is exact: under uniform occupancy of the lattice the
expected Hamming-distance counts are ``(n / M) * e_k(m_1 - 1, ..., m_p - 1)``.
The continuous reference has no closed form and is estimated from a simulated
null sample binned on the same edges as the observed distances.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass

import numpy as np

from .dataset import MixedDataset, Schema
from .distance import Bins, euclidean_to

log = logging.getLogger(__name__)

NULL_MODES = ("uniform-box", "permute")
DEFAULT_MIN_NULL = 5000


def elementary_symmetric(values) -> list[int]:
    """``[e_0, e_1, ..., e_k]`` of ``values`` by expanding ``prod (1 + v x)``.

    Exact for integer input (Python ints, no overflow).
    """
    coeffs = [1]
    for v in values:
        coeffs.append(0)
        for k in range(len(coeffs) - 1, 0, -1):
            coeffs[k] += v * coeffs[k - 1]
    return coeffs


def uhd_vector(schema: Schema, n: int) -> np.ndarray:
    ustar = elementary_symmetric([m - 1 for m in schema.levels])
    return np.array([n * u / schema.M for u in ustar], dtype=np.float64)


@dataclass(frozen=True)
class NullSample:
    codes: np.ndarray
    values: np.ndarray
    mode: str

    @property
    def size(self) -> int:
        return self.values.shape[0]


def default_null_size(n: int) -> int:
    return max(n, DEFAULT_MIN_NULL)


def data_box(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    values = np.asarray(values, dtype=np.float64)
    return values.min(axis=0), values.max(axis=0)


def _column_stream(base: int, col: np.ndarray) -> tuple[np.random.Generator, bool]:
    """Random stream and orientation that travel with a column's content.

    The stream is keyed by the rank order of the (oriented) column, and the
    orientation by the sign of its skew about the range midpoint. Translating,
    reflecting or reordering the continuous attributes therefore moves the
    null sample along with the data instead of redrawing it.
    """
    mid = 0.5 * (col.min() + col.max())
    flip = bool(((col - mid) ** 3).sum() < 0)
    order = np.argsort(-col if flip else col, kind="stable").astype(np.int64)
    key = int.from_bytes(hashlib.blake2b(order.tobytes(), digest_size=8).digest(), "little")
    return np.random.default_rng(np.random.SeedSequence([base, key])), flip


def sample_null(ds: MixedDataset, n_null: int, seed, mode: str = "uniform-box") -> NullSample:
    """Draw a structureless companion sample for ``ds``.

    Categorical attributes are uniform over their declared levels. Continuous
    attributes are independent uniforms on the observed range (``uniform-box``)
    or independently permuted copies of each observed column (``permute``).
    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``.
    """
    if n_null < 1:
        raise ValueError(f"null sample size must be >= 1, got {n_null}")
    if mode not in NULL_MODES:
        raise ValueError(f"unknown null mode {mode!r}; expected one of {NULL_MODES}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    schema = ds.schema
    codes = np.empty((n_null, schema.p), dtype=np.int64)
    for j, m in enumerate(schema.levels):
        codes[:, j] = rng.integers(0, m, size=n_null)
    q = schema.q
    base = int(rng.integers(2**63))
    values = np.empty((n_null, q))
    if q and mode == "uniform-box":
        lo, hi = data_box(ds.values)
        if (hi == lo).any():
            log.warning("constant continuous attribute(s): null coordinate held fixed")
    for k in range(q):
        col = ds.values[:, k]
        crng, flip = _column_stream(base, col)
        if mode == "uniform-box":
            w = crng.random(n_null)
            values[:, k] = lo[k] + (hi[k] - lo[k]) * (1.0 - w if flip else w)
        else:
            # whole permuted copies of the column, topped up from one more permutation
            reps = -(-n_null // ds.n)
            values[:, k] = np.concatenate([crng.permutation(col) for _ in range(reps)])[:n_null]
    return NullSample(codes, values, mode)


def ued_vector(null: NullSample, T, bins: Bins, n: int) -> np.ndarray:
    """Null ED frequencies rescaled to total ``n``; distances past the last edge land in bin ``l``."""
    idx = bins.index(euclidean_to(null.values, T), clamp=True)
    return np.bincount(idx, minlength=bins.l) * (n / null.size)


@dataclass(frozen=True)
class NullProfile:
    eps: np.ndarray
    nu: np.ndarray
    M: int
    n_null: int
    seed: object


def null_profile(ds: MixedDataset, T, bins: Bins, null: NullSample, seed=None) -> NullProfile:
    return NullProfile(
        uhd_vector(ds.schema, ds.n), ued_vector(null, T, bins, ds.n), ds.schema.M, null.size, seed
    )
