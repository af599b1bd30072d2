"""Hot loops: the per-center statistic scan.

Two interchangeable backends compute the same quantities:

* ``numba``: explicit loops compiled with ``@njit(nogil=True)``;
* ``numpy``: vectorised per-center evaluation, always available.

Set ``MIXEDCLUST_DISABLE_NUMBA=1`` to force the numpy path. The scalar
helpers (cut-offs and window statistics) are written once as plain Python
and compiled for the numba path, so both backends share their definitions.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

_DISABLE = os.environ.get("MIXEDCLUST_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}
USE_NUMBA = HAVE_NUMBA and not _DISABLE
BACKEND = "numba" if USE_NUMBA else "numpy"


def cutoff_cat(U, eps, floor):
    # cells expecting fewer than `floor` rows cannot show a deficit
    p = U.shape[0] - 1
    for j in range(1, p + 1):
        if eps[j] >= floor and U[j] / eps[j] < 1.0:
            return j - 1
    return p - 1


def cutoff_cont(V, nu, minus_one):
    # 1-based scan j = 2..l-1 keeps the tail (bins r_d+1..l) non-empty
    l = V.shape[0]
    for j in range(2, l):
        v, e = V[j - 1], nu[j - 1]
        if e > 0.0 and v / e < 1.0:
            return j - 1 if minus_one else j
    return l - 1


def chisq_cat(U, eps, r_c):
    p = U.shape[0] - 1
    head = 0.0
    su = 0.0
    se = 0.0
    for j in range(r_c + 1):
        d = U[j] - eps[j]
        head += d * d / eps[j]
        su += U[j]
        se += eps[j]
    tail = 0.0
    for j in range(r_c + 1, p + 1):
        tail += eps[j]
    d = su - se
    return head + d * d / tail


def chisq_cont(V, nu, r_d, delta):
    """Return ``(statistic, window_term)``; statistic is ``inf`` on an empty null tail."""
    l = V.shape[0]
    window = 0.0
    sv = 0.0
    sn = 0.0
    for j in range(r_d):
        v, e = V[j], nu[j]
        if e > 0.0:
            window += (v - e) * (v - e) / e
        else:
            window += v * v / delta
        sv += v
        sn += e
    tail = 0.0
    for j in range(r_d, l):
        tail += nu[j]
    d = sv - sn
    if tail > 0.0:
        return window + d * d / tail, window
    if d == 0.0:
        return window, window
    return math.inf, window


def bin_edges(d_max, l):
    """Equal-width edges over ``[0, d_max]``; the last edge equals ``d_max`` exactly."""
    return d_max * (np.arange(l + 1) / l)


def _scan_center_numpy(i, codes, values, null_values, eps, l, delta, minus_one):
    n, p = codes.shape
    q = values.shape[1]
    chi_c = 0.0
    r_c = 0
    if p:
        hd = (codes != codes[i]).sum(axis=1)
        U = np.bincount(hd, minlength=p + 1).astype(np.float64)
        r_c = cutoff_cat(U, eps, delta)
        chi_c = chisq_cat(U, eps, r_c)
    chi_d = win = 0.0
    r_d = 0
    if q:
        t = values[i]
        ed = np.sqrt(((values - t) ** 2).sum(axis=1))
        edges = bin_edges(ed.max(), l)
        V = np.bincount(np.searchsorted(edges[1:], ed, side="left"), minlength=l).astype(np.float64)
        ned = np.sqrt(((null_values - t) ** 2).sum(axis=1))
        nidx = np.minimum(np.searchsorted(edges[1:], ned, side="left"), l - 1)
        nu = np.bincount(nidx, minlength=l) * (n / null_values.shape[0])
        r_d = cutoff_cont(V, nu, minus_one)
        chi_d, win = chisq_cont(V, nu, r_d, delta)
    return chi_c, chi_d, win, r_c, r_d


def scan_numpy(codes, values, centers, null_values, eps, l, delta, minus_one):
    m = centers.shape[0]
    chi_c = np.zeros(m)
    chi_d = np.zeros(m)
    win = np.zeros(m)
    r_c = np.zeros(m, dtype=np.int64)
    r_d = np.zeros(m, dtype=np.int64)
    for k in range(m):
        chi_c[k], chi_d[k], win[k], r_c[k], r_d[k] = _scan_center_numpy(
            centers[k], codes, values, null_values, eps, l, delta, minus_one
        )
    return chi_c, chi_d, win, r_c, r_d


if HAVE_NUMBA:
    _jit = numba.njit(cache=True, nogil=True)
    _cutoff_cat_nb = _jit(cutoff_cat)
    _cutoff_cont_nb = _jit(cutoff_cont)
    _chisq_cat_nb = _jit(chisq_cat)
    _chisq_cont_nb = _jit(chisq_cont)
    _bin_edges_nb = _jit(bin_edges)

    @_jit
    def _bin_index(edges, d, inv_w):
        # first j with edges[j + 1] >= d, i.e. right-closed bins with [0, b_1] first;
        # arithmetic guess, then nudged so the result matches the edge comparisons exactly
        l = edges.shape[0] - 1
        g = d * inv_w
        j = int(g) if g < l else l
        if j > 0:
            j -= 1
        while j > 0 and edges[j] >= d:
            j -= 1
        while j < l and edges[j + 1] < d:
            j += 1
        return j

    @_jit
    def scan_numba(codes, values, centers, null_values, eps, l, delta, minus_one):
        n, p = codes.shape
        q = values.shape[1]
        n_null = null_values.shape[0]
        m = centers.shape[0]
        chi_c = np.zeros(m)
        chi_d = np.zeros(m)
        win = np.zeros(m)
        r_c = np.zeros(m, dtype=np.int64)
        r_d = np.zeros(m, dtype=np.int64)
        U = np.zeros(p + 1)
        V = np.zeros(max(l, 1))
        cnt = np.zeros(max(l, 1))
        ed = np.zeros(n)
        scale = n / n_null if n_null > 0 else 0.0
        for k in range(m):
            i = centers[k]
            if p > 0:
                U[:] = 0.0
                for r in range(n):
                    h = 0
                    for a in range(p):
                        if codes[r, a] != codes[i, a]:
                            h += 1
                    U[h] += 1.0
                rc = _cutoff_cat_nb(U, eps, delta)
                r_c[k] = rc
                chi_c[k] = _chisq_cat_nb(U, eps, rc)
            if q > 0:
                d_max = 0.0
                for r in range(n):
                    s = 0.0
                    for a in range(q):
                        diff = values[r, a] - values[i, a]
                        s += diff * diff
                    ed[r] = math.sqrt(s)
                    if ed[r] > d_max:
                        d_max = ed[r]
                edges = _bin_edges_nb(d_max, l)
                inv_w = l / d_max if d_max > 0.0 else 0.0
                V[:] = 0.0
                for r in range(n):
                    V[_bin_index(edges, ed[r], inv_w)] += 1.0
                cnt[:] = 0.0
                for r in range(n_null):
                    s = 0.0
                    for a in range(q):
                        diff = null_values[r, a] - values[i, a]
                        s += diff * diff
                    j = _bin_index(edges, math.sqrt(s), inv_w)
                    if j > l - 1:
                        j = l - 1
                    cnt[j] += 1.0
                nu = cnt * scale
                rd = _cutoff_cont_nb(V, nu, minus_one)
                r_d[k] = rd
                chi_d[k], win[k] = _chisq_cont_nb(V, nu, rd, delta)
        return chi_c, chi_d, win, r_c, r_d
else:  # pragma: no cover
    scan_numba = None


def scan(codes, values, centers, null_values, eps, l, delta=0.5, minus_one=False, backend=None):
    """Evaluate the categorical and continuous statistics at each row in ``centers``.

    Returns ``(chi_c, chi_d, chi_d_window, r_c, r_d)`` arrays aligned with ``centers``.
    """
    backend = backend or BACKEND
    args = (
        np.ascontiguousarray(codes, dtype=np.int64),
        np.ascontiguousarray(values, dtype=np.float64),
        np.ascontiguousarray(centers, dtype=np.int64),
        np.ascontiguousarray(null_values, dtype=np.float64),
        np.ascontiguousarray(eps, dtype=np.float64),
        int(l),
        float(delta),
        bool(minus_one),
    )
    if backend == "numba":
        if scan_numba is None:
            raise RuntimeError("numba backend requested but numba is not importable")
        return scan_numba(*args)
    if backend == "numpy":
        return scan_numpy(*args)
    raise ValueError(f"unknown backend {backend!r}")
