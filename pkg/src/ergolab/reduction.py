"""Deterministic chunked summation.

Sums of N terms are evaluated as: Kahan partial per fixed 4096-term chunk
(backend kernel, parallel over chunks), then a Kahan combine of the
partials in index order (here, in plain Python).  A prefix at horizon N
combines the full chunks below N plus one ragged-tail partial, which is
byte-identical to evaluating the sum of the first N terms standalone.
Results therefore do not depend on worker count, block sizes, or whether a
horizon was evaluated alone or as part of a schedule.
"""

from __future__ import annotations

import numpy as np

from ergolab import backend
from ergolab._common import CHUNK


def _combine(parts):
    s = 0j
    comp = 0j
    for p in parts:
        y = complex(p) - comp
        t = s + y
        comp = (t - s) - y
        s = t
    return s


def _combine_f64(parts):
    s = 0.0
    comp = 0.0
    for p in parts:
        y = float(p) - comp
        t = s + y
        comp = (t - s) - y
        s = t
    return s


def kahan_sum(values) -> complex:
    """Chunked compensated sum of a 1-d complex array."""
    values = np.ascontiguousarray(values, dtype=np.complex128)
    k = backend.get_kernels()
    return _combine(k.chunk_partials_c128(values))


def kahan_sum_f64(values) -> float:
    values = np.ascontiguousarray(values, dtype=np.float64)
    k = backend.get_kernels()
    return _combine_f64(k.chunk_partials_f64(values))


def prefix_sums_f64(values, horizons) -> list:
    values = np.ascontiguousarray(values, dtype=np.float64)
    k = backend.get_kernels()
    parts = k.chunk_partials_f64(values)
    out = []
    for n in horizons:
        full = n // CHUNK
        tail = []
        if full * CHUNK < n:
            tail = [k.range_kahan_f64(values, full * CHUNK, n)]
        out.append(_combine_f64(list(parts[:full]) + tail))
    return out


def corr_prefix_sums(x, y, h, horizons) -> list:
    """Sums S(N) = sum_{i<N} x[i+h] * conj(y[i]) for each horizon N."""
    x = np.ascontiguousarray(x, dtype=np.complex128)
    y = np.ascontiguousarray(y, dtype=np.complex128)
    n_max = max(horizons)
    if len(x) < n_max + h or len(y) < n_max:
        raise ValueError("sequence windows shorter than largest horizon")
    k = backend.get_kernels()
    parts = k.corr_chunk_partials(x, y, h, n_max)
    out = []
    for n in horizons:
        full = n // CHUNK
        tail = []
        if full * CHUNK < n:
            tail = [k.corr_range_kahan(x, y, h, full * CHUNK, n)]
        out.append(_combine(list(parts[:full]) + tail))
    return out
