"""numba-jitted hot kernels.

Mirror of `_kernels_numpy`: same function names, same argument
conventions, same arithmetic.  The reduction kernels use fixed 4096-term
chunks with Kahan compensation inside each chunk; chunk partials are
combined elsewhere in index order, which is what makes results independent
of the worker-thread count.

All integer phase work is u64 with wrap-around; no fastmath anywhere.
"""

import math

import numpy as np
from numba import njit, prange

from ergolab._common import CHUNK, INV_TWO64, SM64_GAMMA, SM64_M1, SM64_M2

_PHASE = 2.0 * math.pi * INV_TWO64  # radians per fixed-point unit

_U = np.uint64
_G = _U(SM64_GAMMA)
_M1 = _U(SM64_M1)
_M2 = _U(SM64_M2)


# ---------------------------------------------------------------- reductions


@njit(cache=True)
def _kahan_range_c128(z, lo, hi):
    s = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    for i in range(lo, hi):
        y = z[i] - comp
        t = s + y
        comp = (t - s) - y
        s = t
    return s


@njit(cache=True)
def _kahan_range_f64(v, lo, hi):
    s = 0.0
    comp = 0.0
    for i in range(lo, hi):
        y = v[i] - comp
        t = s + y
        comp = (t - s) - y
        s = t
    return s


@njit(cache=True, parallel=True)
def chunk_partials_c128(z):
    n = z.shape[0]
    n_chunks = (n + CHUNK - 1) // CHUNK
    out = np.zeros(n_chunks, dtype=np.complex128)
    for c in prange(n_chunks):
        lo = c * CHUNK
        hi = min(lo + CHUNK, n)
        out[c] = _kahan_range_c128(z, lo, hi)
    return out


@njit(cache=True, parallel=True)
def chunk_partials_f64(v):
    n = v.shape[0]
    n_chunks = (n + CHUNK - 1) // CHUNK
    out = np.zeros(n_chunks, dtype=np.float64)
    for c in prange(n_chunks):
        lo = c * CHUNK
        hi = min(lo + CHUNK, n)
        out[c] = _kahan_range_f64(v, lo, hi)
    return out


def range_kahan_c128(z, lo, hi):
    return complex(_kahan_range_c128(z, lo, hi))


def range_kahan_f64(v, lo, hi):
    return float(_kahan_range_f64(v, lo, hi))


@njit(cache=True)
def _corr_kahan_range(x, y, h, lo, hi):
    # term i = x[i + h] * conj(y[i])
    s = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    for i in range(lo, hi):
        v = x[i + h] * np.conj(y[i])
        yy = v - comp
        t = s + yy
        comp = (t - s) - yy
        s = t
    return s


@njit(cache=True, parallel=True)
def corr_chunk_partials(x, y, h, n):
    n_chunks = (n + CHUNK - 1) // CHUNK
    out = np.zeros(n_chunks, dtype=np.complex128)
    for c in prange(n_chunks):
        lo = c * CHUNK
        hi = min(lo + CHUNK, n)
        out[c] = _corr_kahan_range(x, y, h, lo, hi)
    return out


def corr_range_kahan(x, y, h, lo, hi):
    return complex(_corr_kahan_range(x, y, h, lo, hi))


# ------------------------------------------------------------ phase streams


@njit(cache=True, parallel=True)
def rotation_fracs(x0, alpha, n0, count):
    """frac(n) = x0 + n*alpha (u64 wrap) for n = n0 .. n0+count-1."""
    out = np.empty(count, dtype=np.uint64)
    for i in prange(count):
        n = _U(n0 + i)
        out[i] = x0 + n * alpha
    return out


@njit(cache=True, parallel=True)
def fracs_at_indices(x0, alpha, idx):
    out = np.empty(idx.shape[0], dtype=np.uint64)
    for i in prange(idx.shape[0]):
        out[i] = x0 + _U(idx[i]) * alpha
    return out


@njit(cache=True, parallel=True)
def trig_eval_fracs(fracs, freqs, coeffs, offset):
    """sum_j coeffs[j] * e^{2 pi i (freqs[j]*fracs mod 2^64)/2^64} + offset."""
    n = fracs.shape[0]
    k = freqs.shape[0]
    out = np.empty(n, dtype=np.complex128)
    for i in prange(n):
        acc = offset
        for j in range(k):
            ph = freqs[j] * fracs[i]
            theta = float(ph) * _PHASE
            acc += coeffs[j] * complex(math.cos(theta), math.sin(theta))
        out[i] = acc
    return out


@njit(cache=True, parallel=True)
def indicator_eval_fracs(fracs, lo, hi, weights, offset):
    """Weighted arc-membership sum; hi == 0 encodes an arc reaching 2^64."""
    n = fracs.shape[0]
    k = lo.shape[0]
    out = np.empty(n, dtype=np.complex128)
    for i in prange(n):
        u = fracs[i]
        acc = offset
        for j in range(k):
            if u >= lo[j] and (hi[j] == _U(0) or u < hi[j]):
                acc += weights[j]
        out[i] = acc
    return out


# ------------------------------------------------------------- symbol stream


@njit(cache=True)
def _mix64(z):
    z = (z ^ (z >> _U(30))) * _M1
    z = (z ^ (z >> _U(27))) * _M2
    return z ^ (z >> _U(31))


@njit(cache=True)
def _symbol_at(seed, n, thresholds):
    raw = _mix64(seed + _U(n + 1) * _G)
    s = 0
    for t in range(thresholds.shape[0]):
        if raw >= thresholds[t]:
            s += 1
        else:
            break
    return s


@njit(cache=True, parallel=True)
def symbols_range(seed, n0, count, thresholds):
    out = np.empty(count, dtype=np.int64)
    for i in prange(count):
        out[i] = _symbol_at(seed, n0 + i, thresholds)
    return out


@njit(cache=True)
def cylinder_values(seed, thresholds, n0, count, window, alphabet, table, offset):
    """table[word code] + offset along the shift orbit; rolling word code."""
    out = np.empty(count, dtype=np.complex128)
    if count == 0:
        return out
    top = alphabet ** (window - 1)
    code = 0
    for j in range(window):
        code = code * alphabet + _symbol_at(seed, n0 + j, thresholds)
    out[0] = table[code] + offset
    for i in range(1, count):
        first = _symbol_at(seed, n0 + i - 1, thresholds)
        nxt = _symbol_at(seed, n0 + i + window - 1, thresholds)
        code = (code - first * top) * alphabet + nxt
        out[i] = table[code] + offset
    return out


@njit(cache=True, parallel=True)
def cylinder_values_at(seed, thresholds, idx, window, alphabet, table, offset):
    out = np.empty(idx.shape[0], dtype=np.complex128)
    for i in prange(idx.shape[0]):
        code = 0
        for j in range(window):
            code = code * alphabet + _symbol_at(seed, idx[i] + j, thresholds)
        out[i] = table[code] + offset
    return out


# ------------------------------------------------------------- block indices


@njit(cache=True, parallel=True)
def block_indices(n0, count):
    """m with m(m-1)/2 < n <= m(m+1)/2, for n = n0 .. n0+count-1 (n >= 1)."""
    out = np.empty(count, dtype=np.int64)
    for i in prange(count):
        n = n0 + i
        m = int((math.sqrt(8.0 * n + 1.0) - 1.0) / 2.0)
        while m * (m + 1) // 2 < n:
            m += 1
        while m > 1 and (m - 1) * m // 2 >= n:
            m -= 1
        out[i] = m
    return out


# ---------------------------------------------------------------- arc overlap


@njit(cache=True, parallel=True)
def arc_overlap_measures(a_lo, a_len, b_lo, b_len, shifts):
    """Overlap measure of arc set A with arc set B shifted by -shift.

    Arc lengths are u64 in [1, 2^64-1]; full-circle sets are handled by the
    caller.  Returns measures in [0, 1] as float64.
    """
    n = shifts.shape[0]
    out = np.empty(n, dtype=np.float64)
    for i in prange(n):
        t = shifts[i]
        total = _U(0)
        for ia in range(a_lo.shape[0]):
            a = a_lo[ia]
            la = a_len[ia]
            for ib in range(b_lo.shape[0]):
                b = b_lo[ib] - t
                lb = b_len[ib]
                g = b - a
                wrap_thresh = _U(0) - lb  # 2^64 - lb
                if g > wrap_thresh:
                    # shifted B arc wraps past A-relative origin
                    if g < la:
                        total += la - g
                    lw = g - wrap_thresh  # g + lb - 2^64
                    if lw < la:
                        total += lw
                    else:
                        total += la
                else:
                    if g < la:
                        rest = la - g
                        if lb < rest:
                            total += lb
                        else:
                            total += rest
        out[i] = float(total) * INV_TWO64
    return out


# ------------------------------------------------------------------- helpers


@njit(cache=True, parallel=True)
def abs_values(z):
    out = np.empty(z.shape[0], dtype=np.float64)
    for i in prange(z.shape[0]):
        out[i] = math.hypot(z[i].real, z[i].imag)
    return out


@njit(cache=True, parallel=True)
def abs2_diff(a, b):
    out = np.empty(a.shape[0], dtype=np.float64)
    for i in prange(a.shape[0]):
        d = a[i] - b[i]
        out[i] = d.real * d.real + d.imag * d.imag
    return out


@njit(cache=True, parallel=True)
def sgn_values(z):
    out = np.empty(z.shape[0], dtype=np.complex128)
    for i in prange(z.shape[0]):
        r = math.hypot(z[i].real, z[i].imag)
        if r > 0.0:
            out[i] = z[i] / r
        else:
            out[i] = 0.0 + 0.0j
    return out
