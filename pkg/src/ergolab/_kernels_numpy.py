"""Pure-numpy fallback kernels (ERGOLAB_BACKEND=numpy).

Same surface as `_kernels_numba`.  The chunked Kahan reductions vectorize
ACROSS chunks (one lane per chunk, looping the 4096 in-chunk positions),
which reproduces the jitted per-chunk recurrence bit for bit.  Phase and
symbol streams are plain u64 array arithmetic with wrap-around.
"""

import math

import numpy as np

from ergolab._common import CHUNK, INV_TWO64, SM64_GAMMA, SM64_M1, SM64_M2

_PHASE = 2.0 * math.pi * INV_TWO64

_U = np.uint64
_G = _U(SM64_GAMMA)
_M1 = _U(SM64_M1)
_M2 = _U(SM64_M2)


# ---------------------------------------------------------------- reductions


def _kahan_scalar(vals, zero):
    s = zero
    comp = zero
    for v in vals:
        y = v - comp
        t = s + y
        comp = (t - s) - y
        s = t
    return s


def _chunk_partials(z, dtype):
    n = z.shape[0]
    n_full = n // CHUNK
    n_chunks = (n + CHUNK - 1) // CHUNK
    out = np.zeros(n_chunks, dtype=dtype)
    if n_full:
        block = z[: n_full * CHUNK].reshape(n_full, CHUNK)
        s = np.zeros(n_full, dtype=dtype)
        comp = np.zeros(n_full, dtype=dtype)
        for j in range(CHUNK):
            v = block[:, j]
            y = v - comp
            t = s + y
            comp = (t - s) - y
            s = t
        out[:n_full] = s
    if n_full != n_chunks:
        zero = np.complex128(0) if dtype == np.complex128 else np.float64(0)
        out[n_full] = _kahan_scalar(z[n_full * CHUNK :], zero)
    return out


def chunk_partials_c128(z):
    return _chunk_partials(np.ascontiguousarray(z, dtype=np.complex128), np.complex128)


def chunk_partials_f64(v):
    return _chunk_partials(np.ascontiguousarray(v, dtype=np.float64), np.float64)


def range_kahan_c128(z, lo, hi):
    return complex(_kahan_scalar(z[lo:hi], np.complex128(0)))


def range_kahan_f64(v, lo, hi):
    return float(_kahan_scalar(v[lo:hi], np.float64(0)))


def corr_chunk_partials(x, y, h, n):
    z = x[h : h + n] * np.conj(y[:n])
    return _chunk_partials(z, np.complex128)


def corr_range_kahan(x, y, h, lo, hi):
    z = x[h + lo : h + hi] * np.conj(y[lo:hi])
    return complex(_kahan_scalar(z, np.complex128(0)))


# ------------------------------------------------------------ phase streams


def rotation_fracs(x0, alpha, n0, count):
    with np.errstate(over="ignore"):
        n = _U(n0) + np.arange(count, dtype=np.uint64)
        return _U(x0) + n * _U(alpha)


def fracs_at_indices(x0, alpha, idx):
    with np.errstate(over="ignore"):
        return _U(x0) + idx.astype(np.uint64) * _U(alpha)


def trig_eval_fracs(fracs, freqs, coeffs, offset):
    out = np.full(fracs.shape[0], offset, dtype=np.complex128)
    with np.errstate(over="ignore"):
        for j in range(freqs.shape[0]):
            ph = (_U(freqs[j]) * fracs).astype(np.float64)
            theta = ph * _PHASE
            out += coeffs[j] * (np.cos(theta) + 1j * np.sin(theta))
    return out


def indicator_eval_fracs(fracs, lo, hi, weights, offset):
    out = np.full(fracs.shape[0], offset, dtype=np.complex128)
    for j in range(lo.shape[0]):
        if hi[j] == _U(0):
            inside = fracs >= lo[j]
        else:
            inside = (fracs >= lo[j]) & (fracs < hi[j])
        out += weights[j] * inside
    return out


# ------------------------------------------------------------- symbol stream


def _mix64(z):
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _U(30))) * _M1
        z = (z ^ (z >> _U(27))) * _M2
        return z ^ (z >> _U(31))


def _raw_at(seed, n_u64):
    with np.errstate(over="ignore"):
        return _mix64(_U(seed) + (n_u64 + _U(1)) * _G)


def _symbols_from_raw(raw, thresholds):
    sym = np.zeros(raw.shape[0], dtype=np.int64)
    for t in thresholds:
        sym += raw >= t
    return sym


def symbols_range(seed, n0, count, thresholds):
    n = _U(n0) + np.arange(count, dtype=np.uint64)
    return _symbols_from_raw(_raw_at(seed, n), thresholds)


def cylinder_values(seed, thresholds, n0, count, window, alphabet, table, offset):
    sym = symbols_range(seed, n0, count + window - 1, thresholds)
    code = np.zeros(count, dtype=np.int64)
    for j in range(window):
        code = code * alphabet + sym[j : j + count]
    return table[code] + offset


def cylinder_values_at(seed, thresholds, idx, window, alphabet, table, offset):
    code = np.zeros(idx.shape[0], dtype=np.int64)
    for j in range(window):
        n = idx.astype(np.uint64) + _U(j)
        code = code * alphabet + _symbols_from_raw(_raw_at(seed, n), thresholds)
    return table[code] + offset


# ------------------------------------------------------------- block indices


def block_indices(n0, count):
    n = n0 + np.arange(count, dtype=np.int64)
    m = ((np.sqrt(8.0 * n + 1.0) - 1.0) / 2.0).astype(np.int64)
    # float estimate is within 1 of the true inverse; two fixups settle it
    for _ in range(2):
        m += m * (m + 1) // 2 < n
        m -= (m > 1) & ((m - 1) * m // 2 >= n)
    return m


# ---------------------------------------------------------------- arc overlap


def arc_overlap_measures(a_lo, a_len, b_lo, b_len, shifts):
    n = shifts.shape[0]
    total = np.zeros(n, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for ia in range(a_lo.shape[0]):
            a = a_lo[ia]
            la = a_len[ia]
            for ib in range(b_lo.shape[0]):
                b = b_lo[ib] - shifts
                lb = b_len[ib]
                g = b - a
                wrap_thresh = _U(0) - lb
                wraps = g > wrap_thresh
                head = g < la
                # non-wrapping piece [g, g+lb) against [0, la)
                rest = np.where(head, la - g, _U(0))
                plain = np.minimum(rest, lb)
                # wrapping case: [g, 2^64) contributes la-g, [0, lw) contributes
                # min(lw, la) with lw = g + lb - 2^64
                lw = g - wrap_thresh
                wrapped = np.where(head, la - g, _U(0)) + np.minimum(lw, la)
                total += np.where(wraps, wrapped, plain)
    return total.astype(np.float64) * INV_TWO64


# ------------------------------------------------------------------- helpers


def abs_values(z):
    return np.hypot(z.real, z.imag)


def abs2_diff(a, b):
    d = a - b
    return d.real * d.real + d.imag * d.imag


def sgn_values(z):
    r = np.hypot(z.real, z.imag)
    out = np.zeros(z.shape[0], dtype=np.complex128)
    nz = r > 0.0
    out[nz] = z[nz] / r[nz]
    return out
