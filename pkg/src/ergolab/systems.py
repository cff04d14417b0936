"""Measure-preserving systems with exact orbits and exact measure oracles.

Three families are shipped: circle rotations (fixed-point arithmetic, so
orbits are exact), Bernoulli shifts (counter-based symbol streams reading
finite windows), and products of the two.  The doubling map is not iterated
in floating point at all; it is realized as the fair binary Bernoulli shift
with observables reading a binary window.

Observables are finite trigonometric polynomials, finite weighted interval
indicators, or cylinder tables; each has an exactly computable mean, which
is what makes mean-zero adjustment and the measure oracles exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ergolab import backend, fixedpoint
from ergolab.fixedpoint import U64, MASK, CirclePoint
from ergolab.streams import SymbolStream


class IncompatibleError(ValueError):
    """Observable or set kind does not match the system kind."""


class UnsupportedError(ValueError):
    """Operation not available for this system family."""


# ------------------------------------------------------------------ systems


@dataclass(frozen=True)
class Rotation:
    alpha: CirclePoint
    x0: CirclePoint
    description: str = "circle rotation"

    kind = "rotation"


@dataclass(frozen=True)
class Bernoulli:
    stream: SymbolStream
    description: str = "bernoulli shift"

    kind = "bernoulli"


@dataclass(frozen=True)
class Product:
    left: "MPSystem"
    right: "MPSystem"
    description: str = "product system"

    kind = "product"


MPSystem = Rotation | Bernoulli | Product


def iterate_point(sys, n: int):
    """The n-th image of the system's base point.

    rotation -> CirclePoint, bernoulli -> stream offset, product -> pair.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if isinstance(sys, Rotation):
        return sys.x0.advance(sys.alpha, n)
    if isinstance(sys, Bernoulli):
        return n
    if isinstance(sys, Product):
        return (iterate_point(sys.left, n), iterate_point(sys.right, n))
    raise TypeError(f"not a system: {sys!r}")


# --------------------------------------------------------------- observables


def _norm_arcs(intervals):
    """Normalize weighted-or-bare interval endpoints to u64 arcs.

    Returns a list of (start_u64, length_int) with 1 <= length <= 2^64.
    A pair with hi - lo == 1 (before quantization) is the full circle.
    """
    arcs = []
    for lo, hi in intervals:
        lo_q, hi_q = Fraction(lo), Fraction(hi)
        if hi_q - lo_q == 1:
            arcs.append((0, U64))
            continue
        a = fixedpoint.from_fraction(lo_q).frac
        b = fixedpoint.from_fraction(hi_q).frac
        length = (b - a) % U64
        if length == 0:
            continue  # empty after quantization
        arcs.append((a, length))
    return arcs


def _arc_arrays(arcs):
    lo = np.asarray([a for a, _ in arcs], dtype=np.uint64)
    hi = np.asarray([(a + ln) & MASK for a, ln in arcs], dtype=np.uint64)
    return lo, hi


@dataclass(frozen=True)
class TrigObservable:
    """f(x) = sum_j c_j e^{2 pi i k_j x} on the circle (integer k_j)."""

    coeffs: tuple  # ((k, complex), ...)
    mean_zero: bool = False

    kind = "trigpoly"

    def mean(self) -> complex:
        return sum((c for k, c in self.coeffs if k == 0), 0j)

    def _parts(self):
        freqs = np.asarray([k % U64 for k, _ in self.coeffs], dtype=np.uint64)
        coeffs = np.asarray([c for _, c in self.coeffs], dtype=np.complex128)
        offset = -self.mean() if self.mean_zero else 0j
        return freqs, coeffs, complex(offset)

    def eval_fracs(self, fracs) -> np.ndarray:
        freqs, coeffs, offset = self._parts()
        return backend.get_kernels().trig_eval_fracs(fracs, freqs, coeffs, offset)


@dataclass(frozen=True)
class IndicatorObservable:
    """Weighted combination of interval indicators on the circle."""

    intervals: tuple  # ((lo, hi, complex weight), ...) endpoints in [0, 1]
    mean_zero: bool = False

    kind = "indicator_combo"

    def _arcs(self):
        # membership tests need non-wrapping pieces: split at zero, with
        # a piece ending exactly at 2^64 encoded by the hi == 0 sentinel
        out = []
        for lo, hi, w in self.intervals:
            for a, ln in _norm_arcs([(lo, hi)]):
                if a + ln <= U64:
                    out.append((a, ln, complex(w)))
                else:
                    out.append((a, U64 - a, complex(w)))
                    out.append((0, a + ln - U64, complex(w)))
        return out

    def mean(self) -> complex:
        return sum((w * (ln / U64) for _, ln, w in self._arcs()), 0j)

    def eval_fracs(self, fracs) -> np.ndarray:
        arcs = self._arcs()
        lo = np.asarray([a for a, _, _ in arcs], dtype=np.uint64)
        hi = np.asarray([(a + ln) & MASK for a, ln, _ in arcs], dtype=np.uint64)
        w = np.asarray([w for _, _, w in arcs], dtype=np.complex128)
        offset = -self.mean() if self.mean_zero else 0j
        return backend.get_kernels().indicator_eval_fracs(fracs, lo, hi, w, complex(offset))


@dataclass(frozen=True)
class CylinderObservable:
    """Table over all words of a fixed window length."""

    window: int
    table: np.ndarray = field(compare=False)  # complex128, length alphabet**window
    mean_zero: bool = False

    kind = "cylinder"

    def __post_init__(self):
        object.__setattr__(
            self, "table", np.ascontiguousarray(self.table, dtype=np.complex128)
        )
        if self.window < 1:
            raise ValueError("window must be >= 1")

    def alphabet_for(self, table_len: int | None = None) -> int:
        n = len(self.table) if table_len is None else table_len
        a = round(n ** (1.0 / self.window))
        for cand in (a - 1, a, a + 1):
            if cand >= 1 and cand**self.window == n:
                return cand
        raise ValueError("table length is not alphabet**window")

    def mean_under(self, stream: SymbolStream) -> complex:
        a = self.alphabet_for()
        if a != stream.alphabet_size:
            raise IncompatibleError("table alphabet does not match stream")
        # exact product measure per word; chunked compensated accumulation
        from ergolab import reduction

        probs = np.asarray(stream.probs, dtype=np.float64)
        codes = np.arange(len(self.table), dtype=np.int64)
        p = np.ones(len(self.table), dtype=np.float64)
        for pos in range(self.window - 1, -1, -1):
            p *= probs[(codes // a**pos) % a]
        return reduction.kahan_sum(p * self.table)


def observable_mean(sys, f) -> complex:
    if isinstance(sys, Product):
        sub, _ = _product_factor_for(sys, f)
        return observable_mean(sub, f)
    if isinstance(f, (TrigObservable, IndicatorObservable)):
        if not isinstance(sys, Rotation):
            raise IncompatibleError(f"{f.kind} observable needs a circle system")
        return f.mean()
    if isinstance(f, CylinderObservable):
        if not isinstance(sys, Bernoulli):
            raise IncompatibleError("cylinder observable needs a bernoulli system")
        return f.mean_under(sys.stream)
    raise TypeError(f"not an observable: {f!r}")


def _product_factor_for(sys: Product, f):
    """First factor (depth-first) compatible with the observable kind."""
    want_circle = isinstance(f, (TrigObservable, IndicatorObservable))
    stack = [sys.left, sys.right]
    for sub in stack:
        if isinstance(sub, Product):
            try:
                return _product_factor_for(sub, f)
            except IncompatibleError:
                continue
        if want_circle and isinstance(sub, Rotation):
            return sub, f
        if not want_circle and isinstance(sub, Bernoulli):
            return sub, f
    raise IncompatibleError(f"no factor of the product accepts a {f.kind} observable")


def orbit_values(sys, f, start: int, count: int) -> np.ndarray:
    """f along the orbit: element i is f(T^(start+i) base point)."""
    if start < 0 or count < 0:
        raise ValueError("start and count must be >= 0")
    k = backend.get_kernels()
    if isinstance(sys, Product):
        sub, f = _product_factor_for(sys, f)
        return orbit_values(sub, f, start, count)
    if isinstance(sys, Rotation):
        if not isinstance(f, (TrigObservable, IndicatorObservable)):
            raise IncompatibleError(f"{getattr(f, 'kind', f)} observable on a rotation")
        fracs = k.rotation_fracs(
            np.uint64(sys.x0.frac), np.uint64(sys.alpha.frac), start, count
        )
        return f.eval_fracs(fracs)
    if isinstance(sys, Bernoulli):
        if not isinstance(f, CylinderObservable):
            raise IncompatibleError(f"{getattr(f, 'kind', f)} observable on a shift")
        a = f.alphabet_for()
        if a != sys.stream.alphabet_size:
            raise IncompatibleError("table alphabet does not match stream")
        offset = -f.mean_under(sys.stream) if f.mean_zero else 0j
        return k.cylinder_values(
            np.uint64(sys.stream.seed),
            sys.stream.thresholds,
            start,
            count,
            f.window,
            a,
            f.table,
            complex(offset),
        )
    raise TypeError(f"not a system: {sys!r}")


def orbit_values_at(sys, f, indices) -> np.ndarray:
    """f at arbitrary orbit positions (direct indexing, no iteration)."""
    k = backend.get_kernels()
    idx = np.ascontiguousarray(indices, dtype=np.int64)
    if np.any(idx < 0):
        raise ValueError("orbit positions must be >= 0")
    if isinstance(sys, Product):
        sub, f = _product_factor_for(sys, f)
        return orbit_values_at(sub, f, idx)
    if isinstance(sys, Rotation):
        if not isinstance(f, (TrigObservable, IndicatorObservable)):
            raise IncompatibleError(f"{getattr(f, 'kind', f)} observable on a rotation")
        fracs = k.fracs_at_indices(np.uint64(sys.x0.frac), np.uint64(sys.alpha.frac), idx)
        return f.eval_fracs(fracs)
    if isinstance(sys, Bernoulli):
        if not isinstance(f, CylinderObservable):
            raise IncompatibleError(f"{getattr(f, 'kind', f)} observable on a shift")
        a = f.alphabet_for()
        offset = -f.mean_under(sys.stream) if f.mean_zero else 0j
        return k.cylinder_values_at(
            np.uint64(sys.stream.seed),
            sys.stream.thresholds,
            idx,
            f.window,
            a,
            f.table,
            complex(offset),
        )
    raise TypeError(f"not a system: {sys!r}")


# ----------------------------------------------------------- measurable sets


@dataclass(frozen=True)
class CircleSet:
    """Finite union of circle arcs; exact measure at 2^-64 resolution."""

    arcs: tuple  # ((start_u64, length_int), ...) normalized, disjoint

    kind = "circle_intervals"

    @staticmethod
    def from_intervals(intervals) -> "CircleSet":
        raw = _norm_arcs(intervals)
        if not raw:
            return CircleSet(arcs=())
        if any(ln >= U64 for _, ln in raw):
            return CircleSet(arcs=((0, U64),))
        # unroll at zero, sort, merge overlaps/adjacency into a disjoint union
        pieces = []
        for a, ln in raw:
            end = a + ln
            if end <= U64:
                pieces.append((a, end))
            else:
                pieces.append((a, U64))
                pieces.append((0, end - U64))
        pieces.sort()
        merged = [list(pieces[0])]
        for lo, hi in pieces[1:]:
            if lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        # re-join a wrap-around pair across 0
        if len(merged) > 1 and merged[0][0] == 0 and merged[-1][1] == U64:
            lo0, hi0 = merged.pop(0)
            merged[-1][1] = U64 + hi0
        arcs = tuple((lo % U64, hi - lo) for lo, hi in merged)
        if len(arcs) == 1 and arcs[0][1] >= U64:
            return CircleSet(arcs=((0, U64),))
        return CircleSet(arcs=arcs)

    @staticmethod
    def full() -> "CircleSet":
        return CircleSet(arcs=((0, U64),))

    def is_full(self) -> bool:
        return any(ln >= U64 for _, ln in self.arcs)

    def is_empty(self) -> bool:
        return not self.arcs

    def measure(self) -> float:
        return sum(ln for _, ln in self.arcs) / U64

    def indicator(self, mean_zero=False) -> IndicatorObservable:
        ivs = tuple(
            (Fraction(a, U64), Fraction(a + ln, U64), 1.0 + 0j) for a, ln in self.arcs
        )
        return IndicatorObservable(intervals=ivs, mean_zero=mean_zero)

    def kernel_arrays(self):
        lo = np.asarray([a for a, _ in self.arcs], dtype=np.uint64)
        ln = np.asarray([l & MASK for _, l in self.arcs], dtype=np.uint64)
        return lo, ln


@dataclass(frozen=True)
class CylinderSet:
    """Set of words over a fixed window of shift coordinates."""

    window: int
    words: tuple  # sorted word codes (big-endian base-alphabet)

    kind = "cylinder_set"

    @staticmethod
    def from_words(window: int, words, alphabet: int) -> "CylinderSet":
        codes = set()
        for w in words:
            if isinstance(w, str):
                if len(w) != window:
                    raise ValueError(f"word {w!r} does not have length {window}")
                code = 0
                for ch in w:
                    d = int(ch)
                    if not 0 <= d < alphabet:
                        raise ValueError(f"symbol {ch!r} out of alphabet")
                    code = code * alphabet + d
            else:
                code = int(w)
                if not 0 <= code < alphabet**window:
                    raise ValueError("word code out of range")
            codes.add(code)
        return CylinderSet(window=window, words=tuple(sorted(codes)))

    def measure_under(self, stream: SymbolStream) -> float:
        a = stream.alphabet_size
        total = 0.0
        for code in self.words:
            p = 1.0
            for pos in range(self.window - 1, -1, -1):
                p *= stream.probs[(code // a**pos) % a]
            total += p
        return total

    def indicator(self, alphabet: int, mean_zero=False) -> CylinderObservable:
        table = np.zeros(alphabet**self.window, dtype=np.complex128)
        for code in self.words:
            table[code] = 1.0
        return CylinderObservable(window=self.window, table=table, mean_zero=mean_zero)


MeasurableSet = CircleSet | CylinderSet


def exact_measure(sys, s) -> float:
    """mu(s) for the system's invariant measure, exactly."""
    if isinstance(sys, Rotation):
        if not isinstance(s, CircleSet):
            raise IncompatibleError("rotation takes circle-interval sets")
        return s.measure()
    if isinstance(sys, Bernoulli):
        if not isinstance(s, CylinderSet):
            raise IncompatibleError("bernoulli takes cylinder sets")
        return s.measure_under(sys.stream)
    raise UnsupportedError("exact measures only for rotation / bernoulli")


def _cyl_correlation(stream: SymbolStream, A: CylinderSet, B: CylinderSet, n: int) -> float:
    """mu(A intersect T^{-n} B) for cylinder sets, exact product measure."""

    probs = stream.probs
    a = stream.alphabet_size

    def word_prob(code, length):
        p = 1.0
        for pos in range(length - 1, -1, -1):
            p *= probs[(code // a**pos) % a]
        return p

    if n >= A.window:
        # windows [0, wA) and [n, n+wB) are disjoint coordinates
        return A.measure_under(stream) * B.measure_under(stream)

    overlap = min(A.window - n, B.window)
    tail = B.window - overlap
    # group B by its leading `overlap` symbols; weight = tail probability
    by_prefix: dict = {}
    for code in B.words:
        prefix, rest = divmod(code, a**tail)
        by_prefix[prefix] = by_prefix.get(prefix, 0.0) + word_prob(rest, tail)
    total = 0.0
    for code in A.words:
        # symbols of A at positions [n, n+overlap)
        below = A.window - n - overlap  # A positions beyond the overlap
        key = (code // a**below) % a**overlap
        w = by_prefix.get(key)
        if w is not None:
            total += word_prob(code, A.window) * w
    return total


def exact_set_correlation(sys, A, B, n: int) -> float:
    """mu(A intersect T^{-n} B), exactly."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if isinstance(sys, Product):
        raise UnsupportedError("set correlations for product systems are not available")
    if isinstance(sys, Rotation):
        if not (isinstance(A, CircleSet) and isinstance(B, CircleSet)):
            raise IncompatibleError("rotation takes circle-interval sets")
        if A.is_empty() or B.is_empty():
            return 0.0
        if A.is_full():
            return B.measure()
        if B.is_full():
            return A.measure()
        shift = (n * sys.alpha.frac) & MASK
        a_lo, a_len = A.kernel_arrays()
        b_lo, b_len = B.kernel_arrays()
        out = backend.get_kernels().arc_overlap_measures(
            a_lo, a_len, b_lo, b_len, np.asarray([shift], dtype=np.uint64)
        )
        return float(out[0])
    if isinstance(sys, Bernoulli):
        if not (isinstance(A, CylinderSet) and isinstance(B, CylinderSet)):
            raise IncompatibleError("bernoulli takes cylinder sets")
        return _cyl_correlation(sys.stream, A, B, n)
    raise TypeError(f"not a system: {sys!r}")


def rotation_set_correlations(sys: Rotation, A: CircleSet, B: CircleSet, ns) -> np.ndarray:
    """Vector of mu(A intersect T^{-n} B) over many n (hot path)."""
    if A.is_empty() or B.is_empty():
        return np.zeros(len(ns), dtype=np.float64)
    if A.is_full():
        return np.full(len(ns), B.measure(), dtype=np.float64)
    if B.is_full():
        return np.full(len(ns), A.measure(), dtype=np.float64)
    k = backend.get_kernels()
    idx = np.ascontiguousarray(ns, dtype=np.int64)
    shifts = k.fracs_at_indices(np.uint64(0), np.uint64(sys.alpha.frac), idx)
    a_lo, a_len = A.kernel_arrays()
    b_lo, b_len = B.kernel_arrays()
    return k.arc_overlap_measures(a_lo, a_len, b_lo, b_len, shifts)
