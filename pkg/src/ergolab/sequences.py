"""Bounded complex sequences, block constructions and their statistics.

Sequences are pure, deterministic index->value maps exposed through
`values(start, count)`; nothing is cached, so concurrent and repeated
evaluation is safe by construction.  Index conventions follow the sums:
averages run over n = 1..N, orbit sequences also define n = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ergolab import backend, fixedpoint, reduction, systems
from ergolab.fixedpoint import CirclePoint


class CoverageError(IndexError):
    """Sequence queried outside the range its construction covers."""


class ScheduleExhaustedError(RuntimeError):
    """Probe budget ran out before the requested schedule depth."""


# ------------------------------------------------------------- base classes


class ComplexSeq:
    """Deterministic lazily evaluated complex sequence.

    bound: uniform bound on |values| when known, else None.
    cesaro_l1: finite bound on limsup (1/N) sum |x_n| when that is the only
    boundedness guarantee.
    """

    bound: float | None = None
    cesaro_l1: float | None = None
    min_index: int = 0

    def values(self, start: int, count: int) -> np.ndarray:
        raise NotImplementedError

    def value(self, n: int) -> complex:
        return complex(self.values(n, 1)[0])

    def _check(self, start, count):
        if count < 0:
            raise ValueError("count must be >= 0")
        if start < self.min_index:
            raise CoverageError(f"index {start} below first index {self.min_index}")


@dataclass
class ConstantSeq(ComplexSeq):
    c: complex = 1.0 + 0j

    def __post_init__(self):
        self.bound = abs(self.c)

    def values(self, start, count):
        self._check(start, count)
        return np.full(count, complex(self.c), dtype=np.complex128)


@dataclass
class AlternatingSeq(ComplexSeq):
    """x_n = (-1)^n, optionally scaled."""

    scale: complex = 1.0 + 0j

    def __post_init__(self):
        self.bound = abs(self.scale)

    def values(self, start, count):
        self._check(start, count)
        signs = np.where((start + np.arange(count)) % 2 == 0, 1.0, -1.0)
        return self.scale * signs.astype(np.complex128)


@dataclass
class ArraySeq(ComplexSeq):
    """Finite sequence backed by an array; index `first` maps to data[0]."""

    data: np.ndarray = field(default_factory=lambda: np.zeros(0, np.complex128))
    first: int = 1

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.complex128)
        self.min_index = self.first
        self.bound = float(np.max(np.abs(self.data))) if len(self.data) else 0.0

    def values(self, start, count):
        self._check(start, count)
        lo = start - self.first
        if lo + count > len(self.data):
            raise CoverageError(
                f"index {start + count - 1} beyond stored length {len(self.data)}"
            )
        return self.data[lo : lo + count].copy()


@dataclass
class LinCombSeq(ComplexSeq):
    a: complex = 1.0
    x1: ComplexSeq = None
    b: complex = 0.0
    x2: ComplexSeq = None

    def __post_init__(self):
        self.min_index = max(self.x1.min_index, self.x2.min_index)
        if self.x1.bound is not None and self.x2.bound is not None:
            self.bound = abs(self.a) * self.x1.bound + abs(self.b) * self.x2.bound

    def values(self, start, count):
        return self.a * self.x1.values(start, count) + self.b * self.x2.values(
            start, count
        )


# -------------------------------------------------------- trig polynomials


@dataclass(frozen=True)
class TrigPolynomial:
    """P(n) = sum_j c_j e^{2 pi i n beta_j}, beta_j stored in fixed point."""

    terms: tuple  # ((CirclePoint beta, complex c), ...)

    @staticmethod
    def from_pairs(pairs) -> "TrigPolynomial":
        return TrigPolynomial(
            terms=tuple((fixedpoint.from_any(b), complex(c)) for b, c in pairs)
        )

    def _arrays(self):
        betas = np.asarray([b.frac for b, _ in self.terms], dtype=np.uint64)
        coeffs = np.asarray([c for _, c in self.terms], dtype=np.complex128)
        return betas, coeffs

    def eval_range(self, start: int, count: int) -> np.ndarray:
        if not self.terms:
            return np.zeros(count, dtype=np.complex128)
        betas, coeffs = self._arrays()
        k = backend.get_kernels()
        ns = k.rotation_fracs(np.uint64(0), np.uint64(1), start, count)
        return k.trig_eval_fracs(ns, betas, coeffs, 0j)


def trig_poly_eval(P: TrigPolynomial, n: int) -> complex:
    """P at a single index; n*beta is reduced mod 1 in fixed point first."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return complex(P.eval_range(n, 1)[0])


@dataclass
class TrigPolySeq(ComplexSeq):
    poly: TrigPolynomial = None

    def __post_init__(self):
        self.bound = float(sum(abs(c) for _, c in self.poly.terms))

    def values(self, start, count):
        self._check(start, count)
        return self.poly.eval_range(start, count)


def exp_sequence(beta) -> TrigPolySeq:
    """e^{2 pi i n beta} as a sequence."""
    return TrigPolySeq(poly=TrigPolynomial.from_pairs([(beta, 1.0)]))


# ------------------------------------------------------------ orbit sequence


@dataclass
class OrbitSeq(ComplexSeq):
    """x_n = f(T^(shift + n) base point)."""

    system: object = None
    observable: object = None
    shift: int = 0

    def __post_init__(self):
        self.min_index = max(0, -self.shift)
        f = self.observable
        if getattr(f, "kind", "") == "trigpoly":
            self.bound = float(sum(abs(c) for _, c in f.coeffs)) + (
                abs(f.mean()) if f.mean_zero else 0.0
            )
        elif getattr(f, "kind", "") == "indicator_combo":
            self.bound = float(sum(abs(w) for _, _, w in f.intervals)) + (
                abs(f.mean()) if f.mean_zero else 0.0
            )
        elif getattr(f, "kind", "") == "cylinder":
            top = float(np.max(np.abs(f.table))) if len(f.table) else 0.0
            self.bound = 2.0 * top if f.mean_zero else top  # |mean| <= max|table|
        else:
            self.bound = None

    def values(self, start, count):
        self._check(start, count)
        return systems.orbit_values(self.system, self.observable, self.shift + start, count)


def orbit_eval(sys, f, n_start: int, n_count: int) -> ArraySeq:
    """Sampled orbit window: element k is f(T^(n_start+k) base point)."""
    if n_start < 0:
        raise ValueError("n_start must be >= 0")
    if n_count < 1:
        raise ValueError("n_count must be >= 1")
    data = systems.orbit_values(sys, f, n_start, n_count)
    return ArraySeq(data=data, first=n_start)


# ------------------------------------------------------------ block sequence


def block_index(n: int) -> int:
    """The unique m with m(m-1)/2 < n <= m(m+1)/2."""
    if n < 1:
        raise ValueError("n must be >= 1")
    m = int((math.isqrt(8 * n + 1) - 1) // 2)
    while m * (m + 1) // 2 < n:
        m += 1
    while m > 1 and (m - 1) * m // 2 >= n:
        m -= 1
    return m


@dataclass(frozen=True)
class BlockSpec:
    """Constant blocks of growing length: value f(u_m) on block m.

    Default layout has block m at indices binom(m,2) < n <= binom(m+1,2)
    and u_m = m*alpha.  The generalized form takes any equidistributed
    point sequence u_m and any increasing gap sequence k_m (block m then
    sits on k_m < n <= k_{m+1}); growth validation is the caller's job.
    """

    alpha: CirclePoint
    observable: object  # circle observable (trigpoly / indicator_combo)
    points: object = None  # optional m -> CirclePoint
    gaps: tuple | None = None  # optional increasing (k_1, k_2, ...), k_1 >= 0

    def block_of(self, n: int) -> int:
        if self.gaps is None:
            return block_index(n)
        import bisect

        if n <= self.gaps[0]:
            raise CoverageError(f"index {n} below the first block")
        m = bisect.bisect_left(self.gaps, n)
        if m >= len(self.gaps):
            raise CoverageError(f"index {n} beyond the covered gap range")
        return m

    def point_of(self, m: int) -> CirclePoint:
        if self.points is None:
            return self.alpha.scale(m)
        return self.points(m)


def block_sequence(spec: BlockSpec, n: int) -> complex:
    """Value of the block sequence at index n (n >= 1 in the default spec)."""
    m = spec.block_of(n)
    frac = np.asarray([spec.point_of(m).frac], dtype=np.uint64)
    return complex(spec.observable.eval_fracs(frac)[0])


@dataclass
class BlockSeq(ComplexSeq):
    spec: BlockSpec = None
    min_index: int = 1

    def __post_init__(self):
        f = self.spec.observable
        if getattr(f, "kind", "") == "trigpoly":
            self.bound = float(sum(abs(c) for _, c in f.coeffs))
        else:
            self.bound = float(sum(abs(w) for _, _, w in f.intervals))
        if self.spec.gaps is not None:
            self.min_index = self.spec.gaps[0] + 1

    def values(self, start, count):
        self._check(start, count)
        k = backend.get_kernels()
        if self.spec.gaps is None and self.spec.points is None:
            ms = k.block_indices(start, count)
            fracs = k.fracs_at_indices(np.uint64(0), np.uint64(self.spec.alpha.frac), ms)
        else:
            ms = np.asarray(
                [self.spec.block_of(n) for n in range(start, start + count)],
                dtype=np.int64,
            )
            fracs = np.asarray(
                [self.spec.point_of(int(m)).frac for m in ms], dtype=np.uint64
            )
        return self.spec.observable.eval_fracs(fracs)


# ----------------------------------------------------- sequence statistics


def besicovitch_distance(x: ComplexSeq, P: TrigPolynomial, N: int) -> float:
    """(1/N) sum_{n<=N} |x_n - P(n)|, compensated summation."""
    if N < 1:
        raise ValueError("N must be >= 1")
    k = backend.get_kernels()
    diffs = x.values(1, N) - P.eval_range(1, N)
    return reduction.kahan_sum_f64(k.abs_values(diffs)) / N


def compactness_statistic(x: ComplexSeq, K: int, M: int, N: int) -> float:
    """max_{1<=m<=M} min_{1<=k<=K} (1/N) sum_{n<=N} |x_{n+m} - x_{n+k}|^2.

    Finite-horizon proxy: the true statistic takes the sup over all m, so
    this is an under-approximation (lower bound) of it.
    """
    if not (1 <= K <= M):
        raise ValueError("need 1 <= K <= M")
    if N < 1:
        raise ValueError("N must be >= 1")
    kern = backend.get_kernels()
    window = x.values(x.min_index, N + M + (1 - x.min_index))
    base = 1 - x.min_index  # window[base + (n-1)] == x_n

    def shifted(j):
        return window[base + j : base + j + N]

    worst = 0.0
    for m in range(1, M + 1):
        best = math.inf
        for k in range(1, K + 1):
            if k == m:
                best = 0.0
                break
            d2 = kern.abs2_diff(shifted(m), shifted(k))
            best = min(best, reduction.kahan_sum_f64(d2) / N)
        worst = max(worst, best)
    return worst


# ----------------------------------------------------------------- schedules


@dataclass(frozen=True)
class SubsequenceSchedule:
    """Strictly increasing horizons N_1 < N_2 < ... along which Cesaro
    estimates are read."""

    horizons: tuple

    def __post_init__(self):
        hs = tuple(int(h) for h in self.horizons)
        if not hs:
            raise ValueError("schedule must be nonempty")
        if any(h < 1 for h in hs):
            raise ValueError("horizons must be positive")
        if any(b <= a for a, b in zip(hs, hs[1:])):
            raise ValueError("horizons must be strictly increasing")
        object.__setattr__(self, "horizons", hs)

    @property
    def largest(self) -> int:
        return self.horizons[-1]

    def tail(self, fraction: float = 0.5) -> tuple:
        cut = int(len(self.horizons) * (1.0 - fraction))
        return self.horizons[min(cut, len(self.horizons) - 1) :]


def geometric_schedule(first: int, ratio: float, max_horizon: int) -> SubsequenceSchedule:
    hs = []
    cur = max(1, int(first))
    while cur <= max_horizon:
        hs.append(cur)
        cur = max(cur + 1, int(cur * ratio))
    if not hs or hs[-1] != max_horizon:
        hs.append(max_horizon)
    return SubsequenceSchedule(horizons=tuple(h for h in hs if h <= max_horizon))


def probe_grid(ratio: float, n_probe: int) -> list:
    """Integer probe horizons 1, ... growing by `ratio` (1.0 = all ints)."""
    if ratio < 1.0:
        raise ValueError("ratio must be >= 1")
    out = []
    cur = 1
    while cur <= n_probe:
        out.append(cur)
        cur = max(cur + 1, int(cur * ratio))
    return out


def greedy_schedule(
    x: ComplexSeq,
    k_max: int,
    n_probe: int,
    ratio: float = 1.1,
    tol: float = 0.05,
) -> SubsequenceSchedule:
    """Greedy horizons along which (1/N) sum |x_n| realizes its running
    maximum while each next horizon exceeds k * sum_{n<=N_k} |x_n|.

    Probes a geometric integer grid (ratio 1.1 by default; 1.0 probes every
    integer).  Raises ScheduleExhaustedError when the probe budget cannot
    supply k_max levels, which for |x_n| = 1 happens once horizons must
    grow faster than k! reaches n_probe.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    grid = probe_grid(ratio, n_probe)
    kern = backend.get_kernels()

    # prefix sums S(P) of |x_n| at the probe points: blockwise cumulative
    # sums, sequential across blocks (schedule choice only needs a
    # deterministic estimator, not the chunked reduction)
    s_vals = np.empty(len(grid), dtype=np.float64)
    base = 0.0
    gi = 0
    block = 1 << 16
    for start in range(1, n_probe + 1, block):
        cnt = min(block, n_probe - start + 1)
        cs = np.cumsum(kern.abs_values(x.values(start, cnt)))
        while gi < len(grid) and grid[gi] <= start + cnt - 1:
            s_vals[gi] = base + cs[grid[gi] - start]
            gi += 1
        base += float(cs[-1])

    avgs = [sv / p for sv, p in zip(s_vals, grid)]
    peak = max(avgs)
    i1 = avgs.index(peak)
    levels = [grid[i1]]
    sums = [s_vals[i1]]
    idx = i1
    k = 1
    while len(levels) < k_max:
        need = k * sums[-1]
        j = idx + 1
        found = None
        while j < len(grid):
            if grid[j] > need and grid[j] > levels[-1] and abs(avgs[j] - peak) <= tol:
                found = j
                break
            j += 1
        if found is None:
            raise ScheduleExhaustedError(
                f"probe grid (<= {n_probe}) exhausted at level {len(levels)} of {k_max}"
            )
        levels.append(grid[found])
        sums.append(s_vals[found])
        idx = found
        k += 1
    return SubsequenceSchedule(horizons=tuple(levels))


# ------------------------------------------------------------------ pairing


def cantor_pair(m: int, h: int) -> int:
    """(m+h)(m+h+1)/2 + h, a bijection of pairs of nonnegative integers."""
    if m < 0 or h < 0:
        raise ValueError("pair components must be >= 0")
    return (m + h) * (m + h + 1) // 2 + h


def cantor_unpair(z: int) -> tuple:
    if z < 0:
        raise ValueError("z must be >= 0")
    w = (math.isqrt(8 * z + 1) - 1) // 2
    while (w + 1) * (w + 2) // 2 <= z:
        w += 1
    while w * (w + 1) // 2 > z:
        w -= 1
    h = z - w * (w + 1) // 2
    return (w - h, h)


# -------------------------------------------------------------- adversarial


@dataclass
class CompanionSeq(ComplexSeq):
    """On block q (N_q < n <= N_{q+1}, N_0 = 0): y_n = sgn(x_{n+h_q}) with
    h_q read off the pairing; indices beyond the last horizon are an error."""

    x: ComplexSeq = None
    schedule: SubsequenceSchedule = None
    min_index: int = 1
    bound: float = 1.0

    def block_edges(self):
        return (0,) + tuple(self.schedule.horizons)

    def values(self, start, count):
        self._check(start, count)
        edges = self.block_edges()
        if count == 0:
            return np.zeros(0, dtype=np.complex128)
        if start + count - 1 > edges[-1]:
            raise CoverageError(
                f"index {start + count - 1} beyond covered blocks (last horizon {edges[-1]})"
            )
        kern = backend.get_kernels()
        out = np.empty(count, dtype=np.complex128)
        import bisect

        n = start
        while n < start + count:
            q = bisect.bisect_left(edges, n) - 1  # block with edges[q] < n <= edges[q+1]
            hi = edges[q + 1]
            run = min(hi, start + count - 1) - n + 1
            _, h_q = cantor_unpair(q)
            out[n - start : n - start + run] = kern.sgn_values(
                self.x.values(n + h_q, run)
            )
            n += run
        return out


@dataclass(frozen=True)
class AdversarialCompanion:
    y: CompanionSeq
    schedule: SubsequenceSchedule

    def designated_horizon(self, m: int, h: int) -> int:
        """N_{pi(m,h)+1}: the horizon at which the pair (m, h) is realized."""
        q = cantor_pair(m, h)
        if q >= len(self.schedule.horizons):
            raise CoverageError(f"pair ({m}, {h}) not covered by the schedule")
        return self.schedule.horizons[q]

    def covered_pairs(self) -> list:
        return [cantor_unpair(q) for q in range(len(self.schedule.horizons))]


def adversarial_companion(x: ComplexSeq, sched: SubsequenceSchedule) -> AdversarialCompanion:
    """The bounded companion built from sgn(x_{n+h}) on pairing-assigned
    blocks; |y_n| <= 1 everywhere and x_{n+h} conj(y_n) = |x_{n+h}| on the
    block assigned to h."""
    if x.bound is None and x.cesaro_l1 is None:
        raise ValueError("companion needs a bounded or Cesaro-L1-bounded sequence")
    y = CompanionSeq(x=x, schedule=sched)
    return AdversarialCompanion(y=y, schedule=sched)
