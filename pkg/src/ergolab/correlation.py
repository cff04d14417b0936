"""Cesaro averages, twisted averages and correlation profiles.

Every sum here goes through the chunked compensated reduction, so any
quantity is bit-stable across worker counts and across standalone versus
scheduled evaluation.  Correlation estimates ell(h) are reported at the
largest schedule horizon together with an instability diagnostic (max
deviation over the schedule's tail) instead of asserting that a limit
exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ergolab import backend, fixedpoint, reduction, systems
from ergolab.fixedpoint import CirclePoint
from ergolab.sequences import ComplexSeq, SubsequenceSchedule


class GuardError(ValueError):
    """A numeric guard tripped (index overflow, negative polynomial index)."""


# ----------------------------------------------------------------- averages


def cesaro_average(x: ComplexSeq, N: int) -> complex:
    """(1/N) sum_{n=1}^{N} x_n."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return reduction.kahan_sum(x.values(1, N)) / N


def correlation_at(x: ComplexSeq, y: ComplexSeq, h: int, N: int) -> complex:
    """(1/N) sum_{n=1}^{N} x_{n+h} conj(y_n)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if h < 0:
        raise ValueError("h must be >= 0")
    xs = x.values(1 + h, N)
    ys = y.values(1, N)
    return reduction.corr_prefix_sums(xs, ys, 0, [N])[0] / N


# ------------------------------------------------------------------ profiles


@dataclass(frozen=True)
class CorrelationProfile:
    """Estimates ell(h) for h = 0..H at the largest schedule horizon, plus a
    per-h instability diagnostic over the schedule's tail horizons."""

    estimates: np.ndarray  # complex128, index h
    instability: np.ndarray  # float64, index h
    schedule: SubsequenceSchedule
    tail_fraction: float = 0.5

    @property
    def H(self) -> int:
        return len(self.estimates) - 1

    def abs_estimates(self) -> np.ndarray:
        return np.abs(self.estimates)


def correlation_profile(
    x: ComplexSeq,
    y: ComplexSeq,
    sched: SubsequenceSchedule,
    H: int,
    tail_fraction: float = 0.5,
) -> CorrelationProfile:
    """Profile h -> ell_hat(h) for h = 0..H along the schedule.

    Materializes both sequences once (x up to N_max + H, y up to N_max) and
    reuses the chunk partials for every horizon of each h.
    """
    if H < 0:
        raise ValueError("H must be >= 0")
    n_max = sched.largest
    xs = x.values(1, n_max + H)
    ys = y.values(1, n_max)
    horizons = list(sched.horizons)
    tail = sched.tail(tail_fraction)
    tail_pos = [horizons.index(t) for t in tail]
    est = np.zeros(H + 1, dtype=np.complex128)
    inst = np.zeros(H + 1, dtype=np.float64)
    for h in range(H + 1):
        sums = reduction.corr_prefix_sums(xs, ys, h, horizons)
        ests = [s / n for s, n in zip(sums, horizons)]
        est[h] = ests[-1]
        inst[h] = max(abs(ests[i] - est[h]) for i in tail_pos)
    return CorrelationProfile(
        estimates=est, instability=inst, schedule=sched, tail_fraction=tail_fraction
    )


def weak_mixing_statistic(prof: CorrelationProfile, H: int) -> float:
    """(1/H) sum_{h=1}^{H} |ell_hat(h)|."""
    if not 1 <= H <= prof.H:
        raise ValueError("H out of profile range")
    return reduction.kahan_sum_f64(np.abs(prof.estimates[1 : H + 1])) / H


def strong_mixing_statistic(prof: CorrelationProfile, h_min: int, h_max: int) -> float:
    """max_{h_min <= h <= h_max} |ell_hat(h)| (finite tail proxy)."""
    if not 1 <= h_min <= h_max <= prof.H:
        raise ValueError("tail range out of profile range")
    return float(np.max(np.abs(prof.estimates[h_min : h_max + 1])))


def squares_cesaro(prof: CorrelationProfile, H: int) -> float:
    """(1/H) sum_{h=1}^{H} |ell_hat(h^2)|."""
    if H < 1:
        raise ValueError("H must be >= 1")
    if H * H > prof.H:
        raise ValueError(f"profile range {prof.H} < H^2 = {H * H}")
    idx = np.asarray([h * h for h in range(1, H + 1)], dtype=np.int64)
    return reduction.kahan_sum_f64(np.abs(prof.estimates[idx])) / H


# ------------------------------------------------------------------ twisting


@dataclass(frozen=True)
class TwistParameter:
    """Unimodular lambda = e^{2 pi i angle}, angle held in fixed point."""

    angle: CirclePoint

    @staticmethod
    def from_any(spec) -> "TwistParameter":
        return TwistParameter(angle=fixedpoint.from_any(spec))

    def value(self) -> complex:
        theta = 2.0 * math.pi * self.angle.to_float()
        return complex(math.cos(theta), math.sin(theta))

    def powers(self, start: int, count: int) -> np.ndarray:
        """lambda^n for n = start..start+count-1 by exact angle accumulation."""
        k = backend.get_kernels()
        ns = k.rotation_fracs(np.uint64(0), np.uint64(1), start, count)
        freqs = np.asarray([self.angle.frac], dtype=np.uint64)
        ones = np.asarray([1.0 + 0j], dtype=np.complex128)
        return k.trig_eval_fracs(ns, freqs, ones, 0j)


def twisted_average(x: ComplexSeq, lam: TwistParameter, N: int) -> complex:
    """(1/N) sum_{n=1}^{N} x_n lambda^n; phases n*angle accumulate in fixed
    point so there is no drift at any N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    xs = x.values(1, N)
    ys = np.conj(lam.powers(1, N))  # corr kernel conjugates back
    return reduction.corr_prefix_sums(xs, ys, 0, [N])[0] / N


# ------------------------------------------------------- polynomial averages


@dataclass(frozen=True)
class IntPolynomial:
    """p(n) = c_0 + c_1 n + ... over the integers, degree <= 8."""

    coefficients: tuple

    def __post_init__(self):
        cs = tuple(int(c) for c in self.coefficients)
        if len(cs) > 9:
            raise ValueError("degree must be <= 8")
        object.__setattr__(self, "coefficients", cs)

    def degree(self) -> int:
        return max((i for i, c in enumerate(self.coefficients) if c != 0), default=0)

    def eval_exact(self, n: int) -> int:
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * n + c
        return acc

    def eval_range(self, N: int) -> np.ndarray:
        """p(1..N) with overflow and nonnegativity guards.

        Uses exact int64 Horner when a coefficient-size bound proves it
        safe; falls back to python integers otherwise.
        """
        if N < 1:
            raise ValueError("N must be >= 1")
        mag_bound = sum(abs(c) * N**i for i, c in enumerate(self.coefficients))
        if mag_bound < 2**62:
            ns = np.arange(1, N + 1, dtype=np.int64)
            acc = np.zeros(N, dtype=np.int64)
            for c in reversed(self.coefficients):
                acc = acc * ns + c
            bad = np.nonzero(acc < 0)[0]
            if len(bad):
                raise GuardError(f"p(n) < 0 at n = {int(bad[0]) + 1}")
            return acc
        vals = np.empty(N, dtype=np.int64)
        for n in range(1, N + 1):
            v = self.eval_exact(n)
            if v < 0:
                raise GuardError(f"p(n) < 0 at n = {n}")
            if v >= 1 << 63:
                raise GuardError(f"p(n) overflows the index width at n = {n}")
            vals[n - 1] = v
        return vals


def polynomial_average(sys, f, p: IntPolynomial, N: int) -> complex:
    """(1/N) sum_{n=1}^{N} f(T^{p(n)} base point), by direct point indexing."""
    if N < 1:
        raise ValueError("N must be >= 1")
    idx = p.eval_range(N)
    vals = systems.orbit_values_at(sys, f, idx)
    return reduction.kahan_sum(vals) / N
