"""Cesaro engine: averages, profiles, twists, polynomial averages."""

import cmath
import math

import numpy as np
import pytest

from ergolab import backend, correlation, fixedpoint
from ergolab.correlation import (
    GuardError,
    IntPolynomial,
    TwistParameter,
    cesaro_average,
    correlation_at,
    correlation_profile,
    polynomial_average,
    squares_cesaro,
    strong_mixing_statistic,
    twisted_average,
    weak_mixing_statistic,
)
from ergolab.sequences import (
    ArraySeq,
    ConstantSeq,
    LinCombSeq,
    OrbitSeq,
    SubsequenceSchedule,
    exp_sequence,
    geometric_schedule,
)
from ergolab.systems import TrigObservable
from ergolab.verify import fair_pm1_system, golden_rotation, parity_observable


# ------------------------------------------------------------ cesaro_average


def test_cesaro_constant_exact():
    assert cesaro_average(ConstantSeq(c=0.25 - 0.5j), 999) == 0.25 - 0.5j


def test_cesaro_geometric_closed_form():
    # (1/N) sum lam^n = (lam/N)(lam^N - 1)/(lam - 1)
    beta = fixedpoint.from_any("2/7")
    x = exp_sequence(beta)
    lam = cmath.exp(2j * cmath.pi * beta.to_float())
    for N in (10, 137, 4096, 10000):
        got = cesaro_average(x, N)
        expect = lam * (lam**N - 1.0) / (lam - 1.0) / N
        assert abs(got - expect) < 1e-9
        assert abs(got) <= 2.0 / (N * abs(lam - 1.0)) + 1e-12


def test_cesaro_bernoulli_clt_and_exact_oracle():
    sys_b, obs = fair_pm1_system()
    x = OrbitSeq(system=sys_b, observable=obs)
    N = 1 << 18
    got = cesaro_average(x, N)
    # independent oracle: exact accumulation with math.fsum
    vals = x.values(1, N)
    oracle = complex(math.fsum(vals.real), math.fsum(vals.imag)) / N
    assert abs(got) <= 5.0 / math.sqrt(N)
    assert abs(got - oracle) <= 1e-12


# ------------------------------------------------------------ correlation_at


def test_correlation_phases_cancel_exactly():
    x = exp_sequence("1/5")
    lam = cmath.exp(2j * cmath.pi / 5)
    for h in range(4):
        for N in (7, 100):
            got = correlation_at(x, x, h, N)
            assert abs(got - lam**h) < 1e-13


def test_correlation_distinct_frequencies_geometric_bound():
    a, b = fixedpoint.from_any("1/3"), fixedpoint.from_any("1/7")
    x, y = exp_sequence(a), exp_sequence(b)
    N = 5000
    got = abs(correlation_at(x, y, 0, N))
    bound = 2.0 / (N * abs(1.0 - cmath.exp(2j * cmath.pi * (a.to_float() - b.to_float()))))
    assert got <= bound + 1e-12


def test_correlation_pm1_self_h0_is_one():
    sys_b, obs = fair_pm1_system()
    x = OrbitSeq(system=sys_b, observable=obs)
    assert correlation_at(x, x, 0, 10000) == 1.0 + 0j


def test_correlation_with_ones_equals_cesaro_bitwise():
    sys_b, obs = fair_pm1_system()
    x = OrbitSeq(system=sys_b, observable=obs)
    ones = ConstantSeq(c=1.0)
    for N in (1000, 4096, 10001):
        assert correlation_at(x, ones, 0, N) == cesaro_average(x, N)


def test_correlation_linearity():
    sys_b, obs = fair_pm1_system()
    x1 = OrbitSeq(system=sys_b, observable=obs)
    x2 = exp_sequence("golden")
    y = exp_sequence("1/3")
    a, b = 0.7 - 0.2j, -1.1 + 0.4j
    N, h = 10**5, 3
    lhs = correlation_at(LinCombSeq(a=a, x1=x1, b=b, x2=x2), y, h, N)
    rhs = a * correlation_at(x1, y, h, N) + b * correlation_at(x2, y, h, N)
    assert abs(lhs - rhs) <= 1e-12 * (N / 10**6 + 1.0)


def test_correlation_cauchy_bound_small_n_bruteforce():
    rng = np.random.default_rng(11)
    xs = rng.standard_normal(40) + 1j * rng.standard_normal(40)
    ys = rng.standard_normal(30) + 1j * rng.standard_normal(30)
    ys /= np.maximum(np.abs(ys), 1.0)  # bound 1
    x = ArraySeq(data=xs, first=1)
    y = ArraySeq(data=ys, first=1)
    for h in (0, 2, 5):
        for N in (5, 17, 30):
            got = abs(correlation_at(x, y, h, N))
            bound = np.sum(np.abs(xs[h : h + N])) / N
            assert got <= bound + 1e-12


def test_correlation_determinism_across_threads():
    if backend.active_backend() != "numba":
        pytest.skip("thread control only applies to the numba backend")
    sys_b, obs = fair_pm1_system()
    x = OrbitSeq(system=sys_b, observable=obs)
    y = exp_sequence("golden")
    results = []
    for k in (1, 4, 8):
        backend.set_threads(k)
        results.append(correlation_at(x, y, 5, 10**5))
    backend.set_threads(2)
    assert results[0] == results[1] == results[2]


# ----------------------------------------------------------------- profiles


def test_profile_eigenvalue_sequence():
    beta = fixedpoint.from_any("1/5")
    x = exp_sequence(beta)
    sched = SubsequenceSchedule(horizons=(100, 200, 400, 800))
    prof = correlation_profile(x, x, sched, 6)
    lam = cmath.exp(2j * cmath.pi / 5)
    for h in range(7):
        assert abs(prof.estimates[h] - lam**h) < 1e-12
        assert prof.instability[h] < 1e-12
    assert weak_mixing_statistic(prof, 6) == pytest.approx(1.0, abs=1e-12)
    assert strong_mixing_statistic(prof, 1, 6) == pytest.approx(1.0, abs=1e-12)


def test_profile_estimate_matches_standalone_bitwise():
    sys_b, obs = fair_pm1_system()
    x = OrbitSeq(system=sys_b, observable=obs)
    y = exp_sequence("golden")
    sched = SubsequenceSchedule(horizons=(1000, 3000, 9000, 27001))
    prof = correlation_profile(x, y, sched, 4)
    for h in range(5):
        assert prof.estimates[h] == correlation_at(x, y, h, 27001)


def test_profile_instability_reflects_tail_wander():
    sys_b, obs = fair_pm1_system()
    x = OrbitSeq(system=sys_b, observable=obs)
    sched = geometric_schedule(1000, 2.0, 64000)
    prof = correlation_profile(x, x, sched, 3)
    ref = prof.estimates[2]
    tail = sched.tail(0.5)
    devs = [
        abs(correlation_at(x, x, 2, n) - ref) for n in tail
    ]
    assert prof.instability[2] == pytest.approx(max(devs), abs=0)


def test_statistics_range_validation():
    x = exp_sequence("1/5")
    prof = correlation_profile(x, x, SubsequenceSchedule(horizons=(50, 100)), 4)
    with pytest.raises(ValueError):
        weak_mixing_statistic(prof, 5)
    with pytest.raises(ValueError):
        strong_mixing_statistic(prof, 1, 9)
    with pytest.raises(ValueError):
        squares_cesaro(prof, 3)  # needs range >= 9


def test_squares_cesaro_trivial_profiles():
    ones = ConstantSeq(c=1.0)
    prof = correlation_profile(ones, ones, SubsequenceSchedule(horizons=(100, 200)), 25)
    assert squares_cesaro(prof, 5) == pytest.approx(1.0, abs=1e-14)
    zeros = ConstantSeq(c=0.0)
    prof0 = correlation_profile(zeros, ones, SubsequenceSchedule(horizons=(100, 200)), 25)
    assert squares_cesaro(prof0, 5) == 0.0


# ------------------------------------------------------------------ twisting


def test_twisted_rotation_eigenfunction_identity():
    rot = golden_rotation("1/3")
    f = TrigObservable(coeffs=((1, 1.0 + 0j),))
    x = OrbitSeq(system=rot, observable=f)
    lam = TwistParameter(angle=rot.alpha.negate())
    expect = cmath.exp(2j * cmath.pi * rot.x0.to_float())
    for N in (10, 1000, 10**5):
        assert abs(twisted_average(x, lam, N) - expect) < 1e-12


def test_twist_lambda_one_reduces_to_cesaro_bitwise():
    sys_b, obs = fair_pm1_system()
    x = OrbitSeq(system=sys_b, observable=obs)
    lam = TwistParameter(angle=fixedpoint.CirclePoint(0))
    for N in (100, 4096, 9999):
        assert twisted_average(x, lam, N) == cesaro_average(x, N)


def test_twisted_bernoulli_vanishes():
    sys_b, obs = fair_pm1_system()
    x = OrbitSeq(system=sys_b, observable=obs)
    lam = TwistParameter.from_any("1/3")
    assert abs(twisted_average(x, lam, 10**5)) <= 10.0 / math.sqrt(10**5)


def test_twist_powers_no_drift():
    lam = TwistParameter.from_any("golden")
    big = 10**7
    vals = lam.powers(big, 3)
    expect = cmath.exp(2j * cmath.pi * ((big * fixedpoint.GOLDEN.frac) & (2**64 - 1)) / 2**64)
    assert abs(vals[0] - expect) < 1e-12
    assert abs(abs(vals[0]) - 1.0) < 1e-15


# -------------------------------------------------------- polynomial average


def test_poly_identity_reduces_to_cesaro_bitwise():
    sys_b, obs = fair_pm1_system()
    x = OrbitSeq(system=sys_b, observable=obs)
    p = IntPolynomial((0, 1))
    for N in (128, 5000):
        assert polynomial_average(sys_b, obs, p, N) == cesaro_average(x, N)


def test_poly_squares_weyl_sum_rotation():
    rot = golden_rotation(0)
    f = TrigObservable(coeffs=((1, 1.0 + 0j),))
    p = IntPolynomial((0, 0, 1))
    N = 10**5
    got = polynomial_average(rot, f, p, N)
    # oracle: direct evaluation of the quadratic phase sum
    fracs = (np.arange(1, N + 1, dtype=object) ** 2 * fixedpoint.GOLDEN.frac) & (2**64 - 1)
    direct = np.mean(np.exp(2j * np.pi * (np.asarray(fracs, dtype=np.float64) / 2**64)))
    assert abs(got - direct) < 1e-9
    assert abs(got) < 1e-2


def test_poly_squares_bernoulli_mean_zero():
    sys_b, _ = fair_pm1_system()
    obs = parity_observable(4)
    p = IntPolynomial((0, 0, 1))
    got = polynomial_average(sys_b, obs, p, 10**5)
    assert abs(got) <= 1e-2


def test_poly_guards():
    sys_b, obs = fair_pm1_system()
    with pytest.raises(GuardError):
        polynomial_average(sys_b, obs, IntPolynomial((0, -1)), 100)
    with pytest.raises(GuardError):
        polynomial_average(sys_b, obs, IntPolynomial((2**62, 2**62)), 100)
    with pytest.raises(ValueError):
        IntPolynomial((1,) * 10)


def test_poly_degree_and_exact_eval():
    p = IntPolynomial((3, 0, 2))
    assert p.degree() == 2
    assert p.eval_exact(5) == 53
    assert list(p.eval_range(3)) == [5, 11, 21]
