"""Systems: exact orbits, exact measures, exact set correlations."""

import cmath
import math
import numpy as np
import pytest

from ergolab import fixedpoint
from ergolab.fixedpoint import GOLDEN, MASK, CirclePoint
from ergolab.streams import SymbolStream, fair_binary
from ergolab.systems import (
    Bernoulli,
    CircleSet,
    CylinderObservable,
    CylinderSet,
    IncompatibleError,
    IndicatorObservable,
    Product,
    Rotation,
    TrigObservable,
    UnsupportedError,
    exact_measure,
    exact_set_correlation,
    iterate_point,
    orbit_values,
    orbit_values_at,
    rotation_set_correlations,
)

PM1_TABLE = np.asarray([1.0, -1.0], dtype=np.complex128)


def golden_rotation(x0=0):
    return Rotation(alpha=GOLDEN, x0=fixedpoint.from_any(x0))


# ------------------------------------------------------------- iterate_point


def test_iterate_exact_rational_rotation():
    rot = Rotation(alpha=fixedpoint.from_any("1/4"), x0=CirclePoint(0))
    assert iterate_point(rot, 3).to_float() == 0.75


def test_iterate_identity_case():
    rot = golden_rotation("0.4711")
    assert iterate_point(rot, 0) == rot.x0


def test_iterate_golden_million_bigint_oracle():
    # oracle: full-precision integer multiply reduced mod 2^64
    rot = golden_rotation(0)
    expect = (10**6 * GOLDEN.frac) & MASK
    assert iterate_point(rot, 10**6).frac == expect


def test_iterate_bernoulli_offset_and_product_pair():
    sys_b = Bernoulli(stream=fair_binary(5))
    assert iterate_point(sys_b, 17) == 17
    prod = Product(left=golden_rotation(), right=sys_b)
    pt = iterate_point(prod, 4)
    assert pt == (iterate_point(prod.left, 4), 4)


def test_iterate_negative_rejected():
    with pytest.raises(ValueError):
        iterate_point(golden_rotation(), -1)


# ---------------------------------------------------------------- orbit_eval


def test_rotation_orbit_unrolls_definition():
    rot = golden_rotation("1/3")
    f = TrigObservable(coeffs=((1, 1.0 + 0j),))
    vals = orbit_values(rot, f, 0, 3)
    x0 = rot.x0.to_float()
    a = rot.alpha.to_float()
    for k in range(3):
        assert abs(vals[k] - cmath.exp(2j * cmath.pi * (x0 + k * a))) < 1e-12


def test_bernoulli_pm1_window_one():
    sys_b = Bernoulli(stream=fair_binary(99))
    f = CylinderObservable(window=1, table=PM1_TABLE)
    vals = orbit_values(sys_b, f, 0, 200)
    sym = sys_b.stream.symbols(0, 200)
    assert np.array_equal(vals.real, np.where(sym == 0, 1.0, -1.0))
    assert np.all(vals.imag == 0.0)


def test_doubling_map_window20_cosine_mean():
    # shift realization of the doubling map: binary window approximating
    # cos(2 pi x); sample mean near 0 at CLT scale.  Independent oracle:
    # direct Monte Carlo with a separate generator.
    w = 20
    size = 1 << w
    table = np.cos(2.0 * math.pi * np.arange(size) / size).astype(np.complex128)
    f = CylinderObservable(window=w, table=table)
    sys_b = Bernoulli(stream=fair_binary(314159))
    n = 10**6
    vals = orbit_values(sys_b, f, 0, n)
    mean = np.mean(vals.real)
    assert abs(mean) <= 5e-3
    rng = np.random.default_rng(271828)
    oracle = np.mean(np.cos(2.0 * math.pi * rng.random(n)))
    assert abs(oracle) <= 5e-3
    assert abs(mean - oracle) <= 1e-2


def test_orbit_deterministic_and_order_free():
    sys_b = Bernoulli(stream=fair_binary(1))
    f = CylinderObservable(window=3, table=np.arange(8, dtype=np.complex128))
    whole = orbit_values(sys_b, f, 0, 300)
    pieces = np.concatenate([orbit_values(sys_b, f, 100, 200), orbit_values(sys_b, f, 0, 100)])
    assert np.array_equal(whole, np.concatenate([pieces[200:], pieces[:200]]))


def test_orbit_values_at_matches_range():
    rot = golden_rotation("1/7")
    f = TrigObservable(coeffs=((2, 0.5 + 0j), (-1, 0.25j)))
    rng_vals = orbit_values(rot, f, 0, 50)
    idx = np.asarray([0, 7, 11, 49], dtype=np.int64)
    at = orbit_values_at(rot, f, idx)
    assert np.array_equal(at, rng_vals[idx])


def test_incompatible_pairings_raise():
    rot = golden_rotation()
    sys_b = Bernoulli(stream=fair_binary(2))
    with pytest.raises(IncompatibleError):
        orbit_values(rot, CylinderObservable(window=1, table=PM1_TABLE), 0, 4)
    with pytest.raises(IncompatibleError):
        orbit_values(sys_b, TrigObservable(coeffs=((1, 1.0),)), 0, 4)


def test_product_orbit_dispatches_to_factor():
    rot = golden_rotation("1/3")
    sys_b = Bernoulli(stream=fair_binary(5))
    prod = Product(left=sys_b, right=rot)
    f = TrigObservable(coeffs=((1, 1.0 + 0j),))
    assert np.array_equal(orbit_values(prod, f, 0, 16), orbit_values(rot, f, 0, 16))
    g = CylinderObservable(window=1, table=PM1_TABLE)
    assert np.array_equal(orbit_values(prod, g, 0, 16), orbit_values(sys_b, g, 0, 16))


def test_mean_zero_adjustment_is_exact():
    # trig polynomial: mean is the zero-frequency coefficient
    f = TrigObservable(coeffs=((0, 0.75 + 0j), (3, 1.0 + 0j)), mean_zero=True)
    rot = golden_rotation()
    vals = orbit_values(rot, f, 0, 8)
    raw = orbit_values(rot, TrigObservable(coeffs=((0, 0.75 + 0j), (3, 1.0 + 0j))), 0, 8)
    assert np.allclose(vals, raw - 0.75, atol=0, rtol=0)


# -------------------------------------------------------------- exact_measure


def test_measure_half_interval():
    rot = golden_rotation()
    s = CircleSet.from_intervals([(0, "1/2")])
    assert exact_measure(rot, s) == 0.5


def test_measure_fair_cylinder_pair():
    sys_b = Bernoulli(stream=fair_binary(0))
    s = CylinderSet.from_words(2, ["00", "01"], alphabet=2)
    assert exact_measure(sys_b, s) == 0.5


def test_measure_biased_cylinder_hand_enumeration():
    sys_b = Bernoulli(stream=SymbolStream(probs=(0.3, 0.7), seed=0))
    s = CylinderSet.from_words(2, ["01", "10"], alphabet=2)
    assert exact_measure(sys_b, s) == pytest.approx(0.42, abs=1e-15)


def test_measure_interval_union_merges():
    s = CircleSet.from_intervals([(0, 0.25), (0.25, 0.5), (0.75, 1.0)])
    assert s.measure() == 0.75
    # adjacent pieces merge (here into one arc wrapping through 0)
    assert len(s.arcs) == 1
    ind = s.indicator()
    fracs = np.asarray(
        [fixedpoint.from_any(v).frac for v in (0.1, 0.4, 0.6, 0.8, 0.499, 0.501)],
        dtype=np.uint64,
    )
    assert list(ind.eval_fracs(fracs).real) == [1, 1, 0, 1, 1, 0]


def test_full_circle_detection():
    assert CircleSet.from_intervals([(0, 0.5), (0.5, 1.0)]).is_full()
    assert CircleSet.from_intervals([(0, 1)]).is_full()
    assert CircleSet.full().measure() == 1.0


def test_wrapping_interval():
    s = CircleSet.from_intervals([(0.75, 0.25)])
    assert s.measure() == 0.5


# ---------------------------------------------------- exact_set_correlation


def test_rotation_quarter_shift_overlap():
    rot = Rotation(alpha=fixedpoint.from_any("1/4"), x0=CirclePoint(0))
    A = CircleSet.from_intervals([(0, "1/2")])
    assert exact_set_correlation(rot, A, A, 1) == 0.25


def test_rotation_overlap_matches_arc_formula():
    # |1/2 - t| for A = B = [0, 1/2) under shift t
    rot = golden_rotation()
    A = CircleSet.from_intervals([(0, "1/2")])
    ns = np.arange(1, 2000)
    got = rotation_set_correlations(rot, A, A, ns)
    t = (ns.astype(np.float64) * GOLDEN.to_float()) % 1.0
    expect = np.where(t <= 0.5, 0.5 - t, t - 0.5)
    assert np.max(np.abs(got - expect)) < 1e-12


def test_bernoulli_disjoint_coordinates_factorize():
    sys_b = Bernoulli(stream=fair_binary(0))
    A = CylinderSet.from_words(1, ["0"], alphabet=2)
    for n in (1, 2, 10):
        assert exact_set_correlation(sys_b, A, A, n) == 0.25
    assert exact_set_correlation(sys_b, A, A, 0) == 0.5


def test_bernoulli_overlap_against_bruteforce():
    # oracle: enumerate every word long enough to cover both windows
    probs = (0.3, 0.7)
    sys_b = Bernoulli(stream=SymbolStream(probs=probs, seed=0))
    A = CylinderSet.from_words(3, ["010", "111", "001"], alphabet=2)
    B = CylinderSet.from_words(2, ["01", "10"], alphabet=2)

    def brute(n):
        total_len = max(3, n + 2)
        total = 0.0
        for word in range(2**total_len):
            digits = [(word >> (total_len - 1 - i)) & 1 for i in range(total_len)]
            a_code = digits[0] * 4 + digits[1] * 2 + digits[2]
            b_code = digits[n] * 2 + digits[n + 1]
            if a_code in A.words and b_code in B.words:
                p = 1.0
                for d in digits:
                    p *= probs[d]
                total += p
        return total

    for n in range(0, 5):
        assert exact_set_correlation(sys_b, A, B, n) == pytest.approx(brute(n), abs=1e-14)


def test_full_space_preserves_measure():
    # mu(X cap T^-n B) = mu(B) for every n
    rot = golden_rotation()
    B = CircleSet.from_intervals([(0.1, 0.35)])
    full = CircleSet.full()
    for n in (0, 1, 17, 12345):
        assert exact_set_correlation(rot, full, B, n) == exact_measure(rot, B)

    sys_b = Bernoulli(stream=fair_binary(3))
    Bw = CylinderSet.from_words(2, ["01"], alphabet=2)
    full_w = CylinderSet.from_words(1, ["0", "1"], alphabet=2)
    for n in (0, 1, 5):
        assert exact_set_correlation(sys_b, full_w, Bw, n) == pytest.approx(
            exact_measure(sys_b, Bw), abs=1e-15
        )


def test_product_set_correlation_unsupported():
    prod = Product(left=golden_rotation(), right=Bernoulli(stream=fair_binary(1)))
    A = CircleSet.from_intervals([(0, 0.5)])
    with pytest.raises(UnsupportedError):
        exact_set_correlation(prod, A, A, 1)


def test_empty_set_correlation_zero():
    rot = golden_rotation()
    A = CircleSet.from_intervals([(0, 0.5)])
    empty = CircleSet.from_intervals([])
    assert exact_set_correlation(rot, empty, A, 3) == 0.0
