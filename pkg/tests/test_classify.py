"""Mixing defects, empirical correlations, reconstruction, verdicts."""

import math

import pytest

from ergolab import classify
from ergolab.classify import (
    VERDICT_OBSTRUCTION,
    VERDICT_STRONG,
    classify_system,
    converse_reconstruction,
    empirical_set_correlation,
    strong_mixing_defect,
    weak_mixing_defect,
    weak_mixing_defect_trace,
)
from ergolab.streams import fair_binary
from ergolab.systems import (
    Bernoulli,
    CircleSet,
    CylinderSet,
    UnsupportedError,
    exact_measure,
    exact_set_correlation,
)
from ergolab.verify import fair_pm1_system, golden_rotation

A_HALF = CircleSet.from_intervals([(0, "1/2")])


def bernoulli_sets():
    sys_b, _ = fair_pm1_system()
    A = CylinderSet.from_words(2, ["00", "11"], alphabet=2)
    B = CylinderSet.from_words(2, ["01", "10"], alphabet=2)
    return sys_b, A, B


# ------------------------------------------------------------------- defects


def test_bernoulli_weak_defect_zero_beyond_window():
    sys_b = Bernoulli(stream=fair_binary(1))
    A = CylinderSet.from_words(1, ["0"], alphabet=2)
    assert weak_mixing_defect(sys_b, A, A, 50) == 0.0


def test_full_space_defect_zero():
    rot = golden_rotation()
    assert weak_mixing_defect(rot, CircleSet.full(), A_HALF, 200) == 0.0


def test_rotation_weak_defect_eighth():
    # analytic arc-overlap integral gives 1/8 under equidistribution
    rot = golden_rotation()
    d = weak_mixing_defect(rot, A_HALF, A_HALF, 10**5)
    assert abs(d - 0.125) < 1e-3


def test_rotation_strong_defect_revisits():
    rot = golden_rotation()
    d = strong_mixing_defect(rot, A_HALF, A_HALF, 1, 200)
    assert d >= 0.2  # the overlap keeps returning near 1/2 and near 0


def test_bernoulli_strong_defect_exact_zero():
    sys_b, A, B = bernoulli_sets()
    assert strong_mixing_defect(sys_b, A, B, 2, 8) == 0.0


def test_empty_set_strong_defect_zero():
    sys_b, A, _ = bernoulli_sets()
    empty = CylinderSet.from_words(2, [], alphabet=2)
    assert strong_mixing_defect(sys_b, A, empty, 1, 6) == 0.0


def test_weak_defect_le_sup_defect():
    rot = golden_rotation()
    N = 5000
    weak = weak_mixing_defect(rot, A_HALF, A_HALF, N)
    sup = strong_mixing_defect(rot, A_HALF, A_HALF, 1, N)
    assert weak <= sup + 1e-15


def test_trace_final_matches_defect_bitwise():
    rot = golden_rotation()
    trace = weak_mixing_defect_trace(rot, A_HALF, A_HALF, [100, 1000, 10000])
    assert trace[-1][1] == weak_mixing_defect(rot, A_HALF, A_HALF, 10000)


# ------------------------------------------------------ empirical correlation


def test_empirical_full_space_is_one():
    sys_b, _, _ = bernoulli_sets()
    full = CylinderSet.from_words(1, ["0", "1"], alphabet=2)
    assert empirical_set_correlation(sys_b, full, full, 3, 5000) == 1.0


def test_empirical_matches_exact_oracle():
    sys_b, A, B = bernoulli_sets()
    N = 10**5
    for h in (0, 1, 2, 4):
        emp = empirical_set_correlation(sys_b, A, B, h, N)
        exact = exact_set_correlation(sys_b, A, B, h)
        assert abs(emp - exact) <= 5.0 / math.sqrt(N)


def test_empirical_rotation_quarter_shift():
    import ergolab.fixedpoint as fp
    from ergolab.systems import Rotation

    rot = Rotation(alpha=fp.from_any("1/4"), x0=fp.from_any("1/16"))
    emp = empirical_set_correlation(rot, A_HALF, A_HALF, 1, 4000)
    assert abs(emp - 0.25) <= 0.01


# -------------------------------------------------------------- reconstruction


def test_converse_full_space_residual_exact_zero():
    sys_b, _, B = bernoulli_sets()
    full = CylinderSet.from_words(1, ["0", "1"], alphabet=2)
    rep = converse_reconstruction(sys_b, full, B, range(0, 4), 2000)
    assert rep.max_residual == 0.0


def test_converse_residual_and_tail():
    sys_b, A, B = bernoulli_sets()
    N = 10**5
    rep = converse_reconstruction(sys_b, A, B, range(0, 9), N)
    assert rep.max_residual <= 1e-10
    for h, e in zip(rep.h_values, rep.empirical):
        if h >= A.window:
            assert abs(e - rep.mu_product) <= 5.0 / math.sqrt(N)


def test_converse_unsupported_for_product():
    from ergolab.systems import Product

    sys_b, A, B = bernoulli_sets()
    prod = Product(left=sys_b, right=sys_b)
    with pytest.raises(UnsupportedError):
        converse_reconstruction(prod, A, B, range(2), 100)


# ------------------------------------------------------------------- verdicts


def test_rotation_obstruction_via_eigenfunction():
    rot = golden_rotation("1/3")
    rep = classify_system(rot, A_HALF, A_HALF, N=20000, witness_n=1 << 14)
    assert rep.verdict == VERDICT_OBSTRUCTION
    assert rep.witness_name == "eigenfunction-statistic"
    assert rep.witness_value > 0.99


def test_bernoulli_consistent_with_strong_mixing():
    sys_b, A, B = bernoulli_sets()
    rep = classify_system(sys_b, A, B, N=20000, witness_n=1 << 14)
    assert rep.verdict == VERDICT_STRONG
    assert rep.witness_value == 0.0
    assert rep.weak_defect_trace[-1][1] == 0.0


def test_report_json_shape():
    sys_b, A, B = bernoulli_sets()
    rep = classify_system(sys_b, A, B, N=4000, witness_n=1 << 12)
    j = rep.as_json()
    assert set(j) == {
        "weak_defect_trace",
        "strong_defect_trace",
        "verdict",
        "witness",
        "thresholds",
    }
    assert j["weak_defect_trace"][-1][0] == 4000
