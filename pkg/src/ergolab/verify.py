"""Canned, seed-pinned verification experiments with explicit gates.

Each experiment returns a VerifyResult whose scalars are bit-stable given
the backend; the CLI's `verify-lemma` runs one by name and exits nonzero
on a gate failure.  The quantitative gates mirror the acceptance suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ergolab import correlation, fixedpoint, reduction
from ergolab._common import DEFAULT_SEED
from ergolab.sequences import (
    AlternatingSeq,
    BlockSeq,
    BlockSpec,
    ConstantSeq,
    OrbitSeq,
    adversarial_companion,
    cantor_unpair,
    exp_sequence,
    geometric_schedule,
    greedy_schedule,
)
from ergolab.streams import derive_seed, fair_binary
from ergolab.systems import Bernoulli, CylinderObservable, CylinderSet, Rotation, TrigObservable


@dataclass
class VerifyResult:
    name: str
    passed: bool
    scalars: dict
    gates: list = field(default_factory=list)  # (label, value, bound, ok)

    def report_lines(self):
        out = [f"{self.name}: {'PASS' if self.passed else 'FAIL'}"]
        for label, value, bound, ok in self.gates:
            mark = "ok " if ok else "FAIL"
            out.append(f"  [{mark}] {label}: {value:.6e} vs gate {bound:.6e}")
        return out


# ------------------------------------------------------------- shared pieces

# the eight pinned twist frequencies used by block-sequence gates
PINNED_BETAS = ("1/3", "1/10", "1/4", "37/100", "golden", "1/20", "9/20", "2/7")

# the eight pinned unimodular twists (all != 1)
PINNED_LAMBDAS = ("1/8", "1/3", "1/7", "golden", "sqrt2", "1/20", "73/100", "255/256")


def golden_block_seq() -> BlockSeq:
    spec = BlockSpec(
        alpha=fixedpoint.GOLDEN, observable=TrigObservable(coeffs=((1, 1.0 + 0j),))
    )
    return BlockSeq(spec=spec)


def fair_pm1_system(seed_tag: str = "bernoulli-pm1", root: int = DEFAULT_SEED):
    sys = Bernoulli(stream=fair_binary(derive_seed(root, seed_tag)))
    table = np.asarray([1.0, -1.0], dtype=np.complex128)
    obs = CylinderObservable(window=1, table=table)  # already mean zero
    return sys, obs


def parity_observable(window: int = 4) -> CylinderObservable:
    codes = np.arange(1 << window)
    bits = np.zeros(len(codes), dtype=np.int64)
    for b in range(window):
        bits += (codes >> b) & 1
    table = np.where(bits % 2 == 0, 1.0, -1.0).astype(np.complex128)
    return CylinderObservable(window=window, table=table)  # mean zero by symmetry


def golden_rotation(x0="1/3") -> Rotation:
    return Rotation(alpha=fixedpoint.GOLDEN, x0=fixedpoint.from_any(x0))


# ---------------------------------------------------------------- experiments


def verify_example_2_1(N: int = 10**6) -> VerifyResult:
    """Block-sequence correlations against the pinned frequencies, each under
    the telescoping bound 2/((sqrt(2N)-1)|1-e^{-2 pi i beta}|) + 1e-3."""
    x = golden_block_seq()
    gates = []
    scalars = {}
    for b in PINNED_BETAS:
        beta = fixedpoint.from_any(b)
        y = exp_sequence(beta)
        val = abs(correlation.correlation_at(x, y, 0, N))
        denom = abs(1.0 - np.exp(-2j * math.pi * beta.to_float()))
        bound = 2.0 / ((math.sqrt(2.0 * N) - 1.0) * denom) + 1e-3
        gates.append((f"|corr| at beta={b}", val, bound, val <= bound))
        scalars[f"corr_abs[{b}]"] = val
    return VerifyResult(
        name="example-2-1", passed=all(g[3] for g in gates), scalars=scalars, gates=gates
    )


def verify_perp_compact(N: int = 10**6, h_max: int = 32) -> VerifyResult:
    """Mean-zero shift orbit against the block sequence: all |corr(h)| small."""
    sys, obs = fair_pm1_system()
    x = OrbitSeq(system=sys, observable=obs)
    y = golden_block_seq()
    gates = []
    scalars = {}
    worst = 0.0
    for h in range(h_max + 1):
        val = abs(correlation.correlation_at(x, y, h, N))
        worst = max(worst, val)
        scalars[f"corr_abs[h={h}]"] = val
    gates.append((f"max |corr(h)|, h <= {h_max}", worst, 0.02, worst <= 0.02))
    return VerifyResult(
        name="perp-compact", passed=all(g[3] for g in gates), scalars=scalars, gates=gates
    )


def adversarial_cases(root: int = DEFAULT_SEED):
    sys, obs = fair_pm1_system(root=root)
    return [
        ("const", ConstantSeq(c=1.0 + 0j)),
        ("alternating", AlternatingSeq()),
        ("bernoulli", OrbitSeq(system=sys, observable=obs)),
    ]


def adversarial_identity_check(x, sched) -> tuple:
    """Finite companion lower bound for every pair covered by `sched`.

    Returns (gates, scalars): per covered pair, the realized correlation at
    the designated horizon must be at least the shifted Cesaro-L1 mass
    minus the carried prefix term 2(S(N_q) + h*bound)/N_{q+1}, exactly.
    """
    comp = adversarial_companion(x, sched)
    y = comp.y
    kern_bound = x.bound if x.bound is not None else x.cesaro_l1
    edges = (0,) + tuple(sched.horizons)
    gates = []
    scalars = {}
    for q in range(len(sched.horizons)):
        m, h = cantor_unpair(q)
        n_prev, n_des = edges[q], edges[q + 1]
        lhs = correlation.correlation_at(x, y, h, n_des).real
        xs = np.abs(x.values(1, n_des + h))
        shifted_mass = reduction.kahan_sum_f64(xs[h:]) / n_des
        prefix_mass = reduction.kahan_sum_f64(xs[:n_prev]) if n_prev else 0.0
        rhs = shifted_mass - 2.0 * (prefix_mass + h * kern_bound) / n_des
        ok = lhs >= rhs
        gates.append((f"pair(m={m},h={h}) at N={n_des}", lhs, rhs, ok))
        scalars[f"realized[{m},{h}]"] = lhs
        scalars[f"floor[{m},{h}]"] = rhs
    return gates, scalars


def verify_adversarial_4_2(k_max: int = 9, n_probe: int = 2 * 10**5) -> VerifyResult:
    """Companion lower-bound identity on every pair the greedy schedule
    covers, for the three canonical unit-modulus inputs."""
    gates = []
    scalars = {}
    for label, x in adversarial_cases():
        sched = greedy_schedule(x, k_max=k_max, n_probe=n_probe)
        g, s = adversarial_identity_check(x, sched)
        gates.extend((f"{label}: {lbl}", v, b, ok) for lbl, v, b, ok in g)
        scalars.update({f"{label}.{k}": v for k, v in s.items()})
        scalars[f"{label}.largest_horizon"] = float(sched.largest)
    return VerifyResult(
        name="adversarial-4-2",
        passed=all(g[3] for g in gates),
        scalars=scalars,
        gates=gates,
    )


def verify_converse_3_3(N: int = 10**6) -> VerifyResult:
    """Decomposition residual of the empirical set correlation, plus the
    decoupled tail against mu(A)mu(B)."""
    from ergolab.classify import converse_reconstruction

    sys, _ = fair_pm1_system()
    A = CylinderSet.from_words(2, ["00", "11"], alphabet=2)
    B = CylinderSet.from_words(2, ["01", "10"], alphabet=2)
    rep = converse_reconstruction(sys, A, B, range(0, 9), N)
    gate_res = 1e-10
    gate_tail = 5.0 / math.sqrt(N)
    tail_dev = max(
        abs(e - rep.mu_product) for h, e in zip(rep.h_values, rep.empirical) if h >= 2
    )
    gates = [
        ("max decomposition residual", rep.max_residual, gate_res, rep.max_residual <= gate_res),
        ("max tail |emp - mu(A)mu(B)|, h >= 2", tail_dev, gate_tail, tail_dev <= gate_tail),
    ]
    scalars = {"max_residual": rep.max_residual, "tail_dev": tail_dev}
    scalars.update({f"empirical[h={h}]": e for h, e in zip(rep.h_values, rep.empirical)})
    return VerifyResult(
        name="converse-3-3", passed=all(g[3] for g in gates), scalars=scalars, gates=gates
    )


def verify_eq_26(N: int = 10**6) -> VerifyResult:
    """Estimator form of 'mixing data has vanishing Cesaro average': the
    plain average is controlled by the tail correlation statistic plus the
    schedule instability plus the CLT-scale gate."""
    sys, _ = fair_pm1_system()
    obs = parity_observable(4)
    x = OrbitSeq(system=sys, observable=obs)
    sched = geometric_schedule(N // 64, 2.0, N)
    w = obs.window
    prof = correlation.correlation_profile(x, x, sched, 2 * w)
    ces = abs(correlation.cesaro_average(x, N))
    tail_stat = correlation.strong_mixing_statistic(prof, w, 2 * w)
    inst = float(np.max(prof.instability[w : 2 * w + 1]))
    bound = tail_stat + inst + 5.0 / math.sqrt(N)
    gates = [("|cesaro| vs tail stat + instability + CLT", ces, bound, ces <= bound)]
    scalars = {"cesaro_abs": ces, "tail_stat": tail_stat, "instability": inst}
    return VerifyResult(
        name="eq-26", passed=all(g[3] for g in gates), scalars=scalars, gates=gates
    )


EXPERIMENTS = {
    "example-2-1": verify_example_2_1,
    "perp-compact": verify_perp_compact,
    "adversarial-4-2": verify_adversarial_4_2,
    "converse-3-3": verify_converse_3_3,
    "eq-26": verify_eq_26,
}
