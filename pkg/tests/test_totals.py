"""Total-occupancy distribution, mean bounds, comparison formulas."""

import math
from fractions import Fraction

import pytest

from jsq import blocking, infinite, totals
from jsq.model import SymmetricParams
from jsq.totals import (
    mean_total,
    mean_total_bounds,
    mean_total_bounds_infinite,
    mm1_2k_blocking,
    mm1k_blocking,
    mm2_2k_blocking,
    mm2_2k_mean,
    sup_gap_brackets,
    slq_idle_probability,
    total_dist,
    uniform_gap_report,
)

from conftest import RHO_GRID


def P(rho, K):
    return SymmetricParams(rho=rho, capacity=K)


def test_total_dist_k1_rho1():
    td = total_dist(P(1.0, 1))
    assert td.masses == pytest.approx([0.2, 0.4, 0.4], abs=1e-14)
    assert td.mean() == pytest.approx(1.2)
    assert td.total() == pytest.approx(1.0)


def test_total_dist_top_state():
    for rho, K in ((0.5, 3), (2.0, 4)):
        td = total_dist(P(rho, K))
        assert td.masses[2 * K] == pytest.approx(
            blocking.blocking_probability(P(rho, K)), rel=1e-11
        )


def test_total_dist_matches_aggregated_oracle(oracle_sym):
    for rho, K in ((0.7, 4), (1.0, 3), (1.5, 5)):
        td = total_dist(P(rho, K))
        d = oracle_sym(rho, K)
        for n in range(2 * K + 1):
            want = sum(
                d.prob(j, n - j) for j in range(n + 1) if 0 <= n - j <= K and j <= K
            )
            assert abs(td.masses[n] - want) < 1e-10, (rho, K, n)


def test_geometric_envelope():
    for rho, K in ((0.5, 4), (1.0, 5), (3.0, 3)):
        td = total_dist(P(rho, K))
        for n in range(2 * K + 1):
            env = td.geometric_envelope(n)
            if n >= K:
                assert td.masses[n] == pytest.approx(env, rel=1e-10)
            else:
                assert td.masses[n] <= env * (1 + 1e-12)


def test_mean_total_exact_backend():
    td = total_dist(P(Fraction(1), 1))
    assert td.mean() == Fraction(6, 5)


def test_mean_bounds_rho1():
    lo, hi = mean_total_bounds(P(1.0, 5))
    assert lo == pytest.approx(55 / 10.5)
    assert hi == pytest.approx(55 / (10 + 2 ** -5))
    lo1, hi1 = mean_total_bounds(P(1.0, 1))
    assert lo1 == pytest.approx(1.2)
    assert hi1 == pytest.approx(1.2)
    assert mean_total(P(1.0, 1)) == pytest.approx(1.2)


def test_mean_bounds_sandwich():
    for rho in RHO_GRID:
        for K in (1, 2, 3, 5, 8):
            p = P(rho, K)
            lo, hi = mean_total_bounds(p)
            ex = float(mean_total(p))
            assert lo <= ex * (1 + 1e-11) + 1e-12, (rho, K)
            assert ex <= hi * (1 + 1e-11) + 1e-12, (rho, K)


def test_mean_bounds_continuous_at_rho1():
    for K in (1, 3, 6):
        lo0, hi0 = mean_total_bounds(P(1.0, K))
        for eps in (1e-6, -1e-6):
            lo, hi = mean_total_bounds(P(1.0 + eps, K))
            assert abs(lo - lo0) < 1e-4
            assert abs(hi - hi0) < 1e-4


def test_mean_bounds_gap_large_rho():
    K = 4
    ratios = []
    for rho in (5.0, 50.0):
        lo, hi = mean_total_bounds(P(rho, K))
        ratios.append((hi - lo) / (4 * K * (2 * rho) ** (-K - 1)))
    assert abs(ratios[1] - 1) < abs(ratios[0] - 1)
    assert ratios[1] == pytest.approx(1.0, abs=0.05)


def test_mean_bounds_large_K_no_overflow():
    # rho^{-2K} leaves float range; bounds must converge to the infinite ones
    lo, hi = mean_total_bounds(P(0.5, 2000))
    lo_inf, hi_inf = mean_total_bounds_infinite(0.5)
    assert lo == pytest.approx(lo_inf, rel=1e-12)
    assert hi == pytest.approx(hi_inf, rel=1e-12)


def test_mean_bounds_infinite():
    lo, hi = mean_total_bounds_infinite(0.5)
    assert lo == pytest.approx(4 / 3)
    assert hi == pytest.approx(1.5)
    with pytest.raises(ValueError):
        mean_total_bounds_infinite(1.0)
    for rho in (1e-3, 1e-4):
        lo, hi = mean_total_bounds_infinite(rho)
        assert lo == pytest.approx(2 * rho, rel=2e-3)
        assert hi == pytest.approx(2 * rho, rel=2e-3)


def test_windowed_infinite_mean_in_bounds():
    d = infinite.stationary_infinite(0.5, window=40)
    mean = sum((j + k) * float(p) for j, k, p in d.items())
    lo, hi = mean_total_bounds_infinite(0.5)
    assert lo <= mean <= hi


def test_comparison_blocking_examples():
    assert mm1k_blocking(1.0, 1) == pytest.approx(0.5)
    assert mm1k_blocking(1.0, 7) == pytest.approx(1 / 8)
    assert mm2_2k_blocking(1.0, 1) == pytest.approx(0.4)
    assert mm2_2k_blocking(2.0, 2) == pytest.approx(2 * 16 / (2 * 31 - 1))
    assert mm1k_blocking(2.0, 2) == pytest.approx(4 / 7)
    assert mm1_2k_blocking(1.0, 2) == pytest.approx(1 / 5)
    assert mm1k_blocking(Fraction(2), 2) == Fraction(4, 7)


def test_mm2_mean_against_direct_sum():
    rho, K = 0.8, 3
    nu0 = 1 / (2 * sum(rho ** k for k in range(2 * K + 1)) - 1)
    masses = [nu0] + [2 * nu0 * rho ** n for n in range(1, 2 * K + 1)]
    assert sum(masses) == pytest.approx(1.0)
    assert mm2_2k_mean(rho, K) == pytest.approx(
        sum(n * m for n, m in enumerate(masses))
    )


def test_order_chain_full_grid():
    for rho in (0.1, 0.3, 0.5, 0.9, 1.0, 1.2, 1.5, 2.0, 2.5, 3.0):
        for K in range(1, 11):
            pi = blocking.blocking_probability(P(rho, K))
            chain = (
                mm1_2k_blocking(rho, K),
                mm2_2k_blocking(rho, K),
                pi,
                mm1k_blocking(rho, K),
            )
            for a, b in zip(chain, chain[1:]):
                assert a <= b * (1 + 1e-12) + 1e-300, (rho, K, chain)


def test_slq_duality():
    assert slq_idle_probability(P(1.0, 1)) == pytest.approx(0.4)
    assert slq_idle_probability(P(0.4, 0)) == 1.0
    assert slq_idle_probability(P(2.0, 3)) == blocking.blocking_probability(P(2.0, 3))


def test_gap_report_k1_mm2_gap_zero():
    rep = uniform_gap_report(1, rho_grid=[0.1 * i for i in range(1, 40)])
    assert abs(rep.sup_mm2_gap) < 1e-14
    lo, hi = rep.mm2_bracket
    assert lo <= max(rep.sup_mm2_gap, 0.0) <= hi


def test_gap_report_k5_within_brackets():
    rep = uniform_gap_report(5)
    lo, hi = rep.mm1k_bracket
    assert lo <= rep.sup_mm1k_gap <= hi
    lo2, hi2 = rep.mm2_bracket
    assert lo2 <= rep.sup_mm2_gap <= hi2
    assert rep.sup_mm2_gap <= 2 / 25


def test_bracket_formulas():
    (l1, u1), (l2, u2) = sup_gap_brackets(5)
    assert l1 == pytest.approx((5 + 2 ** -5 - 1) / (6 * (10 + 2 ** -5)))
    assert u1 == pytest.approx(1 / 6)
    assert l2 == pytest.approx((0.5 - 2 ** -5) / (10.5 * (10 + 2 ** -5)))
    assert u2 == pytest.approx(2 / 25)


def test_gap_report_ratio_columns():
    rep = uniform_gap_report(5, rho_grid=[0.2, 1.0, 1.9])
    for rho, pi, r1, r2 in rep.rows:
        assert r1 == pytest.approx(mm1k_blocking(rho, 5) / pi)
        assert r2 == pytest.approx(mm2_2k_blocking(rho, 5) / pi)
    text = rep.to_csv()
    assert text.splitlines()[0] == "rho,jsq_blocking,mm1k_ratio,mm2_2k_ratio"


def test_mm2_ratio_approaches_one_toward_rho2():
    for K in (5, 30):
        rep = uniform_gap_report(K, rho_grid=[0.5, 1.0, 1.5, 1.9, 1.99])
        col = [r[3] for r in rep.rows]
        assert abs(col[-1] - 1) < 0.01
        assert abs(col[-1] - 1) <= abs(col[-3] - 1)
