"""Asymmetric model: kernels, reconstruction, functional-equation verifiers."""

import numpy as np
import pytest

from jsq import asymmetric, finite, model, oracle
from jsq.asymmetric import (
    AsymKernel,
    DomainViolationError,
    asym_boundaries_oracle,
    asym_functional_residual,
    asym_normalization_check,
    asym_reconstruct,
    g_i,
    smallness_radius,
    stationary_asymmetric,
)
from jsq.kernel import DegenerateRootsError, LinearKernel, g_seq
from jsq.model import AsymmetricParams, JointDist, SymmetricParams, validate_dist

from conftest import max_entry_gap

CASES = [
    AsymmetricParams(lam=0.5, mu1=1.0, mu2=2.0, p1=0.5, capacity=3),
    AsymmetricParams(lam=0.5, mu1=1.0, mu2=2.0, p1=0.3, capacity=2),
    AsymmetricParams(lam=0.8, mu1=1.5, mu2=0.7, p1=0.9, capacity=4),
    AsymmetricParams(lam=1.0, mu1=1.0, mu2=1.0, p1=0.5, capacity=3),  # symmetric
    AsymmetricParams(lam=0.3, mu1=2.0, mu2=0.5, p1=0.1, capacity=6),
]


def test_kernel_initial_values():
    p = CASES[1]
    assert g_i(p, 1, 0) == 0
    assert g_i(p, 1, 1) == pytest.approx(-0.5)  # -mu1/mu2
    assert g_i(p, 2, 1) == pytest.approx(-2.0)  # -mu2/mu1


def test_kernel_own_recursion():
    p = CASES[2]
    for i in (1, 2):
        kern = LinearKernel.asymmetric(p, i)
        seq = kern.seq(10)
        for j in range(9):
            resid = seq[j + 2] - kern.S * seq[j + 1] + kern.P * seq[j]
            assert abs(resid) < 1e-9 * max(1.0, abs(seq[j + 2]))
        xp, xm = kern.xi()
        assert xp * xm == pytest.approx(kern.P, rel=1e-12)
        assert xp + xm == pytest.approx(kern.S, rel=1e-12)


def test_kernels_reduce_to_symmetric():
    p = AsymmetricParams(lam=0.7, mu1=1, mu2=1, p1=0.5, capacity=4)
    gs = g_seq(0.7, 10)
    for i in (1, 2):
        seq = LinearKernel.asymmetric(p, i).seq(10)
        assert seq == pytest.approx(gs, rel=1e-12)


def test_boundaries_oracle_examples():
    # symmetric reduction: row == col == symmetric boundary
    p = CASES[3]
    b = asym_boundaries_oracle(p)
    sym_b = finite.boundary_from_blocking(SymmetricParams(rho=1.0, capacity=3))
    for k in range(4):
        assert b.row[k] == pytest.approx(b.col[k], abs=1e-12)
        assert b.row[k] == pytest.approx(sym_b[k], abs=1e-10)
    # positivity + normalization identity
    p2 = CASES[0]
    b2 = asym_boundaries_oracle(p2, K=2)
    assert all(v > 0 for v in b2.row + b2.col)
    d2 = oracle.stationary_dist(p2, K=2)
    assert asym_normalization_check(p2, d2) < 1e-10
    # K = 0 collapses to the point mass
    b0 = asym_boundaries_oracle(AsymmetricParams(lam=1, mu1=1, mu2=2, capacity=0))
    assert b0.row == [1.0] and b0.col == [1.0]
    with pytest.raises(ValueError):
        asym_boundaries_oracle(CASES[0], K=100)


@pytest.mark.parametrize("p", CASES, ids=lambda p: f"lam{p.lam}-mu{p.mu1}-{p.mu2}-K{p.K}")
def test_reconstruct_matches_oracle(p):
    d = stationary_asymmetric(p)
    orc = oracle.stationary_dist(p)
    assert max_entry_gap(d, orc) < 1e-9
    assert abs(d.total_mass() - 1) < 1e-9
    assert validate_dist(d, 1e-9)


def test_symmetric_reduction_matches_finite_module():
    p = CASES[3]
    d_asym = stationary_asymmetric(p)
    d_sym = finite.stationary_finite(p.as_symmetric())
    assert max_entry_gap(d_asym, d_sym) < 1e-10


def test_k1_corner_formula(oracle_sym):
    p = AsymmetricParams(lam=0.6, mu1=1.2, mu2=0.8, p1=0.4, capacity=1)
    d = stationary_asymmetric(p)
    orc = oracle.stationary_dist(p)
    assert d.prob(1, 1) == pytest.approx(orc.prob(1, 1), abs=1e-12)


def test_diagonal_identity():
    for p in CASES[:3]:
        d = oracle.stationary_dist(p)
        K = p.K
        for k in range(K):
            rhs = (
                p.mu1 * sum(d.prob(k + 1, j) for j in range(k + 1))
                + p.mu2 * sum(d.prob(j, k + 1) for j in range(k + 1))
            ) / (2 * p.lam)
            assert d.prob(k, k) == pytest.approx(rhs, rel=1e-9, abs=1e-13)


def test_balance_residual_of_reconstruction():
    for p in CASES:
        d = stationary_asymmetric(p)
        Q = model.build_generator(p)
        assert oracle.balance_residual(Q, d) < 1e-9 * Q.max_exit_rate()


def test_functional_residuals_on_oracle():
    for p in CASES:
        d = oracle.stationary_dist(p)
        radius = smallness_radius(p)
        xs = [radius * f for f in (0.1, 0.25, 0.4, 0.55, 0.7, 0.85, -0.3, -0.6)]
        xs += [radius * 0.5j, radius * (0.3 + 0.3j)]
        for x in xs:
            r1, r2 = asym_functional_residual(p, d, x)
            assert abs(r1) < 1e-9, (p, x)
            assert abs(r2) < 1e-9, (p, x)


def test_functional_residual_sensitivity():
    p = CASES[1]
    d = oracle.stationary_dist(p)
    entries = {(j, k): d.prob(j, k) for j, k, _ in d.items()}
    entries[(0, 0)] += 1e-3
    bad = JointDist(capacity=p.K, entries=entries)
    x = smallness_radius(p) * 0.5
    r1, r2 = asym_functional_residual(p, bad, x)
    assert max(abs(r1), abs(r2)) > 1e-5


def test_functional_residual_domain_guards():
    p = CASES[0]
    d = oracle.stationary_dist(p)
    with pytest.raises(DomainViolationError):
        asym_functional_residual(p, d, 0.9)
    with pytest.raises(DegenerateRootsError):
        asym_functional_residual(p, d, 0.0)  # double root at the origin


def test_normalization_examples():
    # K = 0: trivially zero
    p0 = AsymmetricParams(lam=0.4, mu1=1.0, mu2=2.0, capacity=0)
    d0 = oracle.stationary_dist(p0)
    assert asym_normalization_check(p0, d0) < 1e-14
    # symmetric reduction collapses to 2 A_K(1) = 2 - 2 rho (1 - pi(K,K))
    p = CASES[3]
    d = oracle.stationary_dist(p)
    a = sum(d.prob(0, k) for k in range(p.K + 1))
    want = 1 - p.lam * (1 - d.prob(p.K, p.K))
    assert a == pytest.approx(want, abs=1e-12)
    assert asym_normalization_check(p, d) < 1e-10


def test_reconstruct_rejects_wrong_boundary_length():
    p = CASES[0]
    b = asym_boundaries_oracle(p)
    with pytest.raises(ValueError):
        asym_reconstruct(p, b, K=5)


def test_kernel_table_bundle():
    p = CASES[0]
    kern = AsymKernel.build(p, 4, 8)
    assert kern.t1.at(1, 1) == pytest.approx(-p.mu1 / p.mu2)
    assert kern.t2.at(1, 1) == pytest.approx(-p.mu2 / p.mu1)
    assert kern.t1.at(2, 1) == 0.0
