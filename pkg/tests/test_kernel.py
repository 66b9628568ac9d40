"""Kernel values, convolution powers, and the algebraic identities they obey."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jsq import kernel
from jsq.kernel import (
    ConvTable,
    DegenerateRootsError,
    LinearKernel,
    QuadExt,
    conv,
    conv_table,
    delta0,
    g,
    g_pow,
    g_seq,
    s_n_closed,
    s_n_sum,
    xi_pair,
)
from jsq.model import AsymmetricParams, SymmetricParams

RHOS = (0.1, 0.5, 1.0, 1.5, 2.0, 3.0)


@given(rho=st.floats(0.05, 5.0))
@settings(max_examples=50, deadline=None)
def test_g_initial_values(rho):
    assert g(rho, 0) == 0.0
    assert g(rho, 1) == -1.0


def test_g_small_values_rho1():
    assert g(1.0, 2) == pytest.approx(-4.0)
    assert g(1.0, 3) == pytest.approx(-14.0)
    assert g_seq(1.0, 3) == pytest.approx([0.0, -1.0, -4.0, -14.0])


def test_g_closed_form_matches_recursion():
    for rho in RHOS:
        seq = g_seq(rho, 12)
        for j in range(13):
            assert g(rho, j) == pytest.approx(seq[j], rel=1e-12, abs=1e-12)


def test_g_exact_backend():
    r = Fraction(1, 2)
    assert g(r, 5) == LinearKernel.symmetric(r).seq(5)[5]
    assert isinstance(g(r, 5), Fraction)


def test_xi_symmetric_functions():
    for rho in RHOS:
        xp, xm = xi_pair(rho)
        assert xp * xm == pytest.approx(2 * rho, rel=1e-12)
        assert xp + xm == pytest.approx(2 * (1 + rho), rel=1e-12)


def test_quadext_arithmetic():
    d = Fraction(5, 4)
    x = QuadExt(Fraction(2), Fraction(3), d)
    y = QuadExt(Fraction(2), Fraction(-3), d)
    assert (x * y).rational() == 4 - d * 9
    assert (x / x).rational() == 1
    assert (x ** 3).a == x.a ** 3 + 3 * x.a * d * x.b ** 2
    with pytest.raises(ValueError):
        x.rational()


def test_conv_identity_element():
    h = [3.0, -1.0, 2.5, 0.0, 7.0]
    assert conv(delta0(4), h) == h


def test_conv_gg_examples():
    gs = g_seq(1.0, 4)
    gg = conv(gs, gs)
    assert gg[2] == pytest.approx(1.0)  # g(1)^2
    assert gg[3] == pytest.approx(8.0)  # 2 g(1) g(2)


@given(
    f=st.lists(st.floats(-3, 3), min_size=2, max_size=8),
    h=st.lists(st.floats(-3, 3), min_size=2, max_size=8),
)
@settings(max_examples=60, deadline=None)
def test_translation_identity(f, h):
    # tau(f*h) = (tau f)*h + f(0) tau h on the common window
    n = min(len(f), len(h)) - 1
    full = conv(f, h)
    tau_fh = full[1:]
    part = conv(f[1:], h)
    for i in range(n - 1):
        want = part[i] + f[0] * h[i + 1]
        assert tau_fh[i] == pytest.approx(want, rel=1e-9, abs=1e-9)


def test_gpow_rejects_k0():
    with pytest.raises(ValueError):
        g_pow(1.0, 0, 5)


def test_gpow_support_property():
    for rho in RHOS:
        for k in range(1, 13):
            row = g_pow(rho, k, k + 3)
            assert all(v == 0 for v in row[:k]), (rho, k)
            assert row[k] != 0


def test_gpow_examples():
    assert g_pow(0.7, 2, 3)[1] == 0.0
    row = g_pow(1.0, 2, 3)
    assert row[2] == pytest.approx(1.0)
    assert row[3] == pytest.approx(8.0)


def test_gpow_three_way_agreement_float():
    for rho in (0.5, 1.0, 2.0):
        for k in (1, 2, 4, 8):
            a = g_pow(rho, k, 24, method="conv")
            b = g_pow(rho, k, 24, method="binomial")
            c = g_pow(rho, k, 24, method="shift")
            for j in range(25):
                scale = max(1.0, abs(a[j]))
                assert abs(a[j] - b[j]) < 1e-9 * scale, (rho, k, j)
                assert abs(a[j] - c[j]) < 1e-9 * scale, (rho, k, j)


def test_gpow_three_way_agreement_exact():
    for rho in (Fraction(1, 2), Fraction(2)):
        for k in (1, 2, 3, 5):
            a = g_pow(rho, k, 12, method="conv")
            b = g_pow(rho, k, 12, method="binomial")
            c = g_pow(rho, k, 12, method="shift")
            assert a == b == c
            assert all(isinstance(v, Fraction) for v in a)


def test_fundamental_recursion():
    for rho in RHOS:
        gs = g_seq(rho, 20)
        for j in range(19 - 1):
            resid = gs[j + 2] - 2 * (1 + rho) * gs[j + 1] + 2 * rho * gs[j]
            assert abs(resid) < 1e-9 * max(1.0, abs(gs[j + 2]))


def test_fundamental_ter_via_table():
    # conv_table(check=True) enforces the column recursion; also spot-check
    for rho in (0.5, 1.0, 2.0):
        t = conv_table(rho, 10, 16, check=True)
        for l in range(1, 10):
            for k in range(14):
                lhs = (
                    t.at(l + 1, k + 2)
                    - 2 * (1 + rho) * t.at(l + 1, k + 1)
                    + 2 * rho * t.at(l + 1, k)
                )
                rhs = -t.at(l, k + 1)
                assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


def test_table_check_catches_corruption():
    t = conv_table(1.0, 4, 8, check=False)
    t.values[2][5] += 0.5
    with pytest.raises(ArithmeticError):
        kernel._check_column_recursion(t.kernel, t.values, exact=False)


def test_table_exact_backend():
    t = conv_table(Fraction(1, 2), 6, 12, check=True)
    assert t.exact
    assert t.at(2, 2) == Fraction(1)
    with pytest.raises(ValueError):
        t.power(7)


# -- S_n sums -----------------------------------------------------------------

SYM = SymmetricParams(rho=1.0, capacity=4)
ASYM = AsymmetricParams(lam=0.5, mu1=1.0, mu2=2.0, p1=0.3, capacity=4)


def test_s0_vanishes():
    assert s_n_closed(SYM, 1, 0.1, 0) == 0
    assert s_n_sum(SYM, 1, 0.1, 0) == 0


def test_s1_linear_term():
    assert s_n_closed(ASYM, 1, 0.13, 1) == pytest.approx(-(1.0 / 2.0) * 0.13)
    assert s_n_closed(ASYM, 2, 0.13, 1) == pytest.approx(-(2.0 / 1.0) * 0.13)
    assert s_n_sum(ASYM, 1, 0.13, 1) == pytest.approx(-(1.0 / 2.0) * 0.13)


@pytest.mark.parametrize("params,i", [(SYM, 1), (ASYM, 1), (ASYM, 2)])
def test_sn_closed_equals_sum(params, i):
    for x in (0.1, 0.05 + 0.1j, -0.07):
        for n in range(9):
            a = s_n_closed(params, i, x, n)
            b = s_n_sum(params, i, x, n)
            assert abs(a - b) < 1e-12 * max(1.0, abs(a)), (x, n)


def test_sn_degenerate_discriminant():
    # symmetric roots coincide where x^2 (1+rho^2) = x
    rho = 1.0
    x = 1 / (1 + rho * rho)
    with pytest.raises(DegenerateRootsError):
        s_n_closed(SymmetricParams(rho=rho, capacity=3), 1, x, 3)
