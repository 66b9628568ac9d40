"""Asymmetric model: different service rates, two boundary sequences.

The reconstruction mirrors the symmetric one but runs two kernels: g_1
(built on mu2's quadratic) weights the row boundary pi(k, 0), g_2 the
column boundary pi(0, k).  No closed-form blocking probability exists here;
boundary values are read off the dense oracle, and the functional equations
are implemented as residual verifiers of a candidate distribution.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import oracle
from .kernel import ConvTable, DegenerateRootsError, LinearKernel, conv_table, p_x_roots
from .model import AsymmetricParams, JointDist


class DomainViolationError(ValueError):
    """x outside the conservative smallness disk of the functional equations."""


@dataclass
class AsymKernel:
    """The pair of kernels and their power tables for one parameter set."""

    params: AsymmetricParams
    k1: LinearKernel
    k2: LinearKernel
    t1: ConvTable
    t2: ConvTable

    @classmethod
    def build(cls, params: AsymmetricParams, kmax: int, jmax: int) -> "AsymKernel":
        k1 = LinearKernel.asymmetric(params, 1)
        k2 = LinearKernel.asymmetric(params, 2)
        return cls(
            params=params,
            k1=k1,
            k2=k2,
            t1=conv_table(k1, kmax, jmax, check=False),
            t2=conv_table(k2, kmax, jmax, check=False),
        )


def g_i(params: AsymmetricParams, i: int, j: int):
    """Kernel value g_i(j); g_i(1) = -mu_i/mu_{3-i}."""
    return LinearKernel.asymmetric(params, i).seq(j)[j]


@dataclass
class AsymBoundaries:
    """Row boundary pi(k,0) and column boundary pi(0,k), k = 0..K."""

    params: AsymmetricParams
    row: list
    col: list

    def a1_eval(self, y):
        acc = 0 * y
        for c in reversed(self.row):
            acc = acc * y + float(c)
        return acc

    def a2_eval(self, y):
        acc = 0 * y
        for c in reversed(self.col):
            acc = acc * y + float(c)
        return acc


ORACLE_CAP = 60


def asym_boundaries_oracle(p: AsymmetricParams, K: int | None = None) -> AsymBoundaries:
    """Boundary sequences read off the dense stationary solve."""
    if K is None:
        K = p.K
    if K > ORACLE_CAP:
        raise ValueError(f"oracle boundary extraction capped at K={ORACLE_CAP}")
    dist = oracle.stationary_dist(p, K)
    row = [dist.prob(k, 0) for k in range(K + 1)]
    col = [dist.prob(0, k) for k in range(K + 1)]
    return AsymBoundaries(params=p, row=row, col=col)


def asym_reconstruct(p: AsymmetricParams, b: AsymBoundaries, K: int | None = None) -> JointDist:
    """Fill the lattice from the two boundaries.

    pi(k,j), j<k:  (mu2/mu1) sum_l pi(l,0) (g1^{*(l-k+1)}(j) - g1^{*(l-k+1)}(j+1))
    pi(j,k), j<k:  (mu1/mu2) sum_l pi(0,l) (g2^{*(l-k+1)}(j) - g2^{*(l-k+1)}(j+1))
    pi(k,k), k<K:  -(1/2 lam) sum_l ( mu2 pi(l,0) g1^{*(l-k)}(k+1)
                                      + mu1 pi(0,l) g2^{*(l-k)}(k+1) )
    pi(K,K):       (2 lam/(mu1+mu2)) ( (mu2/mu1) pi(K,0) (g1(K-1) - g1(K))
                                       + (mu1/mu2) pi(0,K) (g2(K-1) - g2(K)) ).
    """
    if K is None:
        K = p.K
    if len(b.row) != K + 1 or len(b.col) != K + 1:
        raise ValueError("boundary length must be K+1")
    mu1, mu2, lam = p.mu1, p.mu2, p.lam
    kern = AsymKernel.build(p, max(K + 1, 1), K + 3)
    t1, t2 = kern.t1, kern.t2
    entries = {}
    for k in range(K + 1):
        for j in range(k):
            s1 = 0.0
            s2 = 0.0
            for l in range(k, min(K, j + k) + 1):
                m = l - k + 1
                s1 += float(b.row[l]) * (t1.at(m, j) - t1.at(m, j + 1))
                s2 += float(b.col[l]) * (t2.at(m, j) - t2.at(m, j + 1))
            entries[(k, j)] = mu2 / mu1 * s1
            entries[(j, k)] = mu1 / mu2 * s2
    for k in range(K):
        s = 0.0
        for l in range(k + 1, min(K, 2 * k + 1) + 1):
            s += mu2 * float(b.row[l]) * t1.at(l - k, k + 1)
            s += mu1 * float(b.col[l]) * t2.at(l - k, k + 1)
        entries[(k, k)] = -s / (2 * lam)
    g1 = t1.power(1)
    g2 = t2.power(1)
    if K == 0:
        entries[(0, 0)] = float(b.row[0])
    else:
        entries[(K, K)] = (
            2
            * lam
            / (mu1 + mu2)
            * (
                mu2 / mu1 * float(b.row[K]) * (g1[K - 1] - g1[K])
                + mu1 / mu2 * float(b.col[K]) * (g2[K - 1] - g2[K])
            )
        )
    dist = JointDist(capacity=K, entries=entries, symmetric=False)
    worst = min(entries.values())
    if worst < -1e-9:
        raise ArithmeticError(f"negative mass {worst} in asymmetric reconstruction")
    return dist


def stationary_asymmetric(p: AsymmetricParams, K: int | None = None) -> JointDist:
    """Oracle boundaries + kernel reconstruction (finite capacity)."""
    b = asym_boundaries_oracle(p, K)
    return asym_reconstruct(p, b, K)


def smallness_radius(p: AsymmetricParams) -> float:
    """Conservative |x| bound inside which the functional equations are used."""
    lam = float(p.lam)
    return 0.2 * min(1.0, float(p.mu1) / (2 * lam), float(p.mu2) / (2 * lam))


def asym_functional_residual(p: AsymmetricParams, d: JointDist, x) -> tuple:
    """Residuals of the two boundary functional equations at x.

    Both vanish on a stationary distribution.  Uses the root pairs (y1, z1)
    of the mu2-quadratic and (y2, z2) of the mu1-quadratic; signals
    degenerate discriminants, and rejects x outside the smallness disk.
    """
    if abs(x) > smallness_radius(p):
        raise DomainViolationError(
            f"|x| = {abs(x)} above conservative radius {smallness_radius(p)}"
        )
    K = d.capacity
    mu1, mu2, lam, p1 = p.mu1, p.mu2, p.lam, p.p1
    y1, z1 = p_x_roots(p, 1, x)
    y2, z2 = p_x_roots(p, 2, x)
    scale = max(1.0, abs(y1), abs(y2))
    if abs(y1 - z1) < 1e-12 * scale or abs(y2 - z2) < 1e-12 * scale:
        raise DegenerateRootsError(f"coincident roots at x={x}")
    row = [float(d.prob(k, 0)) for k in range(K + 1)]
    col = [float(d.prob(0, k)) for k in range(K + 1)]
    a1 = lambda y: sum(c * y ** k for k, c in enumerate(row))
    a2 = lambda y: sum(c * y ** k for k, c in enumerate(col))
    da1 = (a1(y1) - a1(z1)) / (y1 - z1)
    da2 = (a2(y2) - a2(z2)) / (y2 - z2)
    mixed = mu1 * da1 + mu2 * da2
    pi_kk = float(d.prob(K, K))
    xc = complex(x)
    r1 = (
        mu2 * ((y1 - xc) * a1(y1) - (z1 - xc) * a1(z1)) / (y1 - z1)
        - mu2 * xc ** K * pi_kk
        - (mu2 + 2 * p1 * lam * xc) / (2 * lam) * mixed
    )
    r2 = (
        mu1 * ((y2 - xc) * a2(y2) - (z2 - xc) * a2(z2)) / (y2 - z2)
        - mu1 * xc ** K * pi_kk
        - (mu1 + 2 * (1 - p1) * lam * xc) / (2 * lam) * mixed
    )
    return r1, r2


def asym_normalization_check(p: AsymmetricParams, d: JointDist) -> float:
    """| mu2 A1(1) + mu1 A2(1) - (mu1 + mu2) + 2 lam (1 - pi(K,K)) |."""
    K = d.capacity
    a1 = sum(float(d.prob(k, 0)) for k in range(K + 1))
    a2 = sum(float(d.prob(0, k)) for k in range(K + 1))
    pi_kk = float(d.prob(K, K))
    return abs(
        float(p.mu2) * a1
        + float(p.mu1) * a2
        - (float(p.mu1) + float(p.mu2))
        + 2 * float(p.lam) * (1 - pi_kk)
    )
