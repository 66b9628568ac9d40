"""Full stationary distribution of the symmetric finite-K model.

Reconstruction runs in two stages: the boundary probabilities pi_K(0,l)
come out of a triangular back-substitution seeded by the blocking
probability, then every other entry is a finite sum of boundary values
weighted by differences of convolution powers of the kernel g.
Normalization is never re-imposed: unit mass is a verified outcome.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction

from . import blocking, oracle
from ._num import is_exact
from .kernel import ConvTable, LinearKernel, conv_table
from .model import JointDist, SymmetricParams


class PivotDegenerateError(ArithmeticError):
    """The back-substitution pivot g(k+2) - (2+rho) g(k+1) vanished."""


class NegativeMassError(ArithmeticError):
    """Reconstruction produced mass below -1e-9: numerical breakdown."""


@dataclass
class BoundarySeq:
    """Boundary probabilities pi(0, l), l = 0..len-1, for one rho."""

    rho: object
    values: list

    def __len__(self):
        return len(self.values)

    def __getitem__(self, l):
        return self.values[l]

    def a_eval(self, y):
        """Boundary generating function A(y) = sum_l pi(0,l) y^l."""
        acc = 0 * y
        for c in reversed(self.values):
            acc = acc * y + c
        return acc


def _table_for(p: SymmetricParams, K: int) -> ConvTable:
    kern = LinearKernel.symmetric(p.rho)
    return conv_table(kern, max(K + 1, 1), K + 3, check=False)


def _g_steps(rho, g: list, count: int) -> list:
    """Differences g(k+1) - g(k) for k = 0..count-1, cancellation-free.

    The mixed recursion E(k) = (1+2 rho) E(k-1) + g(k-1) only ever adds
    same-signed terms, unlike subtracting two nearly equal kernel values.
    """
    one = Fraction(1) if is_exact(rho) else 1.0
    E = [-one]
    for k in range(1, count):
        E.append((1 + 2 * rho) * E[k - 1] + g[k - 1])
    return E


def boundary_from_blocking(
    p: SymmetricParams, table: ConvTable | None = None
) -> BoundarySeq:
    """pi_K(0, l) for l = 0..K.

    The top value is pi_K(K,K) / (2 rho (g(K-1) - g(K))); the rest follow by
    back-substitution, one unknown per level: the pivot multiplying
    pi_K(0,k) is g(k+2) - (2+rho) g(k+1), which equals -rho at k = 0 and
    2 rho^2 (g(k) - g(k-1)) for k >= 1.  The pivot is evaluated through the
    latter form: the direct difference loses O(rho^2) relative precision in
    light traffic.
    """
    K = p.K
    rho = p.rho
    one = Fraction(1) if is_exact(rho) else 1.0
    if K == 0:
        return BoundarySeq(rho=rho, values=[one])
    if table is None:
        table = _table_for(p, K)
    g = table.power(1)
    steps = _g_steps(rho, g, K + 1)  # steps[k] = g(k+1) - g(k)
    pi_kk = blocking.blocking_probability(p)
    vals = [0 * one] * (K + 1)
    vals[K] = pi_kk / (-2 * rho * steps[K - 1])
    for k in range(K - 1, -1, -1):
        acc = 0 * one
        for l in range(k + 1, min(K, 2 * k + 1) + 1):
            # beyond l = 2k+1 both table entries are under the support cutoff
            m = l - k + 1
            coeff = table.at(m, k + 2) - (2 + rho) * table.at(m, k + 1)
            acc += vals[l] * coeff
        pivot = -rho * one if k == 0 else 2 * rho * rho * steps[k - 1]
        if pivot == 0 or (
            not is_exact(rho) and abs(pivot) < 1e-290 * max(1.0, abs(float(acc)))
        ):
            raise PivotDegenerateError(f"pivot ~ 0 at level k={k}")
        vals[k] = -acc / pivot
    return BoundarySeq(rho=rho, values=vals)


def reconstruct(
    p: SymmetricParams, b: BoundarySeq, table: ConvTable | None = None
) -> JointDist:
    """Fill the full lattice from the boundary values.

    Off-diagonal (j < k):  sum_{l=k}^{K} pi(0,l) (g^{*(l-k+1)}(j) - g^{*(l-k+1)}(j+1));
    diagonal (k < K):      -(1/rho) sum_{l=k+1}^{K} pi(0,l) g^{*(l-k)}(k+1);
    corner (K,K):          the closed-form blocking probability.
    Terms with l > j+k vanish identically (support of g^{*m}).
    """
    K = p.K
    if len(b.values) != K + 1:
        raise ValueError("boundary length must be K+1")
    rho = p.rho
    if table is None:
        table = _table_for(p, K)
    entries = {}
    for k in range(K + 1):
        for j in range(k):
            acc = 0 * b[0]
            for l in range(k, min(K, j + k) + 1):
                m = l - k + 1
                acc += b[l] * (table.at(m, j) - table.at(m, j + 1))
            entries[(j, k)] = acc
    for k in range(K):
        acc = 0 * b[0]
        for l in range(k + 1, min(K, 2 * k + 1) + 1):
            acc += b[l] * table.at(l - k, k + 1)
        entries[(k, k)] = -acc / rho
    entries[(K, K)] = blocking.blocking_probability(p)
    dist = JointDist(capacity=K, entries=entries, symmetric=True)
    worst = min((float(v) for v in entries.values()), default=0.0)
    if worst < -1e-9:
        raise NegativeMassError(f"negative mass {worst} in reconstruction")
    return dist


def stationary_finite(p: SymmetricParams, exact: bool | None = None) -> JointDist:
    """Boundary recursion then triangular reconstruction.

    exact=True runs the whole pipeline in rational arithmetic (rho is taken
    at its exact value).  On pivot degeneracy the dense oracle takes over so
    the operation stays total.
    """
    rho = p.rho
    if exact is None:
        exact = is_exact(rho)
    if exact and not is_exact(rho):
        p = SymmetricParams(rho=Fraction(rho), capacity=p.capacity)
    try:
        table = _table_for(p, p.K)
        return reconstruct(p, boundary_from_blocking(p, table), table)
    except PivotDegenerateError:
        return oracle.stationary_dist(p)


# ---------------------------------------------------------------------------
# functional-equation residuals (verification surface)


def p_x_roots(rho, x):
    """Roots of Y^2 - 2(1+rho) x Y + (1 + 2 rho x) x, as complex numbers."""
    x = complex(x)
    disc = cmath.sqrt(x * x * (1 + rho * rho) - x)
    return (1 + rho) * x + disc, (1 + rho) * x - disc


def phi(rho, y, z):
    """phi(y, z) = rho y - z - (1+rho)/rho."""
    return rho * y - z - (1 + rho) / rho


class DoubleRootError(ArithmeticError):
    pass


def a_k_eval(d: JointDist, y):
    """A_K(y) = sum_k pi(0,k) y^k from a candidate distribution."""
    acc = 0 * y
    for k in range(d.capacity, -1, -1):
        acc = acc * y + float(d.prob(0, k))
    return acc


def b_k_eval(d: JointDist, x):
    """B_K(x) = sum_j pi(j,j) x^j."""
    acc = 0 * x
    for j in range(d.capacity, -1, -1):
        acc = acc * x + float(d.prob(j, j))
    return acc


def f_k_eval(d: JointDist, x, y):
    """F_K(x,y) = sum_{j<=k} pi(j,k) x^j y^{k-j}."""
    acc = 0j
    for k in range(d.capacity + 1):
        for j in range(k + 1):
            acc += float(d.prob(j, k)) * x ** j * y ** (k - j)
    return acc


def functional_residual_AK(p: SymmetricParams, d: JointDist, x) -> complex:
    """Residual of the boundary functional equation at x:

        phi(y,z) A_K(y) - phi(z,y) A_K(z) - (1+rho) x^K (y-z) pi_K(K,K)

    with y, z the roots of p_x.  Zero (to rounding) iff d is stationary.
    """
    rho, K = p.rho, p.K
    y, z = p_x_roots(rho, x)
    if abs(y - z) < 1e-12 * max(1.0, abs(y)):
        raise DoubleRootError(f"double root at x={x}; residual trivially 0")
    pi_kk = float(d.prob(K, K))
    return (
        phi(rho, y, z) * a_k_eval(d, y)
        - phi(rho, z, y) * a_k_eval(d, z)
        - (1 + rho) * complex(x) ** K * (y - z) * pi_kk
    )


def fk_residual(p: SymmetricParams, d: JointDist, x, y) -> complex:
    """Bivariate residual of the kernel relation defining F_K:

        p_x(y) F_K(x,y) - [ y(y-x) A_K(y)
                            - (rho y^2 + (1+rho) y - 1 - 2 rho x) x B_K(x)
                            + rho x^{K+1} y (y-1) pi_K(K,K) ].
    """
    rho, K = p.rho, p.K
    x, y = complex(x), complex(y)
    lhs = (y * y - 2 * (1 + rho) * x * y + (1 + 2 * rho * x) * x) * f_k_eval(d, x, y)
    rhs = (
        y * (y - x) * a_k_eval(d, y)
        - (rho * y * y + (1 + rho) * y - 1 - 2 * rho * x) * x * b_k_eval(d, x)
        + rho * x ** (K + 1) * y * (y - 1) * float(d.prob(K, K))
    )
    return lhs - rhs


# ---------------------------------------------------------------------------
# alternative route to the boundary: iterate the functional equation along
# the v-chain.  Validation path only; the back-substitution is the default.


def a_values_via_chain(p: SymmetricParams, count: int | None = None) -> list:
    """Values (v_n, A_K(v_n)) for n = 1..count obtained without the boundary.

    Start from A_K(v_1) = A_K(1/rho) = rho^{-2K} pi_K(K,K) and iterate the
    functional equation along consecutive chain pairs (v_n, v_{n+1}), which
    are roots of the quadratic at x = (v_n + v_{n+1}) / (2 (1 + rho)).
    Exact when rho is a Fraction.
    """
    rho, K = p.rho, p.K
    if count is None:
        count = K + 1
    one = Fraction(1) if is_exact(rho) else 1.0
    pi_kk = blocking.blocking_probability(p)
    v_prev, v_cur = (2 + rho) / (rho * rho), one / rho  # v_0, v_1
    c2 = 2 * (one + rho + rho * rho) / rho
    d = (one + rho) / rho
    a_cur = blocking.a_at_inv_rho(p)
    out = [(v_cur, a_cur)]
    for _ in range(count - 1):
        v_next = c2 * v_cur - v_prev - d
        x = (v_cur + v_next) / (2 * (one + rho))
        ph_fwd = rho * v_cur - v_next - (one + rho) / rho
        ph_bwd = rho * v_next - v_cur - (one + rho) / rho
        if ph_bwd == 0:
            raise ZeroDivisionError("phi vanished along the v-chain")
        a_next = (ph_fwd * a_cur - (one + rho) * x ** K * (v_cur - v_next) * pi_kk) / ph_bwd
        out.append((v_next, a_next))
        v_prev, v_cur, a_cur = v_cur, v_next, a_next
    return out


def boundary_via_chain(p: SymmetricParams) -> BoundarySeq:
    """Recover pi_K(0, .) from K+1 chain values of A_K (exact rho only).

    A_K is a degree-K polynomial, so K+1 values at distinct points determine
    it; the Vandermonde system is solved exactly.  Revisiting chains (e.g.
    v_1 = v_3 at rho = 1/2) make the system singular: pick another rho.
    """
    if not is_exact(p.rho):
        raise ValueError("chain-based recovery needs exact rho (Fraction)")
    K = p.K
    pts = a_values_via_chain(p, count=K + 1)
    if len({v for v, _ in pts}) < K + 1:
        raise ValueError("v-chain revisits a value at this rho; cannot interpolate")
    n = K + 1
    A = [[pts[r][0] ** c for c in range(n)] for r in range(n)]
    rhs = [pts[r][1] for r in range(n)]
    coeffs = oracle._gauss_exact([row[:] for row in A], list(rhs))
    return BoundarySeq(rho=p.rho, values=coeffs)
