"""Total-occupancy distribution, mean bounds, and comparison-queue formulas.

The total N_K = L1 + L2 has fully explicit stationary probabilities

    P(N_K = n) = ( sum_{k <= min(n,K)} pi_K(0,k) rho^{-k} ) rho^n,

geometric above K.  The natural comparison systems are two independent
M/M/1/K queues (blocking nu_K(K)), one M/M/2/2K queue (blocking nu'(2K))
and one M/M/1/2K queue; their blocking probabilities bracket the
join-the-shortest-queue value.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

from . import blocking, finite
from ._num import check_rho, geom_sum, is_exact
from .model import SymmetricParams


@dataclass
class TotalDist:
    """Distribution of the total number of customers, n = 0..2K."""

    params: SymmetricParams
    masses: list

    def mean(self):
        return sum(n * p for n, p in enumerate(self.masses))

    def total(self):
        return sum(self.masses)

    def geometric_envelope(self, n: int):
        """(pi_K(K,K)/rho^{2K}) rho^n: equality holds for n >= K."""
        p = self.params
        return blocking.a_at_inv_rho(p) * p.rho ** n


def total_dist(p: SymmetricParams) -> TotalDist:
    rho, K = p.rho, p.K
    b = finite.boundary_from_blocking(p)
    masses = []
    inv = 1 / rho
    prefix = 0 * b[0]
    for n in range(2 * K + 1):
        if n <= K:
            prefix += b[n] * inv ** n
        masses.append(prefix * rho ** n)
    return TotalDist(params=p, masses=masses)


def mean_total(p: SymmetricParams):
    return total_dist(p).mean()


def mean_total_bounds(p: SymmetricParams) -> tuple:
    """(lower, upper) for E(N_K): the M/M/2/2K mean below, the geometric
    envelope sum above.  rho = 1 uses the dedicated limit expressions."""
    rho, K = p.rho, p.K
    check_rho(rho)
    if rho == 1:
        lower = K * (2 * K + 1) / (2 * K + (Fraction(1, 2) if is_exact(rho) else 0.5))
        upper = K * (2 * K + 1) / (2 * K + (Fraction(1, 2) if is_exact(rho) else 0.5) ** K)
        return lower, upper
    pi_kk = blocking.blocking_probability(p)
    lower = (
        2 * rho * (1 - (1 + 2 * K * (1 - rho)) * rho ** (2 * K))
        / ((1 - rho) * (1 + rho - 2 * rho ** (2 * K + 1)))
    )
    # (2K(rho-1) + rho^{-2K} - 1) rho pi_KK / (rho-1)^2, with the rho^{-2K} pi_KK
    # product taken from the overflow-guarded boundary-transform value
    upper = (
        ((2 * K * (rho - 1) - 1) * pi_kk + blocking.a_at_inv_rho(p))
        * rho
        / (rho - 1) ** 2
    )
    return lower, upper


def mean_total_bounds_infinite(rho) -> tuple:
    """(2 rho/(1-rho^2), rho (2-rho)/(1-rho)) bracketing E(N_infinity)."""
    check_rho(rho)
    if not rho < 1:
        raise ValueError("infinite-capacity mean requires rho < 1")
    return 2 * rho / (1 - rho * rho), rho * (2 - rho) / (1 - rho)


# ---------------------------------------------------------------------------
# comparison queues


def mm1k_blocking(rho, K: int):
    """nu_K(K) = rho^K / sum_{k<=K} rho^k  (two independent M/M/1/K queues)."""
    check_rho(rho)
    if is_exact(rho) or rho <= 1:
        return rho ** K / geom_sum(rho, K)
    return 1 / geom_sum(1 / rho, K)


def mm1_2k_blocking(rho, K: int):
    """Blocking of the M/M/1/2K queue with arrival 2 rho, service 2."""
    return mm1k_blocking(rho, 2 * K)


def mm2_2k_blocking(rho, K: int):
    """nu'(2K) = 2 rho^{2K} / (2 sum_{k<=2K} rho^k - 1)  (M/M/2/2K queue)."""
    check_rho(rho)
    if is_exact(rho) or rho <= 1:
        return 2 * rho ** (2 * K) / (2 * geom_sum(rho, 2 * K) - 1)
    inv = 1 / rho
    return 2 / (2 * geom_sum(inv, 2 * K) - inv ** (2 * K))


def mm2_2k_mean(rho, K: int):
    """Stationary mean of the M/M/2/2K queue: nu'(0) * 2 * sum n rho^n."""
    check_rho(rho)
    nu0 = 1 / (2 * geom_sum(rho, 2 * K) - 1)
    s = sum(n * rho ** n for n in range(1, 2 * K + 1))
    return 2 * nu0 * s


def slq_idle_probability(p: SymmetricParams):
    """Serve-the-longest-queue idleness probability: the same number as the
    blocking probability, by the occupied/vacant exchange duality."""
    return blocking.blocking_probability(p)


# ---------------------------------------------------------------------------
# uniform-distance report between the comparison blocking curves


@dataclass
class GapReport:
    K: int
    sup_mm1k_gap: float  # sup_rho ( nu_K(K) - pi_K(K,K) )
    sup_mm1k_arg: float
    mm1k_bracket: tuple  # proven (lower, upper) enclosing the sup
    sup_mm2_gap: float  # sup_rho ( pi_K(K,K) - nu'(2K) )
    sup_mm2_arg: float
    mm2_bracket: tuple
    rows: list  # (rho, pi, nu_K(K)/pi, nu'(2K)/pi)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rho", "jsq_blocking", "mm1k_ratio", "mm2_2k_ratio"])
        for row in self.rows:
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


def _golden_max(f, lo: float, hi: float, iters: int = 80):
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def _sup_on_grid(f, grid):
    best_x = max(grid, key=f)
    i = grid.index(best_x)
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    return _golden_max(f, lo, hi)


def sup_gap_brackets(K: int) -> tuple:
    """Proven enclosures for the two blocking-gap suprema at capacity K."""
    mm1k = (
        (K + 2.0 ** -K - 1) / ((K + 1) * (2 * K + 2.0 ** -K)),
        1.0 / (K + 1),
    )
    mm2 = (
        (0.5 - 2.0 ** -K) / ((2 * K + 0.5) * (2 * K + 2.0 ** -K)),
        2.0 / K ** 2,
    )
    return mm1k, mm2


def uniform_gap_report(K: int, rho_grid=None) -> GapReport:
    """Sup over rho of the two comparison gaps, plus the ratio sweep rows.

    The sup is located by a grid scan refined with golden-section around the
    best grid point (the gaps peak near rho = 1 in every observed case).
    """
    if K < 1:
        raise ValueError("K >= 1 required")
    if rho_grid is None:
        rho_grid = [0.01 + i * (6.0 - 0.01) / 599 for i in range(600)]
    rho_grid = sorted(set(float(r) for r in rho_grid) | {1.0})

    def gap_mm1k(r):
        p = SymmetricParams(rho=r, capacity=K)
        return mm1k_blocking(r, K) - blocking.blocking_probability(p)

    def gap_mm2(r):
        p = SymmetricParams(rho=r, capacity=K)
        return blocking.blocking_probability(p) - mm2_2k_blocking(r, K)

    x1, g1 = _sup_on_grid(gap_mm1k, rho_grid)
    x2, g2 = _sup_on_grid(gap_mm2, rho_grid)
    b1, b2 = sup_gap_brackets(K)
    rows = []
    for r in rho_grid:
        pi = blocking.blocking_probability(SymmetricParams(rho=r, capacity=K))
        rows.append((r, pi, mm1k_blocking(r, K) / pi, mm2_2k_blocking(r, K) / pi))
    return GapReport(
        K=K,
        sup_mm1k_gap=g1,
        sup_mm1k_arg=x1,
        mm1k_bracket=b1,
        sup_mm2_gap=g2,
        sup_mm2_arg=x2,
        mm2_bracket=b2,
        rows=rows,
    )
