"""Closed-form blocking and boundary-value formulas, symmetric finite model.

The central quantity is the stationary probability pi_K(K,K) that both
queues are full.  The all-rho geometric-sum form

    pi_K(K,K) = 2 rho^{2K} / (2 sum_{k<=2K} rho^k - sum_{k<K} (rho/2)^k)

is the production route: it has no removable singularities.  The piecewise
rational form (separate expressions for rho not in {1,2}, rho=1, rho=2) is
kept for cross-validation only.
"""

from __future__ import annotations

import math
from fractions import Fraction

from ._num import LOG_OVERFLOW, check_rho, geom_sum, is_exact
from .model import SymmetricParams


def blocking_probability(p: SymmetricParams):
    """pi_K(K,K) via the geometric-sum form, valid for every rho > 0."""
    rho, K = p.rho, p.K
    check_rho(rho)
    if is_exact(rho):
        rho = Fraction(rho)
        return 2 * rho ** (2 * K) / (2 * geom_sum(rho, 2 * K) - geom_sum(rho / 2, K - 1))
    if rho <= 1:
        denom = 2 * geom_sum(rho, 2 * K) - geom_sum(rho / 2, K - 1)
        return 2 * rho ** (2 * K) / denom
    # rho > 1: divide through by rho^{2K} so nothing overflows
    inv = 1.0 / rho
    corr = _scaled_half_sum(rho, K)
    return 2.0 / (2 * geom_sum(inv, 2 * K) - corr)


def _scaled_half_sum(rho: float, K: int) -> float:
    """sum_{k<K} (rho/2)^k * rho^{-2K}, organized so no term overflows."""
    if K == 0:
        return 0.0
    log_t0 = -2 * K * math.log(rho)
    if rho <= 2:
        t0 = math.exp(log_t0) if log_t0 > -745 else 0.0
        return t0 * geom_sum(rho / 2, K - 1)
    # rho/2 > 1: sum from the largest term (k = K-1) downward
    log_top = log_t0 + (K - 1) * math.log(rho / 2)
    top = math.exp(log_top) if log_top > -745 else 0.0
    return top * geom_sum(2 / rho, K - 1)


def blocking_probability_piecewise(p: SymmetricParams):
    """The rho-branched closed form; agrees with blocking_probability.

    0/0 at rho in {1, 2}, where the dedicated expressions take over.  For
    rho < 1 and large K the rho^{-2K} term overflows float range; the limit
    value of the generic branch is returned in that regime.
    """
    rho, K = p.rho, p.K
    check_rho(rho)
    if rho == 1:
        half = Fraction(1, 2) if is_exact(rho) else 0.5
        return 1 / (2 * K + half ** K)
    if rho == 2:
        if is_exact(rho):
            return 1 / (2 - (K + 2) * Fraction(1, 2) ** (2 * K + 1))
        return 1 / (2 - (K + 2) * 0.5 ** (2 * K + 1))
    if is_exact(rho):
        rho = Fraction(rho)
        denom = rho ** (-2 * K) + (1 - rho) * (2 * rho) ** (-K) - rho * (2 - rho)
        return (1 - rho) * (2 - rho) / denom
    if -2 * K * math.log(rho) > LOG_OVERFLOW:
        return 0.0  # rho < 1, rho^{-2K} dwarfs everything else
    denom = rho ** (-2 * K) + (1 - rho) * (2 * rho) ** (-K) - rho * (2 - rho)
    return (1 - rho) * (2 - rho) / denom


def blocking_probability_odd(p: SymmetricParams):
    """Blocking of the variant that caps the total at 2K-1 customers.

    Returns 2 * pi~_K(K-1, K): an arrival is lost from either of the two
    states holding 2K-1 customers.
    """
    rho, K = p.rho, p.K
    check_rho(rho)
    if K < 1:
        raise ValueError("odd variant requires K >= 1")
    if is_exact(rho):
        rho = Fraction(rho)
        return (
            2 * rho ** (2 * K - 1)
            / (2 * geom_sum(rho, 2 * K - 1) - geom_sum(rho / 2, K - 1))
        )
    if rho <= 1:
        denom = 2 * geom_sum(rho, 2 * K - 1) - geom_sum(rho / 2, K - 1)
        return 2 * rho ** (2 * K - 1) / denom
    inv = 1.0 / rho
    corr = _scaled_half_sum(rho, K) * rho  # rescale by rho^{-(2K-1)} instead
    return 2.0 / (2 * geom_sum(inv, 2 * K - 1) - corr)


def blocking_total_constraint(rho, M: int):
    """Blocking under a cap of M total customers (two queues of size ceil)."""
    check_rho(rho)
    if M < 0:
        raise ValueError("total capacity must be >= 0")
    if M % 2 == 0:
        return blocking_probability(SymmetricParams(rho=rho, capacity=M // 2))
    return blocking_probability_odd(SymmetricParams(rho=rho, capacity=(M + 1) // 2))


def empty_queue_probability(p: SymmetricParams):
    """A_K(1) = 1 - rho (1 - pi_K(K,K)): probability a given queue is empty."""
    rho = p.rho
    check_rho(rho)
    val = 1 - rho * (1 - blocking_probability(p))
    if not 0 <= val <= 1:
        raise ArithmeticError(f"A_K(1) = {val} outside [0,1]; formula fault")
    return val


def a_at_inv_rho(p: SymmetricParams):
    """A_K(1/rho) = rho^{-2K} pi_K(K,K), the boundary transform at 1/rho."""
    rho, K = p.rho, p.K
    check_rho(rho)
    if is_exact(rho):
        return Fraction(rho) ** (-2 * K) * blocking_probability(p)
    pi = blocking_probability(p)
    if pi == 0.0:
        # deep-underflow regime; the limiting value is (2-rho)(1-rho)
        return (2 - rho) * (1 - rho)
    return math.exp(math.log(pi) - 2 * K * math.log(rho))


REGIMES = ("rho_to_0", "rho_to_inf", "K_to_inf")


def blocking_asymptotics(p: SymmetricParams, regime: str):
    """Leading-order value of pi_K(K,K) in the requested limit regime.

    rho_to_0:  2 rho^{2K}                 (fixed K)
    rho_to_inf: 1 - 1/rho                 (fixed K)
    K_to_inf:  rho-branched leading term  (fixed rho)
    """
    rho, K = p.rho, p.K
    check_rho(rho)
    if regime == "rho_to_0":
        return 2 * rho ** (2 * K)
    if regime == "rho_to_inf":
        return 1 - 1 / rho
    if regime == "K_to_inf":
        if rho < 1:
            return rho ** (2 * K) * (1 - rho) * (2 - rho)
        if rho == 1:
            return 1 / (2 * K) if K > 0 else 1
        if rho == 2:
            return 0.5
        return 1 - 1 / rho
    raise ValueError(f"unknown regime {regime!r}; expected one of {REGIMES}")
