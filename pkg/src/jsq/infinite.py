"""Stationary distribution of the symmetric infinite-capacity model.

Requires rho < 1.  The boundary probabilities pi(0, l) come from the
infinite-product transform; the rest of a finite window follows by the same
convolution sums as the finite model, with the level sums naturally
truncating at l = 2k-1 (off-diagonal) and l = 2k+1 (diagonal) because
g^{*m}(j) = 0 for j < m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import cohen, finite, oracle
from ._num import check_rho
from .kernel import LinearKernel, conv_table
from .model import JointDist, SymmetricParams


class WindowTooSmallError(ValueError):
    pass


WINDOW_CAP = 800


def default_window(rho) -> int:
    reciprocal = 1 / (1 - float(rho))
    return max(40, 4 * math.ceil(reciprocal * (1 - 1e-12)))


def window_tail_bound(rho, window: int) -> float:
    """Mass outside the {0..W}^2 window, bounded via the geometric envelope."""
    return float(oracle.infinite_tail_bound(rho, window))


def stationary_infinite(rho, window: int | None = None, tol: float = 1e-12) -> JointDist:
    """Window {0..W}^2 of the infinite-capacity stationary distribution.

    The result deliberately carries the window's mass deficit (bounded by
    window_tail_bound); no renormalization is applied.
    """
    check_rho(rho)
    if not rho < 1:
        raise ValueError("infinite-capacity model requires rho < 1")
    W = int(window) if window is not None else default_window(rho)
    if W > WINDOW_CAP:
        raise ValueError(
            f"window {W} above cap {WINDOW_CAP} (cost grows cubically); "
            "pass an explicit smaller window"
        )
    b = cohen.boundary_coeffs_infinite(rho, kmax=2 * W + 1, tol=tol)
    kern = LinearKernel.symmetric(float(rho))
    table = conv_table(kern, W + 2, W + 3, check=False)
    entries = {}
    for k in range(W + 1):
        for j in range(k):
            acc = 0.0
            for l in range(k, min(2 * k - 1, j + k) + 1):
                m = l - k + 1
                acc += b[l] * (table.at(m, j) - table.at(m, j + 1))
            entries[(j, k)] = acc
    rho_f = float(rho)
    for k in range(W + 1):
        acc = 0.0
        for l in range(k + 1, 2 * k + 2):
            acc += b[l] * table.at(l - k, k + 1)
        entries[(k, k)] = -acc / rho_f
    return JointDist(capacity=W, entries=entries, symmetric=True)


def t_seq(d: JointDist, kmax: int) -> list:
    """Diagonal-band sums T_k = sum_j pi(j, j+k) for k = 0..kmax."""
    W = d.capacity
    if kmax > W // 2:
        raise WindowTooSmallError(
            f"kmax={kmax} too deep for window {W}; tail mass would pollute T_k"
        )
    return [
        sum(float(d.prob(j, j + k)) for j in range(W + 1 - k)) for k in range(kmax + 1)
    ]


def t_tail_bound(rho, window: int, kmax: int) -> float:
    """Bound on the mass a width-`window` band sum T_k (k <= kmax) misses.

    Each pi(j, j+k) is at most the total-count envelope at n = 2j + k, so
    the truncated part of T_k is below (2-rho) rho^{2 window - k + 2}/(1+rho).
    """
    rho = float(rho)
    return (2 - rho) * rho ** (2 * window - kmax + 2) / (1 + rho)


def t_recurrence_residuals(rho, d: JointDist, kmax: int) -> list:
    """Residuals of (1+2 rho) T_{k+1} = T_k - pi(0,k), with the k = 0 variant
    (1+2 rho) T_1 = (1+rho) T_0 - pi(0,0).  All should vanish at stationarity."""
    T = t_seq(d, kmax + 1)
    out = [(1 + 2 * rho) * T[1] - ((1 + rho) * T[0] - float(d.prob(0, 0)))]
    for k in range(1, kmax + 1):
        out.append((1 + 2 * rho) * T[k + 1] - (T[k] - float(d.prob(0, k))))
    return out


@dataclass
class DecayRatios:
    """Geometric-normalization ratios probing the large-state decay rates."""

    rho: float
    diagonal: list  # (k, pi(k,k) / rho^{2k})
    band: list  # (j, k, pi(j,k) / ((2+rho)^{j-k} rho^{2k}))

    def max_rel_spread(self) -> tuple:
        def spread(vals):
            vals = [v for v in vals if v > 0]
            return (max(vals) - min(vals)) / min(vals) if vals else math.inf

        return spread([r for _, r in self.diagonal]), spread([r for *_, r in self.band])


def kingman_decay_ratio(rho, d: JointDist, k_lo: int = 8, k_hi: int = 12, offset: int = 3) -> DecayRatios:
    """Normalized probabilities along the diagonal and an off-diagonal band.

    Stabilization of these ratios (not any particular constant) is the
    checkable content of the known large-state geometric asymptotics.
    """
    if k_hi + 1 > d.capacity:
        raise WindowTooSmallError(f"window {d.capacity} below k_hi={k_hi}")
    rho = float(rho)
    diag = [(k, float(d.prob(k, k)) / rho ** (2 * k)) for k in range(k_lo, k_hi + 1)]
    band = []
    for k in range(k_lo, k_hi + 1):
        j = k - offset
        band.append((j, k, float(d.prob(j, k)) / ((2 + rho) ** (j - k) * rho ** (2 * k))))
    return DecayRatios(rho=rho, diagonal=diag, band=band)


def convergence_finite_to_infinite(rho, K_list, window: int = 5) -> list:
    """Max entrywise gap between pi_K and pi over a window, per K.

    The gaps shrink as K grows; the infinite-model window is computed once.
    """
    check_rho(rho)
    inf_dist = stationary_infinite(rho, window=window + 1)
    out = []
    for K in K_list:
        if K < window:
            raise ValueError(f"K={K} smaller than comparison window {window}")
        fin = finite.stationary_finite(SymmetricParams(rho=rho, capacity=K))
        gap = max(
            abs(float(fin.prob(j, k)) - float(inf_dist.prob(j, k)))
            for j in range(window)
            for k in range(window)
        )
        out.append((K, gap))
    return out
