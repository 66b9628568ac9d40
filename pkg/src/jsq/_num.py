"""Small numeric helpers shared across the analytic modules.

Everything here is written so the same code path works for float64 and
for exact `fractions.Fraction` arithmetic (the validation backend).
"""

from __future__ import annotations

import math
from fractions import Fraction

# Guard against exp/overflow in closed forms: beyond this, rho**(2K) leaves
# float64 range and the normalized (divided-by-rho^2K) branch must be used.
LOG_OVERFLOW = 600.0

K_CAP = 10**6


def is_exact(x) -> bool:
    return isinstance(x, (Fraction, int)) and not isinstance(x, bool)


def as_number(text: str):
    """Parse a CLI number: plain float, or exact Fraction like '1/2' or '0.9'."""
    text = text.strip()
    if "/" in text:
        return Fraction(text)
    return float(text)


def to_exact(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    # exact binary value of the float, not a decimal re-parse
    return Fraction(x)


def geom_sum(q, n: int):
    """sum_{k=0}^{n} q**k by Horner accumulation; n < 0 gives 0.

    The Horner form stays uniformly accurate near q = 1, unlike the
    (q**(n+1) - 1)/(q - 1) quotient.
    """
    if n < 0:
        return q * 0
    s = q * 0
    for _ in range(n + 1):
        s = 1 + q * s
    return s


def safe_pow(base: float, n: int) -> float:
    """base**n for base > 0 without raising OverflowError."""
    if base == 0.0:
        return 0.0 if n > 0 else 1.0
    t = n * math.log(base)
    if t > 700.0:
        return math.inf
    if t < -745.0:
        return 0.0
    return base ** n


def check_rho(rho) -> None:
    if not rho > 0:
        raise ValueError(f"traffic intensity must be positive, got {rho}")


def check_finite_capacity(K) -> int:
    if K is None or K == math.inf:
        raise ValueError("operation requires a finite capacity")
    K = int(K)
    if K < 0:
        raise ValueError(f"capacity must be >= 0, got {K}")
    if K > K_CAP:
        raise ValueError(f"capacity above supported cap {K_CAP}")
    return K
