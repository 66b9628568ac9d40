"""Chains of coupled roots and the infinite-product boundary transform.

For the ergodic infinite-capacity model (rho < 1) the boundary generating
function A(y) = sum pi(0,k) y^k equals a normalized infinite product whose
zeros u_n and poles v_{-n} are two distinguished chains on the curve

    C = { (y,z) : 2 (1+rho)^2 y z = (y+z) (1 + rho + rho (y+z)) },

namely the chains through the two solutions of phi(y,z) = 0 on C.  Both
chains satisfy the integer-coefficient two-step recursion

    y^(n+1) - 2 ((1 + rho + rho^2)/rho) y^(n) + y^(n-1) = -(1+rho)/rho

and grow geometrically with ratio (a+b)/(a-b); forward recursion in the
growing direction is backward-stable, so that is how u and v are built.
The closed form of the chain (alpha/beta coefficients) is kept as a
cross-check only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._num import check_rho

N_CAP = 400


class TruncationError(ArithmeticError):
    """Requested tolerance unreachable at the permitted truncation depth."""


def ellipse_constants(rho) -> tuple:
    """(a, b) with 0 < b < a describing the real section of the curve."""
    check_rho(rho)
    r = float(rho)
    a = (1 + r) / (2 * (1 + r * r))
    b = 1 / (2 * math.sqrt(1 + r * r))
    return a, b


def growth_ratio(rho) -> float:
    a, b = ellipse_constants(rho)
    return (a + b) / (a - b)


def phi(rho, y, z):
    """phi(y,z) = rho y - z - (1+rho)/rho, the coupling form on the curve."""
    return rho * y - z - (1 + rho) / rho


def curve_residual(rho, y, z):
    """Zero iff (y, z) lies on the curve C."""
    s = y + z
    return 2 * (1 + rho) ** 2 * y * z - s * (1 + rho + rho * s)


def on_curve(rho, y, z, tol: float = 1e-9) -> bool:
    scale = max(1.0, abs(y), abs(z)) ** 2
    return abs(curve_residual(rho, y, z)) <= tol * scale


@dataclass
class ChainWindow:
    """Window y^(n), n in [-N, N], of the chain through (y0, y1) = (y^(0), y^(1))."""

    rho: object
    y0: object
    y1: object
    N: int
    values: list  # index i holds y^(i - N)
    alpha: object
    beta: object

    def value(self, n: int):
        if not -self.N <= n <= self.N:
            raise IndexError(f"n={n} outside window [-{self.N}, {self.N}]")
        return self.values[n + self.N]

    def closed_form(self, n: int):
        a, b = ellipse_constants(self.rho)
        r = (a + b) / (a - b)
        return a + self.alpha * r ** n + self.beta * r ** (-n)

    def x_value(self, n: int):
        """x^(n): y^(n) and y^(n+1) are the roots of the quadratic at x^(n)."""
        return (self.value(n) + self.value(n + 1)) / (2 * (1 + self.rho))


def chain_coefficients(rho, y, z) -> tuple:
    """(alpha, beta) of the closed form; alpha*beta = (a^2 - b^2)/4."""
    a, b = ellipse_constants(rho)
    alpha = (a - b) / (4 * a * b) * (a * (z - y) + b * (z + y) - 2 * a * b)
    beta = (a + b) / (4 * a * b) * (a * (y - z) + b * (z + y) - 2 * a * b)
    return alpha, beta


def chain(rho, y0, y1, N: int, check: bool = True) -> ChainWindow:
    """Generate the chain window by the two-step recursion, both directions.

    Rejects (y0, y1) off the curve.  With check=True the closed form is
    evaluated against the recursion values (1e-9 relative).
    """
    check_rho(rho)
    if not on_curve(rho, y0, y1):
        raise ValueError(f"({y0}, {y1}) does not lie on the curve at rho={rho}")
    c2 = 2 * (1 + rho + rho * rho) / rho
    d = (1 + rho) / rho
    fwd = [y0, y1]
    while len(fwd) < N + 2:
        fwd.append(c2 * fwd[-1] - fwd[-2] - d)
    bwd = [y1, y0]
    while len(bwd) < N + 2:
        bwd.append(c2 * bwd[-1] - bwd[-2] - d)
    values = list(reversed(bwd[2:])) + fwd[: N + 1]
    alpha, beta = chain_coefficients(rho, y0, y1)
    win = ChainWindow(rho=rho, y0=y0, y1=y1, N=N, values=values, alpha=alpha, beta=beta)
    if check:
        for n in range(-N, N + 1):
            got, want = win.value(n), win.closed_form(n)
            if abs(got - want) > 1e-9 * max(1.0, abs(got)):
                raise ArithmeticError(
                    f"chain closed form disagrees at n={n}: {got} vs {want}"
                )
    return win


def phi_zero_chains(rho) -> tuple:
    """Seeds (u0, u1) and (v0, v1): the two solutions of phi = 0 on the curve."""
    u = (0 * rho, -(1 + rho) / rho)
    v = ((2 + rho) / (rho * rho), 1 / rho)
    return u, v


def u_sequence(rho, N: int) -> list:
    """Zeros u_1..u_N of the product (all <= u_1 < 0), by forward recursion."""
    check_rho(rho)
    c2 = 2 * (1 + rho + rho * rho) / rho
    d = (1 + rho) / rho
    out = [-(1 + rho) / rho]  # u_1; u_0 = 0
    prev, cur = 0 * rho, out[0]
    for _ in range(N - 1):
        prev, cur = cur, c2 * cur - prev - d
        out.append(cur)
    return out


def v_sequence(rho, N: int) -> list:
    """Poles v_0, v_{-1}, ..., v_{-N} (all > v_0 > 0 past the first)."""
    check_rho(rho)
    c2 = 2 * (1 + rho + rho * rho) / rho
    d = (1 + rho) / rho
    v0 = (2 + rho) / (rho * rho)
    out = [v0]
    prev, cur = 1 / rho, v0  # v_1, v_0; recurse toward negative indices
    for _ in range(N):
        prev, cur = cur, c2 * cur - prev - d
        out.append(cur)
    return out


@dataclass
class ProductState:
    """Truncated zero/pole data of the boundary transform for one rho."""

    rho: float
    u: list  # u_1..u_N
    v: list  # v_0, v_{-1}, ..., v_{-N}
    N: int
    C: float  # normalizing constant, fixed by A(1) = 1 - rho

    def eval(self, y):
        num = 1.0 + 0 * y
        for un in self.u:
            num = num * (1 - y / un)
        den = 1.0 + 0 * y
        for vn in self.v:
            den = den * (1 - y / vn)
        return self.C * num / den

    def tail_estimate(self, y) -> float:
        """Geometric bound on the dropped log-factors beyond the truncation."""
        r = growth_ratio(self.rho)
        ay = abs(y)
        return (ay / abs(self.u[-1]) + ay / abs(self.v[-1])) / (1 - 1 / r)


def truncation_depth(rho, y_abs: float, tol: float = 1e-12) -> int:
    """Smallest N with |y/u_N| + |y/v_{-N}| < tol (1 - (a-b)/(a+b))."""
    target = tol * (1 - 1 / growth_ratio(rho))
    u1 = abs(-(1 + rho) / rho)
    v0 = (2 + rho) / (rho * rho)
    r = growth_ratio(rho)
    n = 1
    est = y_abs / u1 + y_abs / v0
    while est >= target and n < N_CAP:
        n += 1
        est /= r
    if est >= target:
        raise TruncationError(f"tolerance {tol} unreachable within N={N_CAP}")
    return max(n, 8)


def cohen_product(rho, y_abs: float = 1.0, tol: float = 1e-12, N: int | None = None) -> ProductState:
    """Build the truncated product, normalized so eval(1) = 1 - rho."""
    check_rho(rho)
    if not rho < 1:
        raise ValueError("the infinite-capacity transform requires rho < 1")
    if N is None:
        N = truncation_depth(rho, max(y_abs, 1.0), tol)
    u = [float(x) for x in u_sequence(rho, N)]
    v = [float(x) for x in v_sequence(rho, N)]
    state = ProductState(rho=float(rho), u=u, v=v, N=N, C=1.0)
    raw_at_1 = state.eval(1.0)
    state.C = (1 - float(rho)) / raw_at_1
    return state


def cohen_A(rho, y, N_trunc: int | None = None, tol: float = 1e-12):
    """A(y) by the truncated normalized product, with a tail-error estimate.

    Valid for |y| below the smallest pole v_0 = (2+rho)/rho^2; rejects
    rho >= 1.  Returns (value, error_estimate).
    """
    check_rho(rho)
    if not rho < 1:
        raise ValueError("A(y) exists only for rho < 1")
    v0 = (2 + rho) / (rho * rho)
    if abs(y) >= v0:
        raise ValueError(f"|y| = {abs(y)} outside the domain |y| < v0 = {v0}")
    state = cohen_product(rho, y_abs=abs(y), tol=tol, N=N_trunc)
    value = state.eval(y)
    err = abs(value) * (state.tail_estimate(y) + state.tail_estimate(1.0))
    if N_trunc is not None and state.tail_estimate(y) > tol:
        raise TruncationError(
            f"tail estimate {state.tail_estimate(y):g} above requested {tol:g}"
        )
    return value, err


def boundary_coeffs_infinite(rho, kmax: int, N_trunc: int | None = None, tol: float = 1e-12):
    """Power-series coefficients pi(0, k), k <= kmax, of the product.

    Sequential polynomial multiplication by each (1 - y/u_n) and division by
    each (1 - y/v_{-n}) (a convolution with the geometric series in 1/v),
    then scaling by C.  All operations have nonnegative increments, so there
    is no cancellation.
    """
    state = cohen_product(rho, y_abs=1.0, tol=tol, N=N_trunc)
    c = [0.0] * (kmax + 1)
    c[0] = 1.0
    for un in state.u:
        for i in range(kmax, 0, -1):
            c[i] -= c[i - 1] / un
    for vn in state.v:
        for i in range(1, kmax + 1):
            c[i] += c[i - 1] / vn
    from .finite import BoundarySeq  # local import to avoid a cycle

    return BoundarySeq(rho=rho, values=[state.C * x for x in c])
