"""The convolution kernel g, its powers g^{*k}, and their algebraic identities.

g(0) = 0, g(1) = -1 and g(j+2) = 2(1+rho) g(j+1) - 2 rho g(j); equivalently
g(j) = -(xi_+^j - xi_-^j)/(xi_+ - xi_-) with xi_pm = 1 + rho +- sqrt(1+rho^2).
The reconstruction of the stationary distribution weights boundary
probabilities by differences of convolution powers of g.

Three routes to g^{*k} are implemented and cross-checked:
  (a) iterated discrete convolution (the default),
  (b) a double-binomial closed form,
  (c) the shift form g^{*k} = (-1)^k sigma^k (h_+^{*k} * h_-^{*k}) with
      h_pm^{*k}(j) = C(j+k-1, k-1) xi_pm^j.
Route (b) is test-only: its alternating sum cancels catastrophically for
large j in float arithmetic.

The exact backend works in the quadratic extension Q(sqrt(1+rho^2)) so the
closed forms stay exact for rational rho; combined results are rational and
the sqrt component must vanish identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ._num import check_rho, is_exact, to_exact
from .model import AsymmetricParams, SymmetricParams


class DegenerateRootsError(ValueError):
    """Raised when a quadratic the caller needs distinct roots of is degenerate."""


# ---------------------------------------------------------------------------
# exact quadratic-extension arithmetic


@dataclass(frozen=True)
class QuadExt:
    """Number a + b*sqrt(d) with a, b rational and fixed square-free-ish d."""

    a: Fraction
    b: Fraction
    d: Fraction

    def _check(self, other: "QuadExt"):
        if other.d != self.d:
            raise ValueError("mixed extensions")

    def __add__(self, other):
        if isinstance(other, QuadExt):
            self._check(other)
            return QuadExt(self.a + other.a, self.b + other.b, self.d)
        return QuadExt(self.a + to_exact(other), self.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-other if isinstance(other, QuadExt) else -to_exact(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, QuadExt):
            self._check(other)
            return QuadExt(
                self.a * other.a + self.d * self.b * other.b,
                self.a * other.b + self.b * other.a,
                self.d,
            )
        q = to_exact(other)
        return QuadExt(self.a * q, self.b * q, self.d)

    __rmul__ = __mul__

    def inverse(self) -> "QuadExt":
        n = self.a * self.a - self.d * self.b * self.b
        if n == 0:
            raise ZeroDivisionError("QuadExt has zero norm")
        return QuadExt(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if isinstance(other, QuadExt):
            return self * other.inverse()
        return self * (1 / to_exact(other))

    def __pow__(self, n: int):
        out = QuadExt(Fraction(1), Fraction(0), self.d)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def rational(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"sqrt component did not cancel: {self.b}")
        return self.a


def xi_pair(rho):
    """(xi_+, xi_-): roots of X^2 - 2(1+rho) X + 2 rho, so xi_+ xi_- = 2 rho."""
    check_rho(rho)
    if is_exact(rho):
        r = to_exact(rho)
        d = 1 + r * r
        s = QuadExt(Fraction(0), Fraction(1), d)  # sqrt(1 + rho^2)
        return QuadExt(1 + r, Fraction(0), d) + s, QuadExt(1 + r, Fraction(0), d) - s
    s = math.sqrt(1 + rho * rho)
    return 1 + rho + s, 1 + rho - s


# ---------------------------------------------------------------------------
# generic two-term kernels (the asymmetric model reuses all of this)


@dataclass(frozen=True)
class LinearKernel:
    """Sequence with f(0)=0, f(1)=-scale and f(j+2) = S f(j+1) - P f(j).

    Its characteristic roots are xi_pm = (S +- sqrt(S^2-4P))/2.
    """

    S: object
    P: object
    scale: object

    @classmethod
    def symmetric(cls, rho) -> "LinearKernel":
        check_rho(rho)
        one = Fraction(1) if is_exact(rho) else 1.0
        return cls(S=2 * (one + rho), P=2 * rho, scale=one)

    @classmethod
    def asymmetric(cls, params: AsymmetricParams, i: int) -> "LinearKernel":
        if i not in (1, 2):
            raise ValueError("kernel id must be 1 or 2")
        mine = params.mu1 if i == 1 else params.mu2
        other = params.mu2 if i == 1 else params.mu1
        tot = 2 * params.lam + params.mu1 + params.mu2
        return cls(S=tot / other, P=2 * params.lam / other, scale=mine / other)

    def xi(self):
        disc = self.S * self.S - 4 * self.P
        if is_exact(self.S) and is_exact(self.P):
            d = to_exact(disc)
            s = QuadExt(Fraction(0), Fraction(1), d)
            h = QuadExt(to_exact(self.S) / 2, Fraction(0), d)
            return h + s * Fraction(1, 2), h - s * Fraction(1, 2)
        s = math.sqrt(disc)
        return (self.S + s) / 2, (self.S - s) / 2

    def seq(self, jmax: int) -> list:
        """Values f(0..jmax) by the recursion (exact for exact coefficients)."""
        vals = [0 * self.scale, -self.scale]
        for _ in range(jmax - 1):
            vals.append(self.S * vals[-1] - self.P * vals[-2])
        return vals[: jmax + 1]


def g(rho, j: int):
    """Kernel value by the closed form -(xi_+^j - xi_-^j)/(xi_+ - xi_-)."""
    if j < 0:
        raise ValueError("index must be a natural number")
    xp, xm = xi_pair(rho)
    val = -(xp ** j - xm ** j) / (xp - xm)
    return val.rational() if isinstance(val, QuadExt) else val


def g_seq(rho, jmax: int) -> list:
    return LinearKernel.symmetric(rho).seq(jmax)


def conv(f, h) -> list:
    """Discrete convolution (f*h)(n) = sum_{m<=n} f(m) h(n-m) on the overlap."""
    n = min(len(f), len(h))
    if n > 0 and isinstance(f[0], float) and isinstance(h[0], float):
        import numpy as np

        return list(np.convolve(f, h)[:n])
    return [sum(f[m] * h[i - m] for m in range(i + 1)) for i in range(n)]


def delta0(n: int, exact: bool = False) -> list:
    one = Fraction(1) if exact else 1.0
    return [one] + [0 * one] * n


def _binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def g_pow(rho, k: int, jmax: int, method: str = "conv") -> list:
    """g^{*k}(0..jmax) by the selected representation.

    Support property: g^{*k}(j) = 0 for j < k, exactly in every method.
    """
    if k < 1:
        raise ValueError("convolution power requires k >= 1 (k=0 is delta_0)")
    if method == "conv":
        gs = g_seq(rho, jmax)
        out = gs[:]
        for _ in range(k - 1):
            out = conv(out, gs)
        return out
    xp, xm = xi_pair(rho)
    exact = isinstance(xp, QuadExt)
    zero = Fraction(0) if exact else 0.0
    if method == "shift":
        out = []
        for j in range(jmax + 1):
            if j < k:
                out.append(zero)
                continue
            s = zero
            for i in range(j - k + 1):
                c = _binom(i + k - 1, k - 1) * _binom(j - i - 1, k - 1)
                s = s + c * xp ** i * xm ** (j - k - i)
            v = (-1) ** k * s
            out.append(v.rational() if exact else v)
        return out
    if method == "binomial":
        inv = (xm - xp) ** (-k) if not exact else ((xm - xp) ** k).inverse()
        out = []
        for j in range(jmax + 1):
            t = _binom(j + k - 1, k - 1) * (xp ** j + (-1) ** k * xm ** j)
            for l in range(1, k):
                inner = zero
                for i in range(j + 1):
                    c = _binom(i + k - l - 1, k - l - 1) * _binom(j - i + l - 1, l - 1)
                    inner = inner + c * xp ** i * xm ** (j - i)
                t = t + (-1) ** l * _binom(k, l) * inner
            v = t * inv
            out.append(v.rational() if exact else v)
        return out
    raise ValueError(f"unknown method {method!r}")


@dataclass
class ConvTable:
    """Tabulated convolution powers of a kernel: values[k][j] = f^{*k}(j).

    Built once per (kernel, window) and shared read-only by the
    reconstruction routines.
    """

    kernel: LinearKernel
    kmax: int
    jmax: int
    values: list
    exact: bool

    def power(self, k: int) -> list:
        if not 1 <= k <= self.kmax:
            raise ValueError(f"power {k} outside table (1..{self.kmax})")
        return self.values[k - 1]

    def at(self, k: int, j: int):
        return self.power(k)[j]


def conv_table(kernel_or_rho, kmax: int, jmax: int, check: bool = True) -> ConvTable:
    """Build the power table by iterated convolution.

    With check=True each column is verified against the two-step recursion
    f^{*(l+1)}(k+2) - S f^{*(l+1)}(k+1) + P f^{*(l+1)}(k) = -[l>0] f^{*l}(k+1),
    which catches drift in the iterated products.
    """
    if isinstance(kernel_or_rho, LinearKernel):
        kern = kernel_or_rho
    else:
        kern = LinearKernel.symmetric(kernel_or_rho)
    base = kern.seq(jmax)
    rows = [base]
    for _ in range(kmax - 1):
        rows.append(conv(rows[-1], base))
    exact = is_exact(kern.S)
    if check:
        _check_column_recursion(kern, rows, exact)
    return ConvTable(kernel=kern, kmax=kmax, jmax=jmax, values=rows, exact=exact)


def _check_column_recursion(kern, rows, exact):
    for l, row in enumerate(rows):  # row = f^{*(l+1)}
        scale = max(abs(x) for x in row) or 1
        for j in range(len(row) - 2):
            lhs = row[j + 2] - kern.S * row[j + 1] + kern.P * row[j]
            rhs = -rows[l - 1][j + 1] if l > 0 else 0
            err = lhs - rhs
            if exact:
                if err != 0:
                    raise ArithmeticError(f"exact column recursion failed at l={l}, j={j}")
            elif abs(err) > 1e-9 * float(scale):
                raise ArithmeticError(
                    f"column recursion residual {err:g} at l={l}, j={j}"
                )


# ---------------------------------------------------------------------------
# the S_n partial sums tying kernel powers to quadratic roots


def p_x_roots(params, i: int, x):
    """Roots (y, z) of the level polynomial attached to kernel i at x.

    Symmetric model:  Y^2 - 2(1+rho) x Y + (1 + 2 rho x) x.
    Asymmetric, i=1:  mu2 Y^2 - (2 lam + mu1 + mu2) x Y + (mu1 + 2 lam x) x,
    and i=2 with mu1, mu2 exchanged.
    """
    if isinstance(params, SymmetricParams):
        lead, mid, const = 1.0, 2 * (1 + params.rho) * x, (1 + 2 * params.rho * x) * x
    else:
        lead = params.mu2 if i == 1 else params.mu1
        mine = params.mu1 if i == 1 else params.mu2
        mid = (2 * params.lam + params.mu1 + params.mu2) * x
        const = (mine + 2 * params.lam * x) * x
    disc = complex(mid) ** 2 - 4 * lead * complex(const)
    s = disc ** 0.5
    y = (mid + s) / (2 * lead)
    z = (mid - s) / (2 * lead)
    return y, z


def s_n_sum(params, i: int, x, n: int, table: ConvTable | None = None):
    """Defining sum S_n(x) = sum_{k=0}^{n} x^k g_i^{*(n-k+1)}(k)."""
    if table is None:
        kern = (
            LinearKernel.symmetric(params.rho)
            if isinstance(params, SymmetricParams)
            else LinearKernel.asymmetric(params, i)
        )
        table = conv_table(kern, n + 1, n + 1, check=False)
    return sum(x ** k * table.at(n - k + 1, k) for k in range(n + 1))


def s_n_closed(params, i: int, x, n: int):
    """Closed form -(mu_i/mu_{3-i}) x (y^n - z^n)/(y - z) of the S_n sum."""
    y, z = p_x_roots(params, i, x)
    if abs(y - z) < 1e-12 * max(1.0, abs(y), abs(z)):
        raise DegenerateRootsError(f"coincident roots at x={x}")
    if isinstance(params, SymmetricParams):
        ratio = 1.0
    else:
        ratio = params.mu1 / params.mu2 if i == 1 else params.mu2 / params.mu1
    if n == 0:
        return 0j
    return -ratio * x * (y ** n - z ** n) / (y - z)
