"""Model parameters, state lattice, generator construction and distributions.

Two M/M/1/K queues under join-the-shortest-queue routing.  The symmetric
model has unit service rates and global Poisson arrival rate 2*rho; the
asymmetric model has service rates mu1, mu2, global arrival rate 2*lambda
and tie-break probability p1 toward queue 1.

State indexing is row-major throughout: state (j, k) maps to j + (K+1)*k.
Every module that compares distributions entry-by-entry relies on this.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._num import check_finite_capacity, check_rho

INFINITE = math.inf


@dataclass(frozen=True)
class SymmetricParams:
    """Symmetric model: arrival rate 2*rho, unit services, capacity K."""

    rho: float | Fraction
    capacity: float | int = INFINITE

    def __post_init__(self):
        check_rho(self.rho)
        if not self.is_infinite:
            check_finite_capacity(self.capacity)

    @property
    def is_infinite(self) -> bool:
        return self.capacity == INFINITE

    @property
    def K(self) -> int:
        return check_finite_capacity(self.capacity)

    def require_ergodic(self) -> None:
        if self.is_infinite and not self.rho < 1:
            raise ValueError("infinite-capacity model is ergodic only for rho < 1")


@dataclass(frozen=True)
class AsymmetricParams:
    """Asymmetric model: arrival rate 2*lam, service rates mu1/mu2, tie prob p1."""

    lam: float | Fraction
    mu1: float | Fraction
    mu2: float | Fraction
    p1: float | Fraction = 0.5
    capacity: float | int = INFINITE

    def __post_init__(self):
        for name in ("lam", "mu1", "mu2"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 <= self.p1 <= 1:
            raise ValueError("p1 must lie in [0, 1]")
        if not self.is_infinite:
            check_finite_capacity(self.capacity)

    @property
    def p2(self):
        return 1 - self.p1

    @property
    def is_infinite(self) -> bool:
        return self.capacity == INFINITE

    @property
    def K(self) -> int:
        return check_finite_capacity(self.capacity)

    def require_ergodic(self) -> None:
        if self.is_infinite and not 2 * self.lam < self.mu1 + self.mu2:
            raise ValueError("infinite-capacity model requires 2*lambda < mu1 + mu2")

    def is_symmetric(self) -> bool:
        return self.mu1 == self.mu2 == 1 and self.p1 == Fraction(1, 2)

    def as_symmetric(self) -> SymmetricParams:
        if not self.is_symmetric():
            raise ValueError("parameters do not reduce to the symmetric model")
        return SymmetricParams(rho=self.lam, capacity=self.capacity)


Params = SymmetricParams | AsymmetricParams


def state_index(j: int, k: int, K: int) -> int:
    return j + (K + 1) * k


def _jumps(params: Params, j: int, k: int, K: int):
    """Yield (target, rate) pairs for state (j, k) on the {0..K}^2 lattice.

    Arrivals always join the strictly shorter queue; on a tie they split
    (rho/rho symmetric, 2*lam*p1 east / 2*lam*p2 north asymmetric).  Each
    queue serves at its own rate whenever nonempty.
    """
    if isinstance(params, SymmetricParams):
        lam, mu1, mu2 = params.rho, 1, 1
        east_tie, north_tie = params.rho, params.rho
    else:
        lam = params.lam
        mu1, mu2 = params.mu1, params.mu2
        east_tie, north_tie = 2 * lam * params.p1, 2 * lam * params.p2
    if j == k:
        if k < K:
            yield (j + 1, k), east_tie
            yield (j, k + 1), north_tie
        if k > 0:
            yield (j - 1, k), mu1
            yield (j, k - 1), mu2
    elif j < k:
        yield (j + 1, k), 2 * lam
        if j > 0:
            yield (j - 1, k), mu1
        yield (j, k - 1), mu2
    else:
        yield (j, k + 1), 2 * lam
        if k > 0:
            yield (j, k - 1), mu2
        yield (j - 1, k), mu1


@dataclass
class RateMatrix:
    """Dense CTMC generator over {0..K}^2 (row-major state order)."""

    K: int
    Q: np.ndarray
    states: list = field(repr=False, default=None)

    @property
    def dimension(self) -> int:
        return self.Q.shape[0]

    def index(self, j: int, k: int) -> int:
        if self.states is not None:
            return self.states.index((j, k))
        return state_index(j, k, self.K)

    def rate(self, v: tuple, w: tuple) -> float:
        return self.Q[self.index(*v), self.index(*w)]

    def max_exit_rate(self) -> float:
        return float(-self.Q.diagonal().min())


def build_generator(params: Params, K: int | None = None) -> RateMatrix:
    """Dense generator of the queue-length process on {0..K}^2."""
    if K is None:
        K = params.K
    K = check_finite_capacity(K)
    n = (K + 1) ** 2
    Q = np.zeros((n, n))
    for k in range(K + 1):
        for j in range(K + 1):
            v = state_index(j, k, K)
            for (j2, k2), rate in _jumps(params, j, k, K):
                Q[v, state_index(j2, k2, K)] += float(rate)
    np.fill_diagonal(Q, Q.diagonal() - Q.sum(axis=1))
    return RateMatrix(K=K, Q=Q)


def build_generator_odd(params: SymmetricParams, K: int | None = None) -> RateMatrix:
    """Variant chain capped at 2K-1 total customers: state (K,K) removed.

    Transitions are those of the standard model minus the ones into and out
    of (K,K).
    """
    if K is None:
        K = params.K
    K = check_finite_capacity(K)
    if K < 1:
        raise ValueError("variant chain requires K >= 1")
    states = [(j, k) for k in range(K + 1) for j in range(K + 1) if (j, k) != (K, K)]
    pos = {s: i for i, s in enumerate(states)}
    n = len(states)
    Q = np.zeros((n, n))
    for (j, k) in states:
        v = pos[(j, k)]
        for target, rate in _jumps(params, j, k, K):
            if target in pos:
                Q[v, pos[target]] += float(rate)
    np.fill_diagonal(Q, Q.diagonal() - Q.sum(axis=1))
    return RateMatrix(K=K, Q=Q, states=states)


class JointDist:
    """Probability assignment over the {0..K}^2 lattice.

    When `symmetric` is set, only the upper triangle (j <= k) is stored and
    reads of (j, k) with j > k are mirrored, so pi(j,k) == pi(k,j) holds
    exactly by storage.  Values may be floats or Fractions.
    """

    def __init__(self, capacity: int, entries: dict, symmetric: bool = False):
        self.capacity = int(capacity)
        self.symmetric = bool(symmetric)
        if symmetric:
            entries = {(min(j, k), max(j, k)): p for (j, k), p in entries.items()}
        self.entries = entries

    @property
    def K(self) -> int:
        return self.capacity

    def prob(self, j: int, k: int):
        if self.symmetric and j > k:
            j, k = k, j
        return self.entries.get((j, k), 0)

    def items(self):
        """All (j, k, p) over the full lattice, mirrored when symmetric."""
        for k in range(self.capacity + 1):
            for j in range(self.capacity + 1):
                yield j, k, self.prob(j, k)

    def total_mass(self):
        return sum(p for _, _, p in self.items())

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.capacity + 1, self.capacity + 1))
        for j, k, p in self.items():
            out[j, k] = float(p)
        return out

    def to_vector(self) -> np.ndarray:
        """Row-major stationary vector, index j + (K+1)*k."""
        return self.to_array().reshape(-1, order="F")

    # -- serialization -----------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j", "k", "prob"])
        for j, k, p in self.items():
            w.writerow([j, k, repr(float(p))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, symmetric: bool = False) -> "JointDist":
        rows = list(csv.reader(io.StringIO(text)))
        if rows[0] != ["j", "k", "prob"]:
            raise ValueError(f"unexpected CSV header: {rows[0]}")
        entries = {}
        cap = 0
        for j, k, p in rows[1:]:
            j, k = int(j), int(k)
            entries[(j, k)] = float(p)
            cap = max(cap, j, k)
        return cls(capacity=cap, entries=entries, symmetric=symmetric)

    def to_json(self) -> str:
        return json.dumps(
            {
                "K": self.capacity,
                "entries": [[j, k, float(p)] for j, k, p in self.items()],
            }
        )

    @classmethod
    def from_json(cls, text: str, symmetric: bool = False) -> "JointDist":
        obj = json.loads(text)
        entries = {(int(j), int(k)): p for j, k, p in obj["entries"]}
        return cls(capacity=int(obj["K"]), entries=entries, symmetric=symmetric)


def validate_dist(d: JointDist, tol: float = 1e-9) -> bool:
    """Nonnegative within tol, unit mass within tol, symmetry when flagged."""
    total = 0
    for j, k, p in d.items():
        if p < -tol:
            return False
        total += p
    if abs(total - 1) > tol:
        return False
    if d.symmetric:
        for (j, k) in list(d.entries):
            if d.prob(j, k) != d.prob(k, j):
                return False
    return True


def dist_from_vector(vec, K: int, symmetric: bool = False) -> JointDist:
    """Inverse of JointDist.to_vector for the row-major layout."""
    entries = {}
    for k in range(K + 1):
        for j in range(K + 1):
            if symmetric and j > k:
                continue
            entries[(j, k)] = vec[state_index(j, k, K)]
    return JointDist(capacity=K, entries=entries, symmetric=symmetric)
