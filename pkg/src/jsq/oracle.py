"""Brute-force ground truth: dense stationary solves of the balance equations.

This module is deliberately independent of the closed forms and of the
convolution reconstruction; every analytic result is cross-validated
against it.  Solves are desk-scale only (dimension capped at 10^4).
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import model
from ._num import check_finite_capacity, to_exact
from .model import JointDist, RateMatrix, SymmetricParams

DIMENSION_CAP = 10_000


class SingularSystemError(ValueError):
    pass


def solve_balance_dense(Q: RateMatrix) -> np.ndarray:
    """Unique probability vector with pi Q = 0.

    One balance equation (the last row of the transposed system) is replaced
    by the normalization sum(pi) = 1; the dense system is then solved by
    partial-pivot LU.  The residual ||pi Q||_inf is checked before returning.
    """
    n = Q.dimension
    if n > DIMENSION_CAP:
        raise ValueError(f"dimension {n} above oracle cap {DIMENSION_CAP}")
    A = Q.Q.T.copy()
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"balance system is singular: {exc}") from exc
    resid = np.abs(pi @ Q.Q).max()
    scale = Q.max_exit_rate()
    if not resid < 1e-12 * max(scale, 1.0) * n:
        raise SingularSystemError(f"stationary residual too large: {resid}")
    return pi


def stationary_dist(params, K: int | None = None) -> JointDist:
    """Dense-solve stationary distribution as a JointDist."""
    Q = model.build_generator(params, K)
    pi = solve_balance_dense(Q)
    symmetric = isinstance(params, SymmetricParams)
    return model.dist_from_vector(pi, Q.K, symmetric=symmetric)


def stationary_dist_odd(params: SymmetricParams, K: int | None = None) -> JointDist:
    """Stationary distribution of the 2K-1-capped variant chain."""
    Q = model.build_generator_odd(params, K)
    pi = solve_balance_dense(Q)
    entries = {s: pi[i] for i, s in enumerate(Q.states)}
    return JointDist(capacity=Q.K, entries=entries, symmetric=False)


def solve_balance_exact(params, K: int | None = None) -> JointDist:
    """Exact-rational stationary solve (validation backend, small K only).

    Gaussian elimination over Fractions on the transposed system with the
    normalization row appended in place of the last equation.
    """
    if K is None:
        K = params.K
    K = check_finite_capacity(K)
    n = (K + 1) ** 2
    if n > 200:
        raise ValueError("exact backend is for K <= 13 validation runs")
    A = [[Fraction(0)] * n for _ in range(n)]
    for k in range(K + 1):
        for j in range(K + 1):
            v = model.state_index(j, k, K)
            out = Fraction(0)
            for (j2, k2), rate in model._jumps(params, j, k, K):
                r = to_exact(rate)
                A[model.state_index(j2, k2, K)][v] += r  # transposed
                out += r
            A[v][v] -= out
    for c in range(n):
        A[-1][c] = Fraction(1)
    b = [Fraction(0)] * n
    b[-1] = Fraction(1)
    pi = _gauss_exact(A, b)
    symmetric = isinstance(params, SymmetricParams)
    return model.dist_from_vector(pi, K, symmetric=symmetric)


def _gauss_exact(A, b):
    n = len(A)
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            raise SingularSystemError("exact elimination hit a zero column")
        A[col], A[piv] = A[piv], A[col]
        b[col], b[piv] = b[piv], b[col]
        inv = 1 / A[col][col]
        for r in range(col + 1, n):
            f = A[r][col] * inv
            if f == 0:
                continue
            for c in range(col, n):
                A[r][c] -= f * A[col][c]
            b[r] -= f * b[col]
    x = [Fraction(0)] * n
    for r in range(n - 1, -1, -1):
        s = b[r] - sum(A[r][c] * x[c] for c in range(r + 1, n))
        x[r] = s / A[r][r]
    return x


def power_iteration_uniformized(Q: RateMatrix, iters: int = 20000) -> np.ndarray:
    """Second, independent route to the stationary vector.

    Uniformization with constant Lambda = max exit rate + 1 gives a strictly
    substochastic-free DTMC P = I + Q/Lambda whose fixed point equals the
    CTMC stationary distribution.
    """
    lam = Q.max_exit_rate() + 1.0
    P = np.eye(Q.dimension) + Q.Q / lam
    pi = np.full(Q.dimension, 1.0 / Q.dimension)
    for _ in range(iters):
        nxt = pi @ P
        if np.abs(nxt - pi).max() < 1e-15:
            pi = nxt
            break
        pi = nxt
    return pi / pi.sum()


def infinite_tail_bound(rho, K_trunc: int):
    """Geometric bound on the stationary mass beyond total count K_trunc:
    sum_{n > K} (2-rho)(1-rho) rho^n = (2-rho) rho^(K+1)."""
    return (2 - rho) * rho ** (K_trunc + 1)


def truncated_infinite(rho, K_trunc: int) -> tuple[JointDist, float]:
    """Finite-K_trunc solve standing in for the infinite model.

    Returns the dense-solve distribution together with the geometric tail
    bound quantifying what the truncation can hide.
    """
    if not rho < 1:
        raise ValueError("truncated-infinite oracle requires rho < 1")
    params = SymmetricParams(rho=rho, capacity=K_trunc)
    dist = stationary_dist(params)
    return dist, float(infinite_tail_bound(rho, K_trunc))


def balance_residual(Q: RateMatrix, dist: JointDist) -> float:
    """Max absolute residual of pi Q = 0 for a candidate distribution."""
    pi = dist.to_vector() if Q.states is None else np.array(
        [float(dist.prob(*s)) for s in Q.states]
    )
    return float(np.abs(pi @ Q.Q).max())
