"""Generator construction, parameter validation, distribution plumbing."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jsq import model
from jsq.model import (
    INFINITE,
    AsymmetricParams,
    JointDist,
    SymmetricParams,
    build_generator,
    build_generator_odd,
    validate_dist,
)

from conftest import RHO_GRID


def test_symmetric_k1_rho1_rates():
    Q = build_generator(SymmetricParams(rho=1.0, capacity=1))
    assert Q.rate((0, 0), (0, 1)) == 1.0
    assert Q.rate((0, 0), (1, 0)) == 1.0
    assert Q.rate((1, 1), (1, 0)) == 1.0
    assert Q.rate((1, 1), (0, 1)) == 1.0
    assert Q.rate((0, 1), (1, 1)) == 2.0  # shorter queue takes the full flow
    assert Q.dimension == 4


@pytest.mark.parametrize("rho", [0.3, 1.0, 2.5])
def test_corner_0K_outgoing(rho):
    K = 4
    Q = build_generator(SymmetricParams(rho=rho, capacity=K))
    row = Q.Q[Q.index(0, K)].copy()
    row[Q.index(0, K)] = 0.0
    nonzero = {i for i in np.nonzero(row)[0]}
    assert nonzero == {Q.index(1, K), Q.index(0, K - 1)}
    assert row[Q.index(1, K)] == pytest.approx(2 * rho)
    assert row[Q.index(0, K - 1)] == 1.0


def test_asymmetric_tie_split():
    p = AsymmetricParams(lam=0.5, mu1=1.0, mu2=2.0, p1=0.3, capacity=3)
    Q = build_generator(p)
    for k in range(3):
        assert Q.rate((k, k), (k + 1, k)) == pytest.approx(0.3)
        assert Q.rate((k, k), (k, k + 1)) == pytest.approx(0.7)


@given(
    rho=st.floats(0.05, 4.0, allow_nan=False),
    K=st.integers(0, 6),
)
@settings(max_examples=40, deadline=None)
def test_generator_is_conservative(rho, K):
    Q = build_generator(SymmetricParams(rho=rho, capacity=K))
    assert np.allclose(Q.Q.sum(axis=1), 0.0, atol=1e-12)
    off = Q.Q - np.diag(Q.Q.diagonal())
    assert (off >= 0).all()


def test_generator_commutes_with_swap():
    K = 3
    Q = build_generator(SymmetricParams(rho=1.7, capacity=K))
    for j in range(K + 1):
        for k in range(K + 1):
            for j2 in range(K + 1):
                for k2 in range(K + 1):
                    assert Q.rate((j, k), (j2, k2)) == Q.rate((k, j), (k2, j2))


@pytest.mark.parametrize("rho", RHO_GRID[:3])
def test_asymmetric_reduces_to_symmetric(rho):
    K = 3
    Qs = build_generator(SymmetricParams(rho=rho, capacity=K))
    Qa = build_generator(AsymmetricParams(lam=rho, mu1=1, mu2=1, p1=0.5, capacity=K))
    assert np.allclose(Qs.Q, Qa.Q)


def test_generator_rejects_infinite_and_bad_rates():
    with pytest.raises(ValueError):
        build_generator(SymmetricParams(rho=1.0, capacity=INFINITE))
    with pytest.raises(ValueError):
        SymmetricParams(rho=0.0, capacity=2)
    with pytest.raises(ValueError):
        AsymmetricParams(lam=1.0, mu1=-1.0, mu2=1.0, p1=0.5, capacity=2)
    with pytest.raises(ValueError):
        AsymmetricParams(lam=1.0, mu1=1.0, mu2=1.0, p1=1.5, capacity=2)


def test_odd_variant_drops_corner():
    Q = build_generator_odd(SymmetricParams(rho=1.0, capacity=1))
    assert Q.dimension == 3
    # (0,1) can only move down: the east jump led to the removed corner
    row = Q.Q[Q.index(0, 1)].copy()
    row[Q.index(0, 1)] = 0.0
    assert {i for i in np.nonzero(row)[0]} == {Q.index(0, 0)}


def test_validate_dist_examples():
    point = JointDist(capacity=0, entries={(0, 0): 1.0}, symmetric=True)
    assert validate_dist(point, 1e-9)
    uniform = JointDist(
        capacity=1,
        entries={(0, 0): 0.25, (0, 1): 0.25, (1, 0): 0.25, (1, 1): 0.25},
    )
    assert validate_dist(uniform, 1e-9)
    short = JointDist(capacity=1, entries={(0, 0): 0.9})
    assert not validate_dist(short, 1e-9)
    negative = JointDist(capacity=1, entries={(0, 0): 1.5, (0, 1): -0.5})
    assert not validate_dist(negative, 1e-9)


def test_symmetric_storage_mirrors():
    d = JointDist(capacity=1, entries={(0, 1): 0.3, (0, 0): 0.3, (1, 1): 0.1}, symmetric=True)
    assert d.prob(1, 0) == d.prob(0, 1) == 0.3
    assert (1, 0) not in d.entries  # triangular storage only


def test_csv_json_roundtrip():
    d = JointDist(
        capacity=1,
        entries={(0, 0): 0.2, (0, 1): 0.2, (1, 1): 0.4},
        symmetric=True,
    )
    back = JointDist.from_csv(d.to_csv())
    assert back.prob(1, 0) == pytest.approx(0.2)
    assert back.total_mass() == pytest.approx(1.0)
    back2 = JointDist.from_json(d.to_json(), symmetric=True)
    assert back2.prob(1, 1) == pytest.approx(0.4)
    assert JointDist.from_csv(back.to_csv()).to_csv() == back.to_csv()


def test_row_major_indexing_documented():
    K = 5
    assert model.state_index(3, 2, K) == 3 + (K + 1) * 2
    d = JointDist(capacity=1, entries={(0, 0): 1.0}, symmetric=True)
    vec = d.to_vector()
    assert vec[model.state_index(0, 0, 1)] == 1.0


def test_exact_entries_supported():
    d = JointDist(
        capacity=1,
        entries={(0, 0): Fraction(1, 5), (0, 1): Fraction(1, 5), (1, 1): Fraction(2, 5)},
        symmetric=True,
    )
    assert validate_dist(d, 0)
    assert d.total_mass() == 1


def test_infinite_params_ergodicity():
    SymmetricParams(rho=0.5, capacity=INFINITE).require_ergodic()
    with pytest.raises(ValueError):
        SymmetricParams(rho=1.5, capacity=INFINITE).require_ergodic()
    with pytest.raises(ValueError):
        AsymmetricParams(lam=2.0, mu1=1, mu2=1, capacity=INFINITE).require_ergodic()
