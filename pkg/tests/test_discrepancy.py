import math

import numpy as np
import pytest

from tensorcover.covering import (build_classical, build_grid, build_h2,
                                  build_h4, build_h5, build_random,
                                  estimate_tau, verify_cover)
from tensorcover.exceptions import BudgetError, ParameterError


def test_estimate_simplex():
    r = estimate_tau(build_classical(6, "simplex"), restarts=200, seed=0)
    assert r.estimated_tau == pytest.approx(1 / 6, abs=1e-3)


def test_estimate_pm_basis_diagonal():
    H = build_classical(3, "pm_basis")
    r = estimate_tau(H, restarts=200, seed=1)
    assert r.estimated_tau == pytest.approx(1 / math.sqrt(3), abs=1e-3)
    np.testing.assert_allclose(np.abs(r.witness), 1 / math.sqrt(3), atol=2e-3)
    # the reported value is attained at the witness
    assert np.max(H.vectors @ r.witness) == pytest.approx(r.estimated_tau, abs=1e-12)
    assert np.linalg.norm(r.witness) == pytest.approx(1.0, abs=1e-12)


def test_estimate_h2_6():
    r = estimate_tau(build_h2(6), restarts=500, seed=0)
    assert r.estimated_tau == pytest.approx(0.835, abs=0.01)


def test_estimate_random_60():
    # the estimate is attained at a unit vector, so it bounds the true level
    # from above; for 60 random vectors in R^6 it lands well below 0.6
    H = build_random(6, 60, seed=0)
    r = estimate_tau(H, restarts=300, seed=0)
    assert 0.30 <= r.estimated_tau <= 0.60
    assert np.max(H.vectors @ r.witness) == pytest.approx(r.estimated_tau, abs=1e-12)


@pytest.mark.parametrize("make", [lambda: build_h4(6), lambda: build_h5(7),
                                  lambda: build_h2(3), lambda: build_grid(3, 3)])
def test_estimate_above_claimed(make):
    H = make()
    assert estimate_tau(H, restarts=50, seed=2).estimated_tau >= H.claimed_tau


def test_estimate_one_dimensional():
    r = estimate_tau(build_classical(1, "pm_basis"), restarts=1)
    assert r.estimated_tau == 1.0
    with pytest.raises(ParameterError):
        estimate_tau(build_h2(2), restarts=0)


def test_verify_uniform_grid():
    r = verify_cover(build_classical(3, "pm_basis"), 0.5, grid_m=60)
    assert r.certified and r.certified_at == (0.5, 60)
    r = verify_cover(build_h2(4), 2 / math.sqrt(math.log(4) + 5), grid_m=40)
    assert r.certified


def test_verify_uniform_budget_hint():
    with pytest.raises(BudgetError, match="estimate_tau"):
        verify_cover(build_h2(6), 0.7, grid_m=40, budget=10_000)


def test_verify_singleton_fails_with_witness():
    H = build_classical(3, "singleton")
    for grid_m in (None, 10):
        r = verify_cover(H, 0.0, grid_m=grid_m)
        assert not r.certified
        assert H.vectors[0] @ r.witness < 0
    r = verify_cover(H, 0.0)
    np.testing.assert_allclose(r.witness, -H.vectors[0], atol=1e-6)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_verify_auto_h2(n):
    r = verify_cover(build_h2(n), 2 / math.sqrt(math.log(n) + 5))
    assert r.certified


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_verify_auto_pm_basis(n):
    r = verify_cover(build_classical(n, "pm_basis"), 0.9 / math.sqrt(n))
    assert r.certified


def test_verify_rejects_level_above_true():
    # the true level of the ±basis in R^3 is 1/sqrt(3)
    r = verify_cover(build_classical(3, "pm_basis"), 0.6)
    assert not r.certified
    assert r.estimated_tau < 0.6


def test_verify_tau_range():
    with pytest.raises(ParameterError):
        verify_cover(build_h2(2), 1.5)
