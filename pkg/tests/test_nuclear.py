import math

import numpy as np
import pytest

from tensorcover.bench import gen_odeco
from tensorcover.covering import (build_classical, build_h2, build_h4,
                                  build_random)
from tensorcover.exceptions import BudgetError, DegenerateError, ShapeError
from tensorcover.linalg import nuclear_norm_matrix
from tensorcover.nuclear import (approx_nuclear_norm, assemble_problem,
                                 flattening_baseline, solve_nuclear_sdp)
from tensorcover.tensor import outer, unfold

cp = pytest.importorskip("cvxpy")

E2 = np.eye(2)


def sdp_oracle(T, H):
    """The relaxation for order 3 in the Schur-complement PSD form."""
    n1, a, b = T.shape
    Zs = [cp.Variable((a, b)) for _ in range(n1)]
    obj = cp.Maximize(sum(cp.sum(cp.multiply(T[i], Zs[i])) for i in range(n1)))
    cons = []
    for x in H.vectors:
        S = sum(x[i] * Zs[i] for i in range(n1))
        cons.append(cp.bmat([[np.eye(a), S], [S.T, np.eye(b)]]) >> 0)
    return cp.Problem(obj, cons).solve(solver="CLARABEL")


def test_assemble_counts():
    T = np.zeros((2, 2, 2))
    assert assemble_problem(T, [build_classical(2, "pm_basis")]).constraint_count == 4
    T = np.zeros((5, 10, 10))
    H = build_h4(5)
    assert assemble_problem(T, [H]).constraint_count == len(H)
    T = np.zeros((2, 2, 3, 3))
    pm = build_classical(2, "pm_basis")
    assert assemble_problem(T, [pm, pm]).constraint_count == 16


def test_assemble_errors():
    with pytest.raises(BudgetError, match="smaller"):
        assemble_problem(np.zeros((6, 6, 6)), [build_h2(6)], budget=100)
    with pytest.raises(ShapeError):
        assemble_problem(np.zeros((3, 3)), [])


def test_adjoint(rng):
    T = rng.standard_normal((2, 3, 4, 5))
    P = assemble_problem(T, [build_random(2, 4, 1), build_random(3, 5, 2)])
    Z = rng.standard_normal(P.T.shape)
    M = rng.standard_normal((20, 4, 5))
    assert np.sum(P.slices(Z) * M) == pytest.approx(np.sum(Z * P.adjoint(M)), rel=1e-12)


def test_rank_one():
    T = outer(E2[0], E2[0], E2[0])
    r = approx_nuclear_norm(T, [build_classical(2, "pm_basis")])
    assert r.u == pytest.approx(1.0, abs=1e-5)
    assert r.lower == pytest.approx(r.u / math.sqrt(2))
    assert r.lower <= 1.0 <= r.upper + 1e-5
    assert r.certified and r.converged


def test_odeco_sandwich():
    inst = gen_odeco((3, 3, 3), r=2, seed=0, weights=[2.0, 1.0])
    r = approx_nuclear_norm(inst.tensor, [build_classical(3, "pm_basis")])
    assert inst.true_nuclear == 3.0
    assert r.lower - 1e-5 <= 3.0 <= r.upper + 1e-5


@pytest.mark.parametrize("seed", range(3))
def test_matches_conic_solver(seed):
    rng = np.random.default_rng(seed)
    T = rng.standard_normal((3, 4, 4))
    H = build_h2(3)
    r = approx_nuclear_norm(T, [H], tol=1e-7, max_iter=20000)
    ref = sdp_oracle(T, H)
    assert r.u == pytest.approx(ref, rel=1e-4)
    assert r.max_violation <= 1e-9


def test_order_four(rng):
    T = rng.standard_normal((2, 2, 3, 3))
    pm = build_classical(2, "pm_basis")
    r = approx_nuclear_norm(T, [pm, pm], tol=1e-7)
    assert r.Y.shape == T.shape
    assert r.max_violation <= 1e-9
    # with ±basis on both modes the constraints split over the 2x2 slices
    ref = sum(nuclear_norm_matrix(T[i, j]) for i in range(2) for j in range(2))
    assert r.u == pytest.approx(ref, rel=1e-4)


def test_uncertified_flag(rng):
    T = rng.standard_normal((3, 3, 3))
    r = approx_nuclear_norm(T, [build_random(3, 12, 0)])
    assert not r.certified and math.isnan(r.lower)


def test_non_spanning_set_rejected():
    with pytest.raises(DegenerateError):
        approx_nuclear_norm(np.ones((3, 3, 3)), [build_classical(3, "antipodal")])


def test_non_convergence_reported(rng):
    T = rng.standard_normal((4, 5, 5))
    r = approx_nuclear_norm(T, [build_h4(4)], max_iter=3)
    assert not r.converged and r.iterations == 3
    assert r.max_violation <= 1e-12


def test_determinism(rng):
    T = rng.standard_normal((3, 4, 4))
    a = approx_nuclear_norm(T, [build_h2(3)], max_iter=300)
    b = approx_nuclear_norm(T, [build_h2(3)], max_iter=300)
    assert a.u == b.u
    np.testing.assert_array_equal(a.Y, b.Y)


def test_flattening_baseline():
    x, y, z = np.eye(2)[0], np.array([0.6, 0.8]), np.array([0.0, 1.0])
    assert flattening_baseline(2.5 * outer(x, y, z)) == pytest.approx(2.5)
    inst = gen_odeco((3, 3, 3), r=2, seed=1, weights=[2.0, 1.0])
    # make x orthogonal as well so every flattening keeps the weights
    X = np.linalg.qr(inst.X)[0]
    T = np.einsum("r,ir,jr,kr->ijk", inst.weights, X, inst.Y, inst.Z)
    assert flattening_baseline(T) == pytest.approx(3.0)
    with pytest.raises(ShapeError):
        flattening_baseline(np.zeros((2, 2, 2, 2)))
    T = np.random.default_rng(5).standard_normal((3, 3, 3))
    r = approx_nuclear_norm(T, [build_classical(3, "pm_basis")])
    assert flattening_baseline(T) <= r.u + 1e-5
    for k in range(3):
        M = unfold(T, k)
        assert nuclear_norm_matrix(M) == pytest.approx(
            np.sqrt(np.linalg.eigvalsh(M @ M.T)).sum(), rel=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_random_upper_bounds_baseline(seed):
    T = np.random.default_rng(100 + seed).standard_normal((3, 3, 3))
    r = approx_nuclear_norm(T, [build_h2(3)])
    assert flattening_baseline(T) <= r.u + 1e-5
