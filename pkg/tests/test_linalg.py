import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tensorcover.exceptions import NumericError, ShapeError
from tensorcover.linalg import (jacobi_svd, nuclear_norm_matrix, power_iteration,
                                project_spectral_ball, spectral_norm_matrix,
                                thin_svd)

METHODS = ["lapack", "power"]


def eig_oracle(A):
    return np.sqrt(np.maximum(np.linalg.eigvalsh(A.T @ A)[::-1], 0.0))


@pytest.mark.parametrize("method", METHODS)
def test_spectral_trivial(method):
    value, u, v = spectral_norm_matrix(np.eye(2), method)
    assert value == pytest.approx(1.0)
    value, u, v = spectral_norm_matrix(np.diag([3.0, 2.0]), method)
    assert value == pytest.approx(3.0, rel=1e-12)
    # a Rayleigh-quotient stopping rule pins vectors to about sqrt(tol)
    np.testing.assert_allclose(u, [1, 0], atol=1e-6)
    np.testing.assert_allclose(v, [1, 0], atol=1e-6)


@pytest.mark.parametrize("method", METHODS)
def test_spectral_eig_oracle(method):
    A = np.random.default_rng(11).standard_normal((5, 4))
    value, u, v = spectral_norm_matrix(A, method)
    assert value == pytest.approx(eig_oracle(A)[0], rel=1e-9)
    assert u @ A @ v == pytest.approx(value, rel=1e-10)
    assert np.linalg.norm(u) == pytest.approx(1, abs=1e-10)
    assert np.linalg.norm(v) == pytest.approx(1, abs=1e-10)


def test_power_start_orthogonal_to_top():
    # all-ones start lies in the span of the small singular direction
    A = np.array([[1.0, 1.0], [-3.0, 3.0]]) / np.sqrt(2)
    value, u, v, _ = power_iteration(A)
    assert value == pytest.approx(3.0, rel=1e-9)


def test_spectral_errors():
    with pytest.raises(NumericError):
        spectral_norm_matrix(np.array([[np.inf]]))
    with pytest.raises(ShapeError):
        spectral_norm_matrix(np.zeros((0, 2)))


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_thin_svd(method):
    assert np.allclose(thin_svd(np.diag([2.0, 1.0]), method).s, [2, 1])
    x = np.array([2.0, 0.0, 0.0])
    y = np.array([0.0, 3.0])
    np.testing.assert_allclose(thin_svd(np.outer(x, y), method).s, [6, 0], atol=1e-12)
    A = np.random.default_rng(3).standard_normal((6, 6))
    r = thin_svd(A, method)
    np.testing.assert_allclose(r.s, eig_oracle(A), rtol=1e-9)
    np.testing.assert_allclose(r.U @ np.diag(r.s) @ r.Vt, A, atol=1e-10)


@pytest.mark.parametrize("shape", [(7, 3), (3, 7), (4, 4)])
def test_jacobi_matches_lapack(shape, rng):
    A = rng.standard_normal(shape)
    r = jacobi_svd(A)
    np.testing.assert_allclose(r.s, np.linalg.svd(A, compute_uv=False), rtol=1e-11)
    np.testing.assert_allclose(r.U.T @ r.U, np.eye(r.U.shape[1]), atol=1e-11)
    np.testing.assert_allclose(r.Vt @ r.Vt.T, np.eye(r.Vt.shape[0]), atol=1e-11)
    np.testing.assert_allclose(r.U @ np.diag(r.s) @ r.Vt, A, atol=1e-10)


def test_jacobi_sweep_cap_reports_residual(rng):
    with pytest.raises(NumericError, match="off-diagonal"):
        jacobi_svd(rng.standard_normal((5, 5)), max_sweeps=1)


def test_projection_trivial():
    A = np.diag([0.5, 0.2])
    np.testing.assert_array_equal(project_spectral_ball(A), A)
    np.testing.assert_allclose(project_spectral_ball(np.diag([3.0, 0.5])),
                               np.diag([1.0, 0.5]), atol=1e-12)


def test_projection_is_nearest(rng):
    A = rng.standard_normal((4, 4)) * 2
    P = project_spectral_ball(A)
    assert np.linalg.norm(P, 2) == pytest.approx(1.0, abs=1e-10)
    d0 = np.linalg.norm(P - A)
    for _ in range(10_000):
        Q = P + 0.05 * rng.standard_normal((4, 4))
        Q = Q / max(1.0, np.linalg.norm(Q, 2))
        assert np.linalg.norm(Q - A) >= d0 - 1e-12


def test_projection_batched(rng):
    A = rng.standard_normal((6, 3, 4)) * 3
    P = project_spectral_ball(A)
    for a, p in zip(A, P):
        np.testing.assert_allclose(p, project_spectral_ball(a), atol=1e-12)


def test_nuclear_norm_matrix(rng):
    A = rng.standard_normal((5, 4))
    assert nuclear_norm_matrix(A) == pytest.approx(eig_oracle(A).sum(), rel=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 20), st.integers(1, 20), st.integers(0, 2**31))
def test_spectral_matches_svd(m, n, seed):
    A = np.random.default_rng(seed).standard_normal((m, n))
    s1 = thin_svd(A).s[0]
    assert spectral_norm_matrix(A)[0] == pytest.approx(s1, rel=1e-10)
    assert spectral_norm_matrix(A, "power")[0] == pytest.approx(s1, rel=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**31), st.floats(0.1, 5))
def test_projection_properties(m, n, seed, scale):
    rng = np.random.default_rng(seed)
    A, B = scale * rng.standard_normal((2, m, n))
    PA, PB = project_spectral_ball(A), project_spectral_ball(B)
    assert np.linalg.norm(PA, 2) <= 1 + 1e-10
    np.testing.assert_allclose(project_spectral_ball(PA), PA, atol=1e-10)
    assert np.linalg.norm(PA - PB) <= np.linalg.norm(A - B) + 1e-10
