"""Matrix spectral machinery: top singular triplet, thin SVD, spectral-ball
projection.

The default backends are LAPACK through numpy; :func:`power_iteration` and
:func:`jacobi_svd` are self-contained alternatives selectable with
``method=``.
"""

from typing import NamedTuple

import numpy as np

from .exceptions import NumericError, ShapeError


class SvdResult(NamedTuple):
    U: np.ndarray
    s: np.ndarray
    Vt: np.ndarray


def _check_matrix(A):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.size == 0:
        raise ShapeError(f"expected a non-empty matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NumericError("matrix has non-finite entries")
    return A


def _fix_sign(u, v):
    # largest-magnitude entry of u made positive: deterministic output
    k = int(np.argmax(np.abs(u)))
    if u[k] < 0:
        return -u, -v
    return u, v


def power_iteration(A, tol=1e-12, max_iter=10_000):
    """Largest singular triplet by power iteration on the smaller Gram matrix.

    The start vector is the normalized all-ones vector. If the iteration
    stagnates immediately (the start may lie in a non-dominant singular
    subspace) starts perturbed towards each basis vector are tried until one
    reaches a larger value.

    Returns
    -------
    value, u, v, iterations
    """
    A = _check_matrix(A)
    transpose = A.shape[0] < A.shape[1]
    B = A.T if transpose else A
    G = B.T @ B
    n = G.shape[0]
    if not np.any(G):
        u = np.zeros(A.shape[0]); u[0] = 1.0
        v = np.zeros(A.shape[1]); v[0] = 1.0
        return 0.0, u, v, 0

    def run(x):
        x = x / np.linalg.norm(x)
        lam = float(x @ G @ x)
        it = 0
        for it in range(1, max_iter + 1):
            y = G @ x
            ny = np.linalg.norm(y)
            if ny == 0.0:
                break
            x = y / ny
            new = float(x @ G @ x)
            if abs(new - lam) <= tol * abs(new):
                lam = new
                break
            lam = new
        return lam, x, it

    lam, x, it = run(np.ones(n))
    # stagnation right away means the start may be a non-dominant singular
    # direction; compare with starts tilted towards each basis vector
    if it <= 2:
        for i in range(n):
            cand = run(np.ones(n) + np.sqrt(n) * np.eye(n)[i])
            if cand[0] > lam * (1.0 + 1e-12):
                lam, x, it = cand
                break

    # Rayleigh refinement in the original space
    v = x
    Bv = B @ v
    value = float(np.linalg.norm(Bv))
    u = Bv / value
    if transpose:
        u, v = v, u
    u, v = _fix_sign(u, v)
    return value, u, v, it


def spectral_norm_matrix(A, method="lapack"):
    """Largest singular value ``σ1(A)`` with unit singular vectors.

    Returns ``(value, u, v)`` with ``u @ A @ v == value``.
    """
    A = _check_matrix(A)
    if method == "power":
        value, u, v, _ = power_iteration(A)
        return value, u, v
    if method != "lapack":
        raise ValueError(f"unknown method {method!r}")
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    u, v = _fix_sign(U[:, 0].copy(), Vt[0].copy())
    return float(s[0]), u, v


def jacobi_svd(A, tol=1e-13, max_sweeps=60):
    """Thin SVD by one-sided (Hestenes) Jacobi rotations."""
    A = _check_matrix(A)
    transpose = A.shape[0] < A.shape[1]
    W = (A.T if transpose else A).copy()
    n = W.shape[1]
    V = np.eye(n)
    for sweep in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                a = W[:, i] @ W[:, i]
                b = W[:, j] @ W[:, j]
                g = W[:, i] @ W[:, j]
                if abs(g) <= tol * np.sqrt(a * b) or g == 0.0:
                    continue
                rotated = True
                zeta = (b - a) / (2.0 * g)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.hypot(1.0, t)
                s = c * t
                wi, wj = W[:, i].copy(), W[:, j]
                W[:, i] = c * wi - s * wj
                W[:, j] = s * wi + c * wj
                vi, vj = V[:, i].copy(), V[:, j]
                V[:, i] = c * vi - s * vj
                V[:, j] = s * vi + c * vj
        if not rotated:
            break
    else:
        off = max((abs(W[:, i] @ W[:, j]) for i in range(n) for j in range(i + 1, n)),
                  default=0.0)
        raise NumericError(
            f"Jacobi SVD did not converge in {max_sweeps} sweeps "
            f"(max off-diagonal {off:.3e})")

    s = np.linalg.norm(W, axis=0)
    order = np.argsort(-s, kind="stable")
    s, W, V = s[order], W[:, order], V[:, order]
    U = np.zeros_like(W)
    scale = s[0] if s[0] > 0 else 1.0
    for k in range(n):
        if s[k] > 1e-15 * scale:
            U[:, k] = W[:, k] / s[k]
        else:
            # complete to an orthonormal set for null directions
            cand = np.eye(W.shape[0])
            for e in cand:
                w = e - U[:, :k] @ (U[:, :k].T @ e)
                if np.linalg.norm(w) > 1e-8:
                    U[:, k] = w / np.linalg.norm(w)
                    break
            s[k] = 0.0
    if transpose:
        return SvdResult(V, s, U.T)
    return SvdResult(U, s, V.T)


def thin_svd(A, method="lapack"):
    """Thin SVD returning ``min(rows, cols)`` triplets, ``s`` non-increasing."""
    A = _check_matrix(A)
    if method == "jacobi":
        return jacobi_svd(A)
    if method != "lapack":
        raise ValueError(f"unknown method {method!r}")
    try:
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD failed: {exc}") from None
    return SvdResult(U, s, Vt)


def project_spectral_ball(A, radius=1.0):
    """Nearest matrix (Frobenius) with spectral norm at most ``radius``.

    Singular values above ``radius`` are clipped. Works on a single matrix or
    a stack of matrices along the leading axis.
    """
    A = np.asarray(A, dtype=np.float64)
    if not np.all(np.isfinite(A)):
        raise NumericError("matrix has non-finite entries")
    try:
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD failed: {exc}") from None
    over = s > radius
    if not np.any(over):
        return A.copy()
    # only subtract the excess so inputs inside the ball come back unchanged
    excess = np.where(over, s - radius, 0.0)
    return A - (U * excess[..., None, :]) @ Vt


def nuclear_norm_matrix(A):
    return float(np.sum(np.linalg.svd(np.asarray(A, dtype=np.float64), compute_uv=False)))
