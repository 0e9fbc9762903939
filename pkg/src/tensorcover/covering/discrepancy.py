"""Coverage quality of a hitting set.

:func:`estimate_tau` searches for the sphere point farthest from the set
(an upper bound on the true covering level), :func:`verify_cover` proves a
covering level by checking a net fine enough to absorb the gap between
net points and the rest of the sphere.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.special import softmax

from ..exceptions import BudgetError, ParameterError
from .constructions import _grid_points, grid_cardinality, grid_tau, sample_sphere

DESCENT_STEPS = 400


@dataclass(frozen=True)
class CoverReport:
    """Outcome of a coverage analysis.

    Attributes
    ----------
    estimated_tau : float
        Smallest ``max_i v_i . x`` seen over the examined points ``x``. It is
        an upper bound on the true covering level.
    witness : ndarray
        The point attaining ``estimated_tau``.
    certified_at : tuple or None
        ``(tau, m)`` when the cover was proven at level ``tau`` with a net of
        angular spacing ``pi/m``.
    samples_used : int
        Number of sphere points evaluated.
    """

    estimated_tau: float
    witness: np.ndarray
    certified_at: Optional[Tuple[float, int]]
    samples_used: int

    @property
    def certified(self):
        return self.certified_at is not None


def _cover_values(V, X, chunk=1 << 16):
    out = np.empty(X.shape[0])
    for s in range(0, X.shape[0], chunk):
        out[s:s + chunk] = np.max(X[s:s + chunk] @ V.T, axis=1)
    return out


def _polish(V, x0):
    # min t  s.t.  V x <= t,  |x|^2 = 1
    n = V.shape[1]
    z0 = np.append(x0, np.max(V @ x0))
    cons = [
        {"type": "ineq", "fun": lambda z: z[-1] - V @ z[:n],
         "jac": lambda z: np.hstack([-V, np.ones((V.shape[0], 1))])},
        {"type": "eq", "fun": lambda z: z[:n] @ z[:n] - 1.0,
         "jac": lambda z: np.append(2.0 * z[:n], 0.0)},
    ]
    res = minimize(lambda z: z[-1], z0, jac=lambda z: np.eye(n + 1)[-1],
                   constraints=cons, method="SLSQP",
                   options={"maxiter": 200, "ftol": 1e-14})
    x = res.x[:n]
    nx = np.linalg.norm(x)
    return x / nx if nx > 0 else x0


def estimate_tau(H, restarts=200, seed=0, polish=8):
    """Heuristic minimizer of ``f(x) = max_i v_i . x`` over the unit sphere.

    Random starts and the points of a coarse spherical grid are descended
    together on a log-sum-exp smoothing of ``f`` whose temperature is
    annealed from 10 to 1000, with a renormalization after each step. The
    best few end points are then polished by SLSQP on the epigraph form.
    The returned value is ``f`` evaluated at an actual unit vector, so it
    never lies below the true covering level.

    Parameters
    ----------
    H : HittingSet
    restarts : int
        Number of random starting points.
    seed : int
    polish : int
        How many of the best candidates get the SLSQP polish.
    """
    if restarts < 1:
        raise ParameterError(f"restarts must be >= 1, got {restarts}")
    V = H.vectors
    n = H.n
    rng = np.random.default_rng(seed)
    if n == 1:
        X = np.array([[1.0], [-1.0]])
        vals = _cover_values(V, X)
        k = int(np.argmin(vals))
        return CoverReport(float(vals[k]), X[k], None, 2)

    starts = [sample_sphere(n, restarts, rng)]
    m = 2
    while grid_cardinality(n, m + 1) <= restarts:
        m += 1
    if grid_cardinality(n, m) <= 4 * restarts:
        starts.append(_grid_points(n, m))
    X = np.vstack(starts)
    samples = X.shape[0]

    best_val = _cover_values(V, X)
    best_x = X.copy()
    for t in range(DESCENT_STEPS):
        temp = 10.0 * 100.0 ** (t / (DESCENT_STEPS - 1))
        S = X @ V.T
        W = softmax(temp * S, axis=1)
        G = W @ V
        G -= np.sum(G * X, axis=1, keepdims=True) * X
        X = X - (0.5 / math.sqrt(t + 1)) * G
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        vals = np.max(X @ V.T, axis=1)
        better = vals < best_val
        best_val[better] = vals[better]
        best_x[better] = X[better]

    order = np.argsort(best_val, kind="stable")[:max(0, polish)]
    for k in order:
        x = _polish(V, best_x[k])
        v = float(np.max(V @ x))
        samples += 1
        if v < best_val[k]:
            best_val[k], best_x[k] = v, x

    k = int(np.argmin(best_val))
    return CoverReport(float(best_val[k]), best_x[k].copy(), None, samples)


def _sphere_from_angles(P):
    """Map spherical coordinates ``(phi_1, ..., phi_{n-1})`` to ``R^n``."""
    k, d = P.shape
    X = np.empty((k, d + 1))
    s = np.ones(k)
    for i in range(d):
        X[:, i] = s * np.cos(P[:, i])
        s = s * np.sin(P[:, i])
    X[:, d] = s
    return X


def _certify_threshold(tau, theta):
    gap = math.acos(max(-1.0, min(1.0, tau))) - theta
    return math.cos(gap) if gap >= 0 else math.inf


def _verify_uniform(H, tau, grid_m, budget):
    n = H.n
    count = grid_cardinality(n, grid_m)
    if budget is not None and count > budget:
        raise BudgetError(
            f"verification grid(n={n}, m={grid_m}) has {count} points, above "
            f"the budget of {budget}; use estimate_tau for a heuristic value")
    Y = _grid_points(n, grid_m)
    vals = _cover_values(H.vectors, Y)
    theta = math.acos(grid_tau(n, grid_m))
    k = int(np.argmin(vals))
    ok = vals[k] >= _certify_threshold(tau, theta)
    return CoverReport(float(vals[k]), Y[k].copy(),
                       (float(tau), int(grid_m)) if ok else None, Y.shape[0])


def _verify_adaptive(H, tau, budget, max_depth=30):
    n = H.n
    V = H.vectors
    d = n - 1
    # level-0 boxes: polar angles over [0, pi], azimuth over [0, 2pi)
    h = np.full(d, math.pi / 4)
    h[-1] = math.pi / 2
    axes = [np.array([math.pi / 4, 3 * math.pi / 4])] * (d - 1)
    axes.append(np.array([math.pi / 2, 3 * math.pi / 2]))
    C = np.array(np.meshgrid(*axes, indexing="ij")).reshape(d, -1).T
    offsets = np.array(np.meshgrid(*([[-0.5, 0.5]] * d), indexing="ij")).reshape(d, -1).T

    used = 0
    best_val, best_x = math.inf, None
    for depth in range(max_depth):
        if budget is not None and used + C.shape[0] > budget:
            raise BudgetError(
                f"adaptive verification needs more than {budget} points; "
                f"use estimate_tau for a heuristic value")
        X = _sphere_from_angles(C)
        vals = _cover_values(V, X)
        used += X.shape[0]
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val, best_x = float(vals[k]), X[k].copy()
        if best_val < tau:
            # an actual sphere point is covered below tau; push it to the
            # farthest point nearby for a more informative witness
            x = _polish(V, best_x)
            v = float(np.max(V @ x))
            if v < best_val:
                best_val, best_x = v, x
            return CoverReport(best_val, best_x, None, used + 1)
        chord = float(np.linalg.norm(h))
        theta = 2.0 * math.asin(min(1.0, chord / 2.0)) if chord < 2.0 else math.pi
        open_ = vals < _certify_threshold(tau, theta)
        if not np.any(open_):
            m_eff = max(1, int(math.ceil(math.pi / (2.0 * float(np.max(h))))))
            return CoverReport(best_val, best_x, (float(tau), m_eff), used)
        h = h / 2.0
        C = (C[open_][:, None, :] + offsets[None, :, :] * (2.0 * h)).reshape(-1, d)
    return CoverReport(best_val, best_x, None, used)


def verify_cover(H, tau, grid_m=None, budget=10_000_000):
    """Prove that the caps of ``H`` at level ``tau`` cover the sphere.

    With ``grid_m`` given, every point ``y`` of ``build_grid(n, grid_m)``
    must satisfy ``max_i v_i . y >= cos(arccos(tau) - theta_g)`` where
    ``theta_g`` is the grid's angular covering radius; then every sphere
    point is within angle ``arccos(tau)`` of some ``v_i``.

    With ``grid_m=None`` the net is refined adaptively: spherical-coordinate
    boxes whose centre clears the threshold for the box radius are accepted,
    the rest are split in half along every angle. ``certified_at`` then holds
    the spacing of the finest boxes used.

    A point whose value falls below ``tau`` itself disproves the cover and is
    returned as the witness.
    """
    if not -1.0 <= tau <= 1.0:
        raise ParameterError(f"tau must lie in [-1, 1], got {tau}")
    if H.n == 1:
        X = np.array([[1.0], [-1.0]])
        vals = _cover_values(H.vectors, X)
        k = int(np.argmin(vals))
        ok = vals[k] >= tau
        return CoverReport(float(vals[k]), X[k], (float(tau), 1) if ok else None, 2)
    if grid_m is not None:
        if int(grid_m) != grid_m or grid_m < 1:
            raise ParameterError(f"grid_m must be a positive integer, got {grid_m}")
        return _verify_uniform(H, tau, int(grid_m), budget)
    return _verify_adaptive(H, tau, budget)
