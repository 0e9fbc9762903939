"""Tensor nuclear norm from above (and certified from below) through a
hitting-set constrained semidefinite relaxation.

The relaxation maximizes ``<T, Z>`` subject to
``||Z(x_1, ..., x_{d-2}, ., .)||_sigma <= 1`` for every tuple of hitting-set
vectors. Each constraint is the Schur-complement form of a 2x2 block PSD
condition; here it is handled directly as a spectral-ball constraint by an
ADMM splitting.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .covering.sets import DEFAULT_BUDGET as SET_BUDGET
from .exceptions import BudgetError, DegenerateError, ShapeError
from .linalg import nuclear_norm_matrix, project_spectral_ball
from .spectral import bound_factor_of, contract_stack, match_hitting_sets
from .tensor import check_tensor, frobenius_inner, frobenius_norm, unfold

CONSTRAINT_BUDGET = 5000
RHO_CHECK = 50


@dataclass(frozen=True)
class NuclearSdpProblem:
    """Relaxation data in the internal mode order.

    Attributes
    ----------
    T : ndarray
        Tensor with modes permuted so the constrained modes come first.
    sets : list of HittingSet
        One set per constrained mode.
    mode_permutation : tuple of int
    shape : tuple of int
        Shape of the original tensor.
    """

    T: np.ndarray
    sets: list
    mode_permutation: tuple
    shape: tuple

    @property
    def constraint_count(self):
        return int(np.prod([len(H) for H in self.sets]))

    def slices(self, Z):
        """All constrained slices ``Z(x_1, ..., x_{d-2}, ., .)``."""
        return contract_stack(Z, self.sets)

    def adjoint(self, M):
        """Adjoint of :meth:`slices`: ``sum_x x_1 ⊗ ... ⊗ x_{d-2} ⊗ M_x``."""
        k = len(self.sets)
        out = M.reshape(tuple(len(H) for H in self.sets) + M.shape[-2:])
        for H in self.sets:
            # axis 0 is always the next tuple index to expand
            out = np.moveaxis(np.tensordot(out, H.vectors, axes=([0], [0])), -1, k - 1)
        return out


@dataclass(frozen=True)
class NuclearApproxResult:
    """Solution of the relaxation.

    Attributes
    ----------
    u : float
        ``<T, Y>``; an upper bound on the nuclear norm.
    Y : ndarray
        Feasible maximizer in the original mode order.
    lower, upper : float
        ``u`` times the product of covering levels, and ``u``. ``lower`` is
        ``nan`` for uncertified sets.
    max_violation : float
        ``max_x sigma_1(Y(x, ., .)) - 1``.
    primal_residual, dual_residual : float
        Final relative ADMM residuals.
    iterations : int
    converged : bool
    certified : bool
    """

    u: float
    Y: np.ndarray
    lower: float
    upper: float
    max_violation: float
    primal_residual: float
    dual_residual: float
    iterations: int
    converged: bool
    certified: bool


def assemble_problem(T, Hs=None, budget=CONSTRAINT_BUDGET, set_budget=SET_BUDGET):
    """Validate the tensor and hitting sets and fix the constraint family.

    Sets are matched to the ``d - 2`` smallest modes by dimension (defaults
    as for the spectral enumeration). The constraint count
    ``prod |H_k|`` must not exceed ``budget``.
    """
    T = check_tensor(T, min_order=3)
    perm, sets = match_hitting_sets(T.shape, Hs, set_budget)
    count = int(np.prod([len(H) for H in sets]))
    if budget is not None and count > budget:
        raise BudgetError(
            f"{count} spectral-ball constraints, above the budget of {budget}; "
            f"use smaller hitting sets")
    return NuclearSdpProblem(np.transpose(T, perm).copy(), sets, perm, T.shape)


def _gram_factors(P):
    facs = []
    for k, H in enumerate(P.sets):
        G = H.vectors.T @ H.vectors
        try:
            facs.append(cho_factor(G))
        except np.linalg.LinAlgError:
            raise DegenerateError(
                f"hitting set on constrained mode {k + 1} does not span its "
                f"space; the relaxation is unbounded") from None
    return facs


def _gram_solve(facs, X):
    # (G_1 ⊗ ... ⊗ G_{d-2} ⊗ I ⊗ I)^{-1} applied mode by mode
    for k, f in enumerate(facs):
        Xk = np.moveaxis(X, k, 0)
        sol = cho_solve(f, Xk.reshape(Xk.shape[0], -1)).reshape(Xk.shape)
        X = np.moveaxis(sol, 0, k)
    return X


def _feasible_scale(P, Z):
    s = np.linalg.svd(P.slices(Z), compute_uv=False)[:, 0]
    peak = float(np.max(s))
    return Z / max(1.0, peak), peak


def solve_nuclear_sdp(P, tol=1e-6, max_iter=5000):
    """Solve the relaxation by ADMM with spectral-ball projections.

    With auxiliary matrices ``M_x = A_x(Z)`` constrained to the unit
    spectral ball, each iteration updates ``Z`` in closed form through the
    Gram operator ``sum_x A_x^T A_x`` (a Kronecker product of the per-mode
    Gram matrices of the hitting sets), projects every ``A_x(Z) + U_x``
    onto the ball, and advances the scaled duals. The penalty starts at 1
    and is doubled or halved every 50 iterations when one residual exceeds
    the other tenfold.

    The returned ``Y`` is the best iterate rescaled to be exactly feasible.

    Parameters
    ----------
    P : NuclearSdpProblem
    tol : float
        Relative primal and dual residual target.
    max_iter : int

    Returns
    -------
    NuclearApproxResult
    """
    T = P.T
    facs = _gram_factors(P)
    rho = 1.0
    Z = T / frobenius_norm(T) if np.any(T) else T.copy()
    AZ = P.slices(Z)
    M = project_spectral_ball(AZ)
    U = np.zeros_like(M)

    best_u, best_Y = -math.inf, None
    r_rel = s_rel = math.inf
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        Z = _gram_solve(facs, T / rho + P.adjoint(M - U))
        AZ = P.slices(Z)
        M_old = M
        M = project_spectral_ball(AZ + U)
        R = AZ - M
        U = U + R

        r = np.linalg.norm(R)
        s = rho * np.linalg.norm(P.adjoint(M - M_old))
        r_rel = r / max(1.0, np.linalg.norm(AZ), np.linalg.norm(M))
        s_rel = s / max(1.0, rho * np.linalg.norm(P.adjoint(U)))
        done = r_rel <= tol and s_rel <= tol
        if done or it % RHO_CHECK == 0 or it == max_iter:
            Y, _ = _feasible_scale(P, Z)
            u = frobenius_inner(T, Y)
            if u > best_u:
                best_u, best_Y = u, Y
        if done:
            converged = True
            break
        if it % RHO_CHECK == 0:
            if r > 10.0 * s:
                rho *= 2.0
                U /= 2.0
            elif s > 10.0 * r:
                rho /= 2.0
                U *= 2.0

    Y = best_Y
    peak = float(np.max(np.linalg.svd(P.slices(Y), compute_uv=False)[:, 0]))
    factor = bound_factor_of(P.sets)
    certified = not math.isnan(factor)
    inv = np.argsort(P.mode_permutation)
    return NuclearApproxResult(
        u=best_u, Y=np.transpose(Y, inv).copy(),
        lower=best_u * factor if certified else math.nan, upper=best_u,
        max_violation=peak - 1.0, primal_residual=float(r_rel),
        dual_residual=float(s_rel), iterations=it, converged=converged,
        certified=certified)


def approx_nuclear_norm(T, Hs=None, tol=1e-6, max_iter=5000,
                        budget=CONSTRAINT_BUDGET):
    """Assemble and solve in one call."""
    return solve_nuclear_sdp(assemble_problem(T, Hs, budget), tol, max_iter)


def flattening_baseline(T):
    """Largest matrix nuclear norm over the three mode flattenings; a lower
    bound on the tensor nuclear norm."""
    T = check_tensor(T, min_order=3, max_order=3)
    if T.ndim != 3:
        raise ShapeError(f"expected an order-3 tensor, got order {T.ndim}")
    return max(nuclear_norm_matrix(unfold(T, k)) for k in range(3))
