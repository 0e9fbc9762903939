"""Tensor spectral norm by enumerating hitting sets, ALS refinement and
homogeneous polynomial optimization over the sphere.
"""

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .covering.constructions import (GOLDEN_ALPHA, GOLDEN_BETA, build_classical,
                                     build_h4, build_h5)
from .covering.sets import DEFAULT_BUDGET
from .exceptions import (BudgetError, DegenerateError, ParameterError,
                         ShapeError, SymmetryError)
from .linalg import spectral_norm_matrix
from .tensor import HOLE, check_tensor, is_symmetric, multilinear_form, partial_contract

TIE_RTOL = 1e-12


@dataclass(frozen=True)
class SpectralApproxResult:
    """Approximate spectral norm with its certificate.

    Attributes
    ----------
    value : float
        ``T(z_1, ..., z_d)`` for the returned unit vectors.
    solution : tuple of ndarray
        Unit vectors ``z_1, ..., z_d`` in the original mode order.
    bound_factor : float
        Product of the covering levels of the enumerated sets; ``value`` is
        at least ``bound_factor`` times the spectral norm. ``nan`` when a set
        is not certified.
    enumerated_count : int
        Number of enumerated tuples (matrix problems solved).
    mode_permutation : tuple of int
        Mode order used internally; the first ``d - 2`` modes are enumerated.
    iterations : int
        ALS sweeps performed (0 for a plain enumeration).
    degenerate : bool
        Set by ALS when a contraction vanished.
    """

    value: float
    solution: tuple
    bound_factor: float
    enumerated_count: int
    mode_permutation: tuple
    iterations: int = 0
    degenerate: bool = False
    history: tuple = field(default=(), repr=False)


def mode_order(shape):
    """Stable ordering of the modes by dimension (smallest first)."""
    return tuple(int(k) for k in np.argsort(shape, kind="stable"))


def default_hitting_set(n, budget=DEFAULT_BUDGET):
    """Multi-level composed set at the golden parameters, falling back to the
    ternary composition when that exceeds the budget."""
    if n == 1:
        return build_classical(1, "pm_basis")
    try:
        return build_h5(n, GOLDEN_ALPHA, GOLDEN_BETA, budget)
    except BudgetError:
        return build_h4(n, budget)


def match_hitting_sets(shape, Hs, budget=DEFAULT_BUDGET):
    """Assign hitting sets to the ``d - 2`` smallest modes.

    Returns ``(perm, sets)`` where ``sets[k]`` covers mode ``perm[k]``. Sets
    are matched to modes by dimension; ``Hs=None`` builds the defaults.
    """
    d = len(shape)
    perm = mode_order(shape)
    dims = [shape[p] for p in perm[:d - 2]]
    if Hs is None:
        return perm, [default_hitting_set(n, budget) for n in dims]
    Hs = list(Hs)
    if len(Hs) != d - 2:
        raise ShapeError(f"order-{d} tensor needs {d - 2} hitting sets, got {len(Hs)}")
    order = np.argsort([H.n for H in Hs], kind="stable")
    sets = [Hs[i] for i in order]
    if [H.n for H in sets] != dims:
        raise ShapeError(
            f"hitting-set dimensions {sorted(H.n for H in Hs)} do not match the "
            f"enumerated mode dimensions {dims}")
    return perm, sets


def bound_factor_of(sets):
    if not all(H.certified for H in sets):
        return math.nan
    return float(np.prod([H.claimed_tau for H in sets]))


def contract_stack(Tp, sets):
    """Contract the leading modes of ``Tp`` with every tuple of set vectors.

    Returns an array of shape ``(prod |H_k|, n_{d-1}, n_d)`` whose rows follow
    the lexicographic tuple order.
    """
    out = Tp
    for k, H in enumerate(sets):
        # contract axis k (the next un-enumerated mode) with all vectors of H
        out = np.moveaxis(np.tensordot(out, H.vectors, axes=([k], [1])), -1, k)
    return out.reshape((-1,) + Tp.shape[-2:])


def approx_spectral_norm(T, Hs=None, budget=DEFAULT_BUDGET, chunk=4096):
    """Spectral norm from below by enumerating hitting sets on ``d - 2`` modes.

    Every tuple ``(z_1, ..., z_{d-2})`` from the product of the hitting sets
    leaves the matrix ``T(z_1, ..., z_{d-2}, ., .)``; the tuple whose matrix
    has the largest singular value wins (first in lexicographic order on
    ties). Modes are reordered so the smallest ``d - 2`` dimensions are
    enumerated.

    Parameters
    ----------
    T : array_like of order ``d >= 3``
    Hs : sequence of HittingSet, optional
        One set per enumerated mode; matched to modes by dimension.
    budget : int
        Cap on the number of enumerated tuples and on default set sizes.

    Returns
    -------
    SpectralApproxResult
    """
    T = check_tensor(T, min_order=3)
    d = T.ndim
    perm, sets = match_hitting_sets(T.shape, Hs, budget)
    count = int(np.prod([len(H) for H in sets]))
    if budget is not None and count > budget:
        raise BudgetError(f"{count} tuples to enumerate, above the budget of {budget}")
    Tp = np.transpose(T, perm)

    # chunk over the first enumerated set to bound memory
    first, rest = sets[0], sets[1:]
    per_first = int(np.prod([len(H) for H in rest])) if rest else 1
    step = max(1, chunk // per_first)
    sigmas = []
    for s in range(0, len(first), step):
        sub = _SubSet(first.vectors[s:s + step])
        M = contract_stack(Tp, [sub] + rest)
        sigmas.append(np.linalg.svd(M, compute_uv=False)[:, 0])
    sig = np.concatenate(sigmas)
    best = float(np.max(sig))
    idx = int(np.argmax(sig >= best * (1.0 - TIE_RTOL)))

    # recover the winning tuple and its matrix
    sizes = [len(H) for H in sets]
    picks = np.unravel_index(idx, sizes)
    zs = [H.vectors[i].copy() for H, i in zip(sets, picks)]
    M = partial_contract(Tp, zs + [HOLE, HOLE])
    value, u, v = spectral_norm_matrix(M)
    zs += [u, v]
    solution = [None] * d
    for k, p in enumerate(perm):
        solution[p] = zs[k]
    return SpectralApproxResult(value, tuple(solution), bound_factor_of(sets),
                                count, perm)


class _SubSet:
    """Row slice of a hitting set, enough for :func:`contract_stack`."""

    def __init__(self, vectors):
        self.vectors = vectors

    def __len__(self):
        return self.vectors.shape[0]


def als_refine(T, start, max_iter=500, tol=1e-10):
    """Alternating maximization of ``T(x_1, ..., x_d)`` over unit vectors.

    Each sweep replaces ``x_k`` by the normalized contraction of ``T`` with
    all other vectors, for ``k = 1..d``. Stops when the relative change of the
    objective over a sweep is below ``tol``.

    Parameters
    ----------
    T : array_like
    start : sequence of vectors or SpectralApproxResult
    max_iter : int
        Maximum number of sweeps.
    tol : float

    Returns
    -------
    SpectralApproxResult
        ``degenerate`` is set, and the start returned unchanged, when a
        contraction vector is zero.
    """
    T = check_tensor(T, min_order=2)
    base = start if isinstance(start, SpectralApproxResult) else None
    xs = list(base.solution if base is not None else start)
    if len(xs) != T.ndim:
        raise ShapeError(f"expected {T.ndim} start vectors, got {len(xs)}")
    xs = [np.asarray(x, dtype=np.float64).copy() for x in xs]
    orig = [x.copy() for x in xs]
    norms = [np.linalg.norm(x) for x in xs]
    if any(abs(nx - 1.0) > 1e-8 for nx in norms):
        raise ParameterError("start vectors must be unit length")
    factor = base.bound_factor if base is not None else math.nan
    count = base.enumerated_count if base is not None else 0
    perm = base.mode_permutation if base is not None else tuple(range(T.ndim))

    value = multilinear_form(T, xs)
    history = [value]
    it = 0
    for it in range(1, max_iter + 1):
        new = [x.copy() for x in xs]
        for k in range(T.ndim):
            g = partial_contract(T, new[:k] + [HOLE] + new[k + 1:])
            ng = np.linalg.norm(g)
            if ng == 0.0:
                return SpectralApproxResult(history[0], tuple(orig), factor,
                                            count, perm, it, True, tuple(history))
            new[k] = g / ng
        xs = new
        prev, value = value, multilinear_form(T, xs)
        history.append(value)
        if abs(value - prev) <= tol * abs(value):
            break
    return SpectralApproxResult(value, tuple(xs), factor, count, perm, it, False,
                                tuple(history))


def _check_symmetric(T):
    ok, dev = is_symmetric(T)
    if not ok:
        raise SymmetryError(dev)


def _poly(T, x):
    return multilinear_form(T, [x] * T.ndim)


def polarization_eval(T, xs):
    """Multilinear form of a symmetric tensor recovered from its polynomial.

    Computes ``2**-d * sum_xi prod(xi) * p(sum_k xi_k x_k)`` over all sign
    vectors ``xi``, where ``p(x) = T(x, ..., x)``. For symmetric ``T`` this
    equals ``d! * T(x_1, ..., x_d)``.
    """
    T = check_tensor(T, min_order=1)
    d = T.ndim
    if d > 12:
        raise ParameterError(f"order {d} exceeds 12 (2**d sign patterns)")
    _check_symmetric(T)
    if len(xs) != d:
        raise ShapeError(f"expected {d} vectors, got {len(xs)}")
    X = np.array([np.asarray(x, dtype=np.float64) for x in xs])
    total = 0.0
    for signs in product((1.0, -1.0), repeat=d):
        xi = np.array(signs)
        total += np.prod(xi) * _poly(T, xi @ X)
    return total / 2 ** d


def approx_poly_opt(T, H, budget=DEFAULT_BUDGET):
    """Approximate maximizer of ``p(x) = T(x, ..., x)`` on the unit sphere.

    The spectral enumeration with ``H`` on ``d - 2`` modes yields vectors
    ``z_1, ..., z_d``; every normalized signed sum ``sum_k xi_k z_k`` is tried
    and the one with the largest ``p`` returned. For odd ``d`` and certified
    ``H`` the value is at least ``d! d**-d`` times the covering-level product
    times ``max p``.

    Returns
    -------
    z : ndarray
    value : float
    """
    T = check_tensor(T, min_order=3)
    _check_symmetric(T)
    d = T.ndim
    res = approx_spectral_norm(T, [H] * (d - 2), budget)
    Z = np.array(res.solution)
    best_val, best_z = -math.inf, None
    for signs in product((1.0, -1.0), repeat=d):
        w = np.array(signs) @ Z
        nw = np.linalg.norm(w)
        if nw < 1e-14:
            continue
        z = w / nw
        val = _poly(T, z)
        if val > best_val:
            best_val, best_z = val, z
    if best_z is None:  # pragma: no cover - needs all signed sums to vanish
        raise DegenerateError("every signed combination of the solution vectors vanishes")
    return best_z, float(best_val)
