"""Estimator-style wrappers around the norm approximations.

``fit`` takes a single tensor (not a sample matrix), so these follow the
scikit-learn parameter conventions (``get_params``/``set_params``, fitted
attributes with a trailing underscore) without being usable in pipelines.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .covering.sets import DEFAULT_BUDGET
from .nuclear import CONSTRAINT_BUDGET, assemble_problem, solve_nuclear_sdp
from .spectral import als_refine, approx_spectral_norm
from .tensor import check_tensor


def validate_tensor(X, min_order=3):
    """Finite float64 array of order ``min_order`` to 6."""
    X = check_array(X, allow_nd=True, ensure_2d=False, dtype=np.float64,
                    ensure_min_samples=1)
    return check_tensor(X, min_order=min_order)


class SpectralNormApproximator(BaseEstimator):
    """Approximate the spectral norm of a tensor by hitting-set enumeration.

    Parameters
    ----------
    hitting_sets : list of HittingSet, optional
        One set per enumerated mode; the composed multi-level sets are used
        when omitted.
    refine : bool
        Run ALS from the enumerated solution.
    max_iter, tol : ALS sweep cap and relative tolerance.
    budget : int
        Cap on enumerated tuples.

    Attributes
    ----------
    value_ : float
        Final value (refined when ``refine``).
    solution_ : tuple of ndarray
    bound_factor_ : float
        Guaranteed ratio of the enumerated value to the spectral norm.
    enumerated_value_ : float
    result_ : SpectralApproxResult
    """

    def __init__(self, hitting_sets=None, refine=True, max_iter=500, tol=1e-10,
                 budget=DEFAULT_BUDGET):
        self.hitting_sets = hitting_sets
        self.refine = refine
        self.max_iter = max_iter
        self.tol = tol
        self.budget = budget

    def fit(self, X, y=None):
        T = validate_tensor(X)
        res = approx_spectral_norm(T, self.hitting_sets, self.budget)
        self.enumerated_value_ = res.value
        self.bound_factor_ = res.bound_factor
        if self.refine:
            res = als_refine(T, res, self.max_iter, self.tol)
        self.result_ = res
        self.value_ = res.value
        self.solution_ = res.solution
        return self

    def score(self, X=None, y=None):
        check_is_fitted(self, "value_")
        return self.value_


class NuclearNormApproximator(BaseEstimator):
    """Bound the nuclear norm of a tensor with the hitting-set relaxation.

    Parameters
    ----------
    hitting_sets : list of HittingSet, optional
    tol : float
    max_iter : int
    budget : int
        Cap on the number of spectral-ball constraints.

    Attributes
    ----------
    upper_ : float
        Relaxation value, an upper bound.
    lower_ : float
        Certified lower bound (``nan`` for uncertified sets).
    Y_ : ndarray
    converged_ : bool
    result_ : NuclearApproxResult
    """

    def __init__(self, hitting_sets=None, tol=1e-6, max_iter=5000,
                 budget=CONSTRAINT_BUDGET):
        self.hitting_sets = hitting_sets
        self.tol = tol
        self.max_iter = max_iter
        self.budget = budget

    def fit(self, X, y=None):
        T = validate_tensor(X)
        res = solve_nuclear_sdp(assemble_problem(T, self.hitting_sets, self.budget),
                                self.tol, self.max_iter)
        self.result_ = res
        self.upper_ = res.upper
        self.lower_ = res.lower
        self.Y_ = res.Y
        self.converged_ = res.converged
        return self

    def score(self, X=None, y=None):
        check_is_fitted(self, "upper_")
        return self.upper_
