import numpy as np
import pytest
from sklearn.base import clone

from tensorcover.bench import gen_odeco
from tensorcover.covering import build_classical, build_h5
from tensorcover.estimators import (NuclearNormApproximator,
                                    SpectralNormApproximator, validate_tensor)
from tensorcover.exceptions import ShapeError


def test_spectral_estimator():
    inst = gen_odeco((5, 10, 10), seed=4)
    est = SpectralNormApproximator(hitting_sets=[build_h5(5)])
    assert est.fit(inst.tensor) is est
    assert est.enumerated_value_ >= est.bound_factor_ * inst.true_spectral
    assert est.value_ >= est.enumerated_value_
    assert len(est.solution_) == 3
    assert est.score() == est.value_
    raw = SpectralNormApproximator(refine=False).fit(inst.tensor)
    assert raw.value_ == raw.enumerated_value_


def test_params_round_trip():
    est = SpectralNormApproximator(refine=False, tol=1e-8)
    params = est.get_params()
    assert params["refine"] is False and params["tol"] == 1e-8
    c = clone(est).set_params(max_iter=7)
    assert c.max_iter == 7 and est.max_iter == 500
    assert NuclearNormApproximator().get_params()["budget"] == 5000


def test_nuclear_estimator():
    inst = gen_odeco((3, 3, 3), r=2, seed=0, weights=[2.0, 1.0])
    est = NuclearNormApproximator([build_classical(3, "pm_basis")]).fit(inst.tensor)
    assert est.lower_ - 1e-5 <= 3.0 <= est.upper_ + 1e-5
    assert est.Y_.shape == (3, 3, 3)
    assert est.converged_


def test_validation():
    with pytest.raises(ShapeError):
        validate_tensor(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        validate_tensor(np.full((2, 2, 2), np.nan))
    assert validate_tensor([[[1, 2]], [[3, 4]]]).dtype == np.float64
    from sklearn.exceptions import NotFittedError
    with pytest.raises(NotFittedError):
        SpectralNormApproximator().score()
