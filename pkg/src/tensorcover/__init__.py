"""Sphere coverings by spherical caps and certified tensor-norm approximations."""

from .bench import (ExperimentConfig, ExperimentSummary, OdecoInstance,
                    gen_odeco, run_nuclear_experiment, run_spectral_experiment,
                    summarize)
from .covering import (CoverReport, HittingSet, append_compose, build_classical,
                       build_grid, build_h2, build_h3, build_h4, build_h5,
                       build_random, estimate_tau, h3_formulas, h3_witness,
                       kron_compose, verify_cover)
from .estimators import NuclearNormApproximator, SpectralNormApproximator
from .exceptions import (BudgetError, DegenerateError, HypothesisError,
                         NumericError, ParameterError, ShapeError,
                         SymmetryError, TensorCoverError)
from .linalg import (SvdResult, project_spectral_ball, spectral_norm_matrix,
                     thin_svd)
from .nuclear import (NuclearApproxResult, NuclearSdpProblem,
                      approx_nuclear_norm, assemble_problem,
                      flattening_baseline, solve_nuclear_sdp)
from .spectral import (SpectralApproxResult, als_refine, approx_poly_opt,
                       approx_spectral_norm, polarization_eval)
from .tensor import (HOLE, frobenius_inner, load_tensor, multilinear_form,
                     partial_contract, save_tensor)

__version__ = "0.1.0"
