"""Simulation and verification toolkit for empirical processes of associated sequences."""

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
from .sequence_gen import (  # noqa: E402,F401
    build_gaussian_linear_model,
    exponential,
    latent_autocorrelation,
    sample_paths,
    uniform01,
    uniform_pair_covariance,
    verify_decay_certificate,
)
from .empirical import (  # noqa: E402,F401
    compute_empirical_process,
    custom_grid,
    dyadic_grid,
    empirical_process_matrix,
    uniform_grid,
)
from .limit import bivariate_normal_cdf, limit_covariance_matrix, sample_limit_process  # noqa: E402,F401
