"""Growth-at-risk with a time-varying parameter regression and stochastic volatility."""

__version__ = "0.1.0"

from .errors import TvpGarError
from .forecast import QuantilePath, extract_quantiles, recursive_forecast, simulate_predictive
from .model import ModelParameters, TvpSvModelSpec
from .pipeline import RegressionDataset, assemble_dataset
from .qr import fit_quantile_regression, predict_quantile
from .sampler import PosteriorDraws, SamplerConfig, getting_it_right, run_chain
from .synthetic import DgpSpec, simulate_dgp

__all__ = [
    "DgpSpec",
    "ModelParameters",
    "PosteriorDraws",
    "QuantilePath",
    "RegressionDataset",
    "SamplerConfig",
    "TvpGarError",
    "TvpSvModelSpec",
    "__version__",
    "assemble_dataset",
    "extract_quantiles",
    "fit_quantile_regression",
    "getting_it_right",
    "predict_quantile",
    "recursive_forecast",
    "run_chain",
    "simulate_dgp",
    "simulate_predictive",
]
