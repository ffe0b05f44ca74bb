"""MCMC sampler for the TVP-SV regression with triple-Gamma shrinkage."""

from .chain import PosteriorDraws, SamplerConfig, run_chain, stream, sweep
from .geweke import GewekeReport, getting_it_right
from .gig import rgig
from .shrinkage import draw_shrinkage_hierarchy
from .states import asis_interweave, draw_beta0_and_scales, draw_states
from .volatility import draw_stochastic_volatility

__all__ = [
    "GewekeReport",
    "PosteriorDraws",
    "SamplerConfig",
    "asis_interweave",
    "draw_beta0_and_scales",
    "draw_shrinkage_hierarchy",
    "draw_states",
    "draw_stochastic_volatility",
    "getting_it_right",
    "rgig",
    "run_chain",
    "stream",
    "sweep",
]
