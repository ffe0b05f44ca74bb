"""Direct simulation from the model prior and likelihood."""

from __future__ import annotations

import numpy as np

from ..model import ModelParameters, TvpSvModelSpec
from . import shrinkage


def sample_sv_prior(spec: TvpSvModelSpec, T: int, rng) -> tuple[float, float, float, float, np.ndarray]:
    sv = spec.sv
    mu = sv.mu_prior_mean + np.sqrt(sv.mu_prior_var) * rng.standard_normal()
    rho = 2.0 * rng.beta(sv.rho_beta_a, sv.rho_beta_b) - 1.0
    theta2 = max(rng.gamma(sv.theta2_gamma_shape, 1.0 / sv.theta2_gamma_rate), 1e-12)
    theta = np.sqrt(theta2)
    h0 = mu + theta / np.sqrt(1.0 - rho * rho) * rng.standard_normal()
    w = theta * rng.standard_normal(T)
    h = np.empty(T)
    prev = h0
    for t in range(T):
        prev = mu + rho * (prev - mu) + w[t]
        h[t] = prev
    return mu, rho, theta2, h0, h


def sample_prior_parameters(spec: TvpSvModelSpec, T: int, rng) -> ModelParameters:
    K = spec.K
    s = spec.shrinkage
    sqrt_v, tau2_v, lam_v, a_v, c_v, k_v = shrinkage.sample_prior(s.v, K, rng, spec.fix_local_scales, spec.tau2_init)
    beta0, tau2_b, lam_b, a_b, c_b, k_b = shrinkage.sample_prior(s.beta, K, rng, spec.fix_local_scales, spec.tau2_init)
    states = np.cumsum(rng.standard_normal((T, K)), axis=0)
    mu, rho, theta2, h0, h = sample_sv_prior(spec, T, rng)
    return ModelParameters(
        beta0=beta0, sqrt_v=sqrt_v, states_tilde=states, log_vol=h, log_vol0=float(h0),
        mu_sigma=float(mu), rho_sigma=float(rho), theta2=float(theta2),
        tau2_v=tau2_v, lambda_v=lam_v, tau2_beta=tau2_b, lambda_beta=lam_b,
        a_v=float(a_v), c_v=float(c_v), kappa_v=float(k_v), a_beta=float(a_b), c_beta=float(c_b), kappa_beta=float(k_b),
    )


def simulate_targets(p: ModelParameters, X: np.ndarray, rng) -> np.ndarray:
    mean = np.einsum("tk,tk->t", p.beta0 + p.states_tilde * p.sqrt_v, X)
    return mean + np.exp(0.5 * p.log_vol) * rng.standard_normal(X.shape[0])
