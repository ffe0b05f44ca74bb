"""Stochastic-volatility block via the auxiliary mixture sampler.

``log r_t^2 = h_t + log chi^2_1`` with the log chi^2_1 density replaced by
the 10-component Gaussian mixture of Omori, Chib, Shephard & Nakajima (2007).
Given the indicators, ``h_{0:T}`` is conditionally Gaussian with a
tridiagonal precision and is drawn in one banded solve. The AR(1)
parameters are updated in the centered parameterization and then
``(mu, theta)`` once more in the non-centered one (ASIS).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from ..model import SvPriorConfig
from .banded import sample_banded

MIX_PROB = np.array([0.00609, 0.04775, 0.13057, 0.20674, 0.22715, 0.18842, 0.12047, 0.05591, 0.01575, 0.00115])
MIX_MEAN = np.array([1.92677, 1.34744, 0.73504, 0.02266, -0.85173, -1.97278, -3.46788, -5.55246, -8.68384, -14.65000])
MIX_VAR = np.array([0.11265, 0.17788, 0.26768, 0.40611, 0.62699, 0.98583, 1.57469, 2.54498, 4.16591, 7.33342])
_MIX_LOGW = np.log(MIX_PROB) - 0.5 * np.log(MIX_VAR)
_MIX_CUM = np.cumsum(MIX_PROB)

ZERO_RESID = 1e-8
VAR_FLOOR = 1e-12


@dataclass
class SvState:
    log_vol: np.ndarray
    log_vol0: float
    mu: float
    rho: float
    theta2: float
    rho_accepted: int = 0
    rho_proposed: int = 0


def log_squares(resid: np.ndarray) -> np.ndarray:
    r2 = resid * resid
    return np.log(np.where(r2 == 0.0, ZERO_RESID, r2))


def draw_indicators(ystar: np.ndarray, h: np.ndarray, rng) -> np.ndarray:
    e = (ystar - h)[:, None] - MIX_MEAN
    logp = _MIX_LOGW - 0.5 * e * e / MIX_VAR
    logp -= logp.max(axis=1, keepdims=True)
    p = np.exp(logp)
    cum = np.cumsum(p, axis=1)
    u = rng.random(h.size) * cum[:, -1]
    return np.minimum((cum < u[:, None]).sum(axis=1), MIX_PROB.size - 1)


def draw_indicators_prior(n: int, rng) -> np.ndarray:
    return np.minimum(np.searchsorted(_MIX_CUM, rng.random(n) * _MIX_CUM[-1]), MIX_PROB.size - 1)


def draw_log_vol(obs: np.ndarray | None, obs_var: np.ndarray | None, mu: float, rho: float, theta2: float,
                 T: int, rng) -> np.ndarray:
    """Draw ``h_{0:T}`` given Gaussian pseudo-observations of ``h_{1:T}``.

    With ``obs`` set to None the path is a draw from the stationary AR(1).
    """
    n = T + 1
    low = np.zeros((2, n))
    low[0] = (1.0 + rho * rho) / theta2
    low[0, 0] = 1.0 / theta2
    low[0, -1] = 1.0 / theta2
    low[1, :-1] = -rho / theta2
    # prior mean mu: P_prior @ (mu * 1)
    rhs = np.full(n, mu * (1.0 - rho) ** 2 / theta2)
    rhs[0] = rhs[-1] = mu * (1.0 - rho) / theta2
    if n == 1:
        rhs[0] = mu * (1.0 - rho * rho) / theta2
        low[0, 0] = (1.0 - rho * rho) / theta2
    if obs is not None:
        low[0, 1:] += 1.0 / obs_var
        rhs[1:] += obs / obs_var
    return sample_banded(low, rhs, rng)


def _rho_log_extra(rho, h0, mu, theta2, prior: SvPriorConfig):
    # Beta prior on (rho+1)/2 plus the stationary density of h_0
    return (
        (prior.rho_beta_a - 1.0) * math.log1p(rho)
        + (prior.rho_beta_b - 1.0) * math.log1p(-rho)
        + 0.5 * math.log1p(-rho * rho)
        - 0.5 * (1.0 - rho * rho) * (h0 - mu) ** 2 / theta2
    )


def draw_centered_params(h: np.ndarray, mu: float, rho: float, theta2: float, prior: SvPriorConfig, rng,
                         state: SvState | None = None) -> tuple[float, float, float]:
    """One Gibbs/MH pass over ``(theta2, mu, rho)`` given ``h_{0:T}``."""
    T = h.size - 1
    h0 = h[0]
    lag, cur = h[:-1], h[1:]

    # theta2 | h, mu, rho: GIG from Gamma prior times Gaussian terms
    dev = (cur - mu) - rho * (lag - mu)
    S = float(dev @ dev) + (1.0 - rho * rho) * (h0 - mu) ** 2
    from .gig import rgig

    theta2 = max(rgig(prior.theta2_gamma_shape - 0.5 * (T + 1), S, 2.0 * prior.theta2_gamma_rate, rng), VAR_FLOOR)

    # mu | h, rho, theta2
    one_m = 1.0 - rho
    prec = 1.0 / prior.mu_prior_var + ((1.0 - rho * rho) + T * one_m * one_m) / theta2
    num = prior.mu_prior_mean / prior.mu_prior_var + ((1.0 - rho * rho) * h0 + one_m * float(np.sum(cur - rho * lag))) / theta2
    mu = num / prec + rng.standard_normal() / math.sqrt(prec)

    # rho | h, mu, theta2: independence MH from the truncated regression posterior
    zl, zc = lag - mu, cur - mu
    sxx = float(zl @ zl)
    if sxx > 0:
        m = float(zl @ zc) / sxx
        s = math.sqrt(theta2 / sxx)
        lo, hi = ndtr((-1.0 - m) / s), ndtr((1.0 - m) / s)
        if hi - lo > 1e-12:
            u = lo + rng.random() * (hi - lo)
            prop = m + s * float(ndtri(u))
            if -1.0 < prop < 1.0:
                log_ratio = _rho_log_extra(prop, h0, mu, theta2, prior) - _rho_log_extra(rho, h0, mu, theta2, prior)
                accept = log_ratio >= 0 or math.log(rng.random()) < log_ratio
                if state is not None:
                    state.rho_proposed += 1
                    state.rho_accepted += int(accept)
                if accept:
                    rho = prop
    return mu, rho, theta2


def draw_noncentered_mu_theta(h: np.ndarray, mu: float, theta2: float, obs: np.ndarray, obs_var: np.ndarray,
                              prior: SvPriorConfig, rng) -> tuple[float, float, np.ndarray]:
    """Redraw ``(mu, theta)`` with ``htilde = (h - mu) / theta`` held fixed.

    Requires the Gamma(1/2, rate) prior on ``theta2``, which makes the signed
    ``theta`` Gaussian with variance ``1 / (2 rate)``.
    """
    theta = math.sqrt(theta2)
    ht = (h - mu) / theta
    Z = np.column_stack([np.ones(obs.size), ht[1:]])
    w = 1.0 / obs_var
    Q = (Z * w[:, None]).T @ Z
    Q[0, 0] += 1.0 / prior.mu_prior_var
    Q[1, 1] += 2.0 * prior.theta2_gamma_rate
    b = (Z * w[:, None]).T @ obs
    b[0] += prior.mu_prior_mean / prior.mu_prior_var
    L = np.linalg.cholesky(Q)
    mean = np.linalg.solve(L.T, np.linalg.solve(L, b))
    draw = mean + np.linalg.solve(L.T, rng.standard_normal(2))
    mu_new, theta_new = float(draw[0]), float(draw[1])
    theta2_new = max(theta_new * theta_new, VAR_FLOOR)
    theta_new = math.copysign(math.sqrt(theta2_new), theta_new)
    return mu_new, theta2_new, mu_new + theta_new * ht


def draw_stochastic_volatility(current, residuals: np.ndarray, rng, prior: SvPriorConfig | None = None,
                               *, interweave: bool = True, prior_only: bool = False, state: SvState | None = None):
    """Update the log-volatility path and ``(mu_sigma, rho_sigma, theta2)``.

    Returns ``(log_vol, mu_sigma, rho_sigma, theta2, log_vol0)``.
    """
    prior = prior or SvPriorConfig()
    T = residuals.size
    mu, rho, theta2 = current.mu_sigma, current.rho_sigma, current.theta2
    if prior_only:
        h = draw_log_vol(None, None, mu, rho, theta2, T, rng)
        obs = obs_var = None
    else:
        ystar = log_squares(residuals)
        s = draw_indicators(ystar, current.log_vol, rng)
        obs = ystar - MIX_MEAN[s]
        obs_var = MIX_VAR[s]
        h = draw_log_vol(obs, obs_var, mu, rho, theta2, T, rng)
    mu, rho, theta2 = draw_centered_params(h, mu, rho, theta2, prior, rng, state)
    if interweave and obs is not None and prior.theta2_gamma_shape == 0.5:
        mu, theta2, h = draw_noncentered_mu_theta(h, mu, theta2, obs, obs_var, prior, rng)
    return h[1:], mu, rho, theta2, float(h[0])
