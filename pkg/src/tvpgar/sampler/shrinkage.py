"""Triple-Gamma hierarchy updates for the ``v`` and ``beta`` blocks.

For one block with coefficients ``theta_j`` (``sqrt_v`` or ``beta0``)::

    theta_j | tau2_j        ~ N(0, tau2_j)
    tau2_j  | a, lambda_j   ~ G(a, a lambda_j / 2)
    lambda_j | c, kappa     ~ G(c, c / kappa)
    2a ~ Beta, 2c ~ Beta,  kappa / 2 | a, c ~ F(2a, 2c)

The F prior is handled through ``kappa / 2 | d ~ G(a, d)``,
``d ~ G(c, c / a)`` with ``d`` redrawn before every ``kappa`` update.
All Gamma laws use (shape, rate).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betaln, gammaln

from ..model import ShrinkageBlockConfig
from .gig import rgig

VAR_FLOOR = 1e-12
# lambda and kappa are rates, not variances; only guard against underflow to zero
TINY = 1e-300


@dataclass
class AdaptiveStep:
    """Random-walk step on the logit scale, Robbins-Monro tuned while ``adapting``."""

    log_scale: float
    target: float = 0.35
    n: int = 0
    accepted: int = 0
    proposed: int = 0
    adapting: bool = True

    @property
    def scale(self) -> float:
        return math.exp(self.log_scale)

    def record(self, accepted: bool) -> None:
        self.proposed += 1
        self.accepted += int(accepted)
        if self.adapting:
            self.n += 1
            self.log_scale += (float(accepted) - self.target) / self.n ** 0.6
            self.log_scale = min(max(self.log_scale, -10.0), 5.0)

    @property
    def rate(self) -> float:
        return self.accepted / self.proposed if self.proposed else float("nan")


@dataclass
class BlockState:
    tau2: np.ndarray
    lam: np.ndarray
    a: float
    c: float
    kappa: float
    a_step: AdaptiveStep | None = None
    c_step: AdaptiveStep | None = None
    extra: dict = field(default_factory=dict)


def log_gamma_pdf(x, shape, rate):
    x = np.asarray(x, dtype=float)
    return shape * np.log(rate) - gammaln(shape) + (shape - 1.0) * np.log(x) - rate * x


def log_f_pdf(x: float, d1: float, d2: float) -> float:
    return (
        0.5 * d1 * math.log(d1 / d2)
        + (0.5 * d1 - 1.0) * math.log(x)
        - 0.5 * (d1 + d2) * math.log1p(d1 * x / d2)
        - betaln(0.5 * d1, 0.5 * d2)
    )


def _log_beta_on_half(x: float, alpha: float, beta: float) -> float:
    """log density of ``2x ~ Beta`` on the logit(2x) scale, up to a constant."""
    return alpha * math.log(2.0 * x) + beta * math.log1p(-2.0 * x)


def _logit2(x: float) -> float:
    return math.log(2.0 * x) - math.log1p(-2.0 * x)


def _inv_logit2(u: float) -> float:
    if u >= 0:
        return 0.5 / (1.0 + math.exp(-u))
    e = math.exp(u)
    return 0.5 * e / (1.0 + e)


def draw_tau2(theta: np.ndarray, a: float, lam: np.ndarray, rng) -> np.ndarray:
    """``tau2_j ~ GIG(a - 1/2, theta_j^2, a lambda_j)``."""
    out = np.empty_like(lam)
    for j in range(lam.size):
        out[j] = rgig(a - 0.5, theta[j] * theta[j], a * lam[j], rng)
    return np.maximum(out, TINY)


def draw_lambda(tau2: np.ndarray, a: float, c: float, kappa: float, rng) -> np.ndarray:
    """``lambda_j ~ G(a + c, a tau2_j / 2 + c / kappa)``."""
    rate = 0.5 * a * tau2 + c / kappa
    return np.maximum(rng.gamma(a + c, 1.0 / rate), TINY)


def _log_target_a(a, tau2, lam, kappa, c, cfg, learn_kappa):
    lp = _log_beta_on_half(a, cfg.a_prior_alpha, cfg.a_prior_beta)
    lp += float(np.sum(log_gamma_pdf(tau2, a, 0.5 * a * lam)))
    if learn_kappa:
        lp += log_f_pdf(0.5 * kappa, 2.0 * a, 2.0 * c)
    return lp


def _log_target_c(c, lam, kappa, a, cfg, learn_kappa):
    lp = _log_beta_on_half(c, cfg.c_prior_alpha, cfg.c_prior_beta)
    lp += float(np.sum(log_gamma_pdf(lam, c, c / kappa)))
    if learn_kappa:
        lp += log_f_pdf(0.5 * kappa, 2.0 * a, 2.0 * c)
    return lp


def _mh_half_interval(x, log_target, step: AdaptiveStep, rng) -> float:
    u = _logit2(x)
    prop_u = u + step.scale * rng.standard_normal()
    prop = _inv_logit2(prop_u)
    if not 0.0 < prop < 0.5:
        step.record(False)
        return x
    log_ratio = log_target(prop) - log_target(x)
    accept = math.log(rng.random()) < log_ratio if log_ratio < 0 else True
    step.record(accept)
    return prop if accept else x


def draw_kappa(lam: np.ndarray, a: float, c: float, kappa: float, rng) -> float:
    d = rng.gamma(a + c, 1.0 / (0.5 * kappa + c / a))
    k = rgig(a - lam.size * c, 2.0 * c * float(np.sum(lam)), d, rng)
    return max(k, TINY)


def update_block(theta: np.ndarray, st: BlockState, cfg: ShrinkageBlockConfig, rng, fix_local: bool = False) -> BlockState:
    """One sweep over a block's hierarchy; mutates and returns ``st``."""
    if not fix_local:
        st.tau2 = draw_tau2(theta, st.a, st.lam, rng)
        st.lam = draw_lambda(st.tau2, st.a, st.c, st.kappa, rng)
        if cfg.learn_a:
            st.a = _mh_half_interval(
                st.a, lambda a: _log_target_a(a, st.tau2, st.lam, st.kappa, st.c, cfg, cfg.learn_kappa), st.a_step, rng
            )
        if cfg.learn_c:
            st.c = _mh_half_interval(
                st.c, lambda c: _log_target_c(c, st.lam, st.kappa, st.a, cfg, cfg.learn_kappa), st.c_step, rng
            )
        if cfg.learn_kappa:
            st.kappa = draw_kappa(st.lam, st.a, st.c, st.kappa, rng)
    return st


def draw_shrinkage_hierarchy(current, rng, spec, steps: dict | None = None):
    """Update ``(tau2, lambda, a, c, kappa)`` for both blocks.

    Returns a new ModelParameters plus the (possibly created) step-size
    controllers keyed ``"a_v", "c_v", "a_beta", "c_beta"``.
    """
    from dataclasses import replace

    steps = steps if steps is not None else new_steps(spec)
    s = spec.shrinkage
    v = BlockState(current.tau2_v.copy(), current.lambda_v.copy(), current.a_v, current.c_v, current.kappa_v,
                   steps["a_v"], steps["c_v"])
    b = BlockState(current.tau2_beta.copy(), current.lambda_beta.copy(), current.a_beta, current.c_beta,
                   current.kappa_beta, steps["a_beta"], steps["c_beta"])
    update_block(current.sqrt_v, v, s.v, rng, spec.fix_local_scales)
    update_block(current.beta0, b, s.beta, rng, spec.fix_local_scales)
    new = replace(current, tau2_v=v.tau2, lambda_v=v.lam, a_v=v.a, c_v=v.c, kappa_v=v.kappa,
                  tau2_beta=b.tau2, lambda_beta=b.lam, a_beta=b.a, c_beta=b.c, kappa_beta=b.kappa)
    return new, steps


def new_steps(spec, target: float = 0.35) -> dict:
    s = spec.shrinkage
    return {
        "a_v": AdaptiveStep(math.log(s.v.a_step), target),
        "c_v": AdaptiveStep(math.log(s.v.c_step), target),
        "a_beta": AdaptiveStep(math.log(s.beta.a_step), target),
        "c_beta": AdaptiveStep(math.log(s.beta.c_step), target),
    }


def sample_prior(cfg: ShrinkageBlockConfig, K: int, rng, fix_local: bool = False, tau2_init: float = 1.0):
    """Draw ``(theta, tau2, lambda, a, c, kappa)`` from a block's prior."""
    a = 0.5 * rng.beta(cfg.a_prior_alpha, cfg.a_prior_beta) if cfg.learn_a else cfg.a
    c = 0.5 * rng.beta(cfg.c_prior_alpha, cfg.c_prior_beta) if cfg.learn_c else cfg.c
    if cfg.learn_kappa:
        kappa = 2.0 * rng.f(2.0 * a, 2.0 * c)
    else:
        kappa = cfg.kappa
    if fix_local:
        tau2 = np.full(K, tau2_init)
        lam = np.full(K, 2.0 / tau2_init)
    else:
        lam = np.maximum(rng.gamma(c, kappa / c, size=K), TINY)
        tau2 = np.maximum(rng.gamma(a, 2.0 / (a * lam)), TINY)
    theta = rng.standard_normal(K) * np.sqrt(tau2)
    return theta, tau2, lam, a, c, kappa
