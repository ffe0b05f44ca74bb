"""Conditionally Gaussian blocks: latent states, beta0 / scales, and ASIS."""

from __future__ import annotations

from dataclasses import replace

import numpy as np
from scipy.linalg import solve_triangular

from ..model import ModelParameters
from .banded import sample_banded
from .gig import rgig

TINY = 1e-300


def as_arrays(data) -> tuple[np.ndarray, np.ndarray]:
    """``(y, X)`` from a RegressionDataset (observed rows) or a pair."""
    if isinstance(data, tuple):
        y, X = data
        return np.asarray(y, dtype=float), np.atleast_2d(np.asarray(X, dtype=float))
    d = data.training()
    return d.targets, d.regressors


def state_precision(sqrt_v: np.ndarray, X: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Band storage of the precision of ``vec(btilde_{1:T})`` (time-major).

    Row ``d`` holds the ``d``-th subdiagonal; bandwidth is ``K``.
    """
    T, K = X.shape
    n = T * K
    low = np.zeros((K + 1, n))
    z = X * sqrt_v
    # random-walk prior with btilde_0 = 0: diag 2 (1 in the last period), off-diagonal -1
    low[0] = 2.0
    low[0, (T - 1) * K :] = 1.0
    low[K, : n - K] = -1.0
    wz = z * w[:, None]
    for d in range(K):
        band = (wz[:, : K - d] * z[:, d:]).reshape(T, K - d)
        blk = np.zeros((T, K))
        blk[:, : K - d] = band
        low[d] += blk.reshape(-1)
    return low


def _draw_states(p: ModelParameters, y, X, w, rng) -> np.ndarray:
    T, K = X.shape
    resid = y - X @ p.beta0
    z = X * p.sqrt_v
    low = state_precision(p.sqrt_v, X, w)
    rhs = (z * (w * resid)[:, None]).reshape(-1)
    return sample_banded(low, rhs, rng).reshape(T, K)


def draw_states(current: ModelParameters, data, rng: np.random.Generator, inv_var: np.ndarray | None = None) -> np.ndarray:
    """Joint draw of the normalized states ``btilde_{1:T}``.

    ``inv_var`` overrides ``exp(-log_vol)``; zeros switch the likelihood off.
    """
    y, X = as_arrays(data)
    w = np.exp(-current.log_vol) if inv_var is None else inv_var
    return _draw_states(current, y, X, w, rng)


def _draw_beta0_and_scales(p: ModelParameters, y, X, w, rng) -> tuple[np.ndarray, np.ndarray]:
    # Work with u = theta / sqrt(prior var): the posterior of u is the least-squares
    # problem [sqrt(w) W D^(1/2); I] u ~ [sqrt(w) y; 0], solved by QR. This stays
    # accurate when the weights or prior variances span many orders of magnitude.
    K = X.shape[1]
    W = np.hstack([X, p.states_tilde * X])
    scale = np.sqrt(np.concatenate([p.tau2_beta, p.tau2_v]))
    sw = np.sqrt(w)
    A = np.vstack([W * scale * sw[:, None], np.eye(2 * K)])
    b = np.concatenate([sw * y, np.zeros(2 * K)])
    R = np.linalg.qr(A, mode="r")
    mean = solve_triangular(R, solve_triangular(R, A.T @ b, trans="T"))
    u = mean + solve_triangular(R, rng.standard_normal(2 * K))
    draw = scale * u
    return draw[:K], draw[K:]


def draw_beta0_and_scales(current: ModelParameters, data, rng: np.random.Generator, inv_var: np.ndarray | None = None):
    """Regression of ``y`` on ``[x_t, btilde_t * x_t]`` under the Gaussian priors.

    Returns ``(beta0, sqrt_v)``.
    """
    y, X = as_arrays(data)
    w = np.exp(-current.log_vol) if inv_var is None else inv_var
    return _draw_beta0_and_scales(current, y, X, w, rng)


def asis_interweave(current: ModelParameters, data=None, rng: np.random.Generator | None = None) -> ModelParameters:
    """Redraw ``beta0`` and ``v^2`` in the centered parameterization.

    Given the centered paths ``beta_{j,0:T}`` (with ``beta_{j,0} = beta0_j``),
    ``v_j^2 ~ GIG(1/2 - T/2, sum of squared increments, 1/tau2_v)`` and then
    ``beta0_j`` is Gaussian given ``beta_{j,1}``. States are renormalized with
    the sign of ``sqrt_v`` kept. Components whose increments are all zero are
    left unchanged. The data enter only through the states, so ``data`` is
    accepted for interface symmetry.
    """
    if rng is None:
        raise ValueError("rng is required")
    p = current
    T, K = p.states_tilde.shape
    beta = p.beta0 + p.states_tilde * p.sqrt_v
    inc_tilde = np.diff(np.vstack([np.zeros((1, K)), p.states_tilde]), axis=0)
    ss = (p.sqrt_v ** 2) * np.sum(inc_tilde ** 2, axis=0)
    beta0 = p.beta0.copy()
    sqrt_v = p.sqrt_v.copy()
    states = p.states_tilde.copy()
    for j in range(K):
        if not ss[j] > 0:
            continue
        v2 = max(rgig(0.5 - 0.5 * T, ss[j], 1.0 / p.tau2_v[j], rng), TINY)
        prec = 1.0 / p.tau2_beta[j] + 1.0 / v2
        beta0[j] = beta[0, j] / v2 / prec + rng.standard_normal() / np.sqrt(prec)
        sqrt_v[j] = np.copysign(np.sqrt(v2), p.sqrt_v[j])
        states[:, j] = (beta[:, j] - beta0[j]) / sqrt_v[j]
    return replace(p, beta0=beta0, sqrt_v=sqrt_v, states_tilde=states)


def flip_signs(current: ModelParameters, rng: np.random.Generator) -> ModelParameters:
    """Flip ``(sqrt_v_j, btilde_j)`` jointly with probability 1/2 per component.

    The likelihood and the symmetric priors are invariant under this map, so
    the move is an exact posterior-preserving update that lets the sign of
    ``sqrt_v`` mix.
    """
    flip = np.where(rng.random(current.K) < 0.5, -1.0, 1.0)
    return replace(current, sqrt_v=current.sqrt_v * flip, states_tilde=current.states_tilde * flip)
