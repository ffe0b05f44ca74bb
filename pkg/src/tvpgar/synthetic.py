"""Synthetic data-generating processes for the TVP-SV regression."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .dates import parse_quarter
from .errors import ConfigError
from .model import ModelParameters
from .pipeline import RegressionDataset


@dataclass(frozen=True)
class DgpSpec:
    """Synthetic design.

    ``beta_path``: ``constant``, ``random_walk`` (increment sd ``v``) or
    ``break`` (coefficients shift by ``beta_break`` at ``break_at``).
    ``vol``: ``constant`` (sd ``sigma``), ``sv`` (AR(1) log-variance with
    ``mu``, ``rho``, ``theta``) or ``break`` (sd ``sigma`` then
    ``sigma * vol_ratio``). ``regressors``: ``iid`` N(0,1) or ``ar1`` with
    coefficient ``phi`` and unit variance; the first column is always the
    intercept.
    """

    T: int = 200
    K: int = 3
    beta_path: str = "constant"
    v: float | tuple[float, ...] = 0.1
    beta0: tuple[float, ...] | None = None
    beta_break: tuple[float, ...] | None = None
    vol: str = "constant"
    sigma: float = 1.0
    mu: float = 0.0
    rho: float = 0.95
    theta: float = 0.2
    vol_ratio: float = 0.25
    break_at: float = 0.5
    heavy_shock_prob: float = 0.0
    heavy_shock_scale: float = 5.0
    regressors: str = "iid"
    phi: float = 0.7
    horizon: int = 1
    start: str = "1900-Q1"
    seed: int = 0

    def __post_init__(self):
        if self.T < 1 or self.K < 1:
            raise ConfigError("T and K must be >= 1")
        if self.beta_path not in ("constant", "random_walk", "break"):
            raise ConfigError(f"unknown beta_path {self.beta_path!r}")
        if self.vol not in ("constant", "sv", "break"):
            raise ConfigError(f"unknown vol {self.vol!r}")
        if self.regressors not in ("iid", "ar1"):
            raise ConfigError(f"unknown regressors {self.regressors!r}")
        if not abs(self.rho) < 1 or not abs(self.phi) < 1:
            raise ConfigError("|rho| and |phi| must be < 1")
        for name in ("sigma", "theta", "vol_ratio", "heavy_shock_scale"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0")
        if np.any(np.asarray(self.v, dtype=float) < 0):
            raise ConfigError("v must be >= 0")


def _default_beta0(K: int) -> np.ndarray:
    return np.array([1.0, 0.5, -0.5, 0.25, -0.25, 0.1][:K] + [0.1] * max(0, K - 6))


def simulate_dgp(spec: DgpSpec) -> tuple[RegressionDataset, ModelParameters]:
    """Draw regressors, states, volatilities and targets; return data and truth."""
    rng = np.random.default_rng(spec.seed)
    T, K = spec.T, spec.K

    X = np.ones((T, K))
    if K > 1:
        if spec.regressors == "iid":
            X[:, 1:] = rng.standard_normal((T, K - 1))
        else:
            z = np.empty((T, K - 1))
            z[0] = rng.standard_normal(K - 1)
            s = np.sqrt(1.0 - spec.phi ** 2)
            for t in range(1, T):
                z[t] = spec.phi * z[t - 1] + s * rng.standard_normal(K - 1)
            X[:, 1:] = z

    beta0 = _default_beta0(K) if spec.beta0 is None else np.asarray(spec.beta0, dtype=float)
    v = np.broadcast_to(np.asarray(spec.v, dtype=float), (K,)).copy()
    split = int(round(spec.break_at * T))
    if spec.beta_path == "random_walk":
        nu = rng.standard_normal((T, K))
        states = np.cumsum(nu, axis=0)
        beta = beta0 + states * v
        sqrt_v = v
        states_tilde = np.where(v > 0, states, 0.0)
    else:
        beta = np.tile(beta0, (T, 1))
        if spec.beta_path == "break":
            shift = np.ones(K) if spec.beta_break is None else np.asarray(spec.beta_break, dtype=float)
            beta[split:] += shift
        sqrt_v = np.zeros(K)
        states_tilde = np.zeros((T, K))

    if spec.vol == "sv":
        theta2 = spec.theta ** 2
        h0 = spec.mu + spec.theta / np.sqrt(1 - spec.rho ** 2) * rng.standard_normal()
        h = np.empty(T)
        prev = h0
        for t in range(T):
            prev = spec.mu + spec.rho * (prev - spec.mu) + spec.theta * rng.standard_normal()
            h[t] = prev
        mu, rho = spec.mu, spec.rho
    else:
        lv = 2.0 * np.log(spec.sigma)
        h = np.full(T, lv)
        if spec.vol == "break":
            h[split:] = lv + 2.0 * np.log(spec.vol_ratio)
        h0, mu, rho, theta2 = lv, lv, 0.0, 1e-12

    eps = rng.standard_normal(T)
    if spec.heavy_shock_prob > 0:
        hit = rng.random(T) < spec.heavy_shock_prob
        eps = np.where(hit, eps * spec.heavy_shock_scale, eps)
    y = np.einsum("tk,tk->t", beta, X) + np.exp(0.5 * h) * eps

    names = ("intercept",) + tuple(f"x{j}" for j in range(1, K))
    origins = parse_quarter(spec.start) + np.arange(T)
    data = RegressionDataset(spec.horizon, origins, y, X, names, {"dgp_seed": spec.seed})
    truth = ModelParameters(
        beta0=beta0.copy(), sqrt_v=sqrt_v.copy(), states_tilde=states_tilde, log_vol=h, log_vol0=float(h0),
        mu_sigma=float(mu), rho_sigma=float(rho), theta2=float(theta2),
        tau2_v=np.ones(K), lambda_v=np.ones(K), tau2_beta=np.ones(K), lambda_beta=np.ones(K),
        a_v=0.5, c_v=0.5, kappa_v=1.0, a_beta=0.5, c_beta=0.5, kappa_beta=1.0,
    )
    return data, truth


def true_betas(truth: ModelParameters, data: RegressionDataset | None = None) -> np.ndarray:
    return truth.beta0 + truth.states_tilde * truth.sqrt_v


def dgp_from_config(section: configparser.SectionProxy | dict) -> DgpSpec:
    spec = DgpSpec()
    updates = {}
    for f in fields(spec):
        if f.name not in section:
            continue
        raw = section[f.name]
        cur = getattr(spec, f.name)
        if f.name in ("v", "beta0", "beta_break"):
            vals = tuple(float(x) for x in str(raw).replace(",", " ").split())
            updates[f.name] = vals[0] if (f.name == "v" and len(vals) == 1) else vals
        elif isinstance(cur, bool):
            updates[f.name] = str(raw).lower() in ("1", "true", "yes")
        elif isinstance(cur, int):
            updates[f.name] = int(raw)
        elif isinstance(cur, float):
            updates[f.name] = float(raw)
        else:
            updates[f.name] = str(raw)
    return replace(spec, **updates)
