"""TVP-SV regression: configuration, parameter container and likelihood.

Observation equation (non-centered)::

    y_t = beta0' x_t + (sqrt_v * btilde_t)' x_t + eps_t,   eps_t ~ N(0, exp(h_t))
    btilde_t = btilde_{t-1} + nu_t,   nu_t ~ N(0, I),   btilde_0 = 0
    h_t = mu + rho (h_{t-1} - mu) + w_t,   w_t ~ N(0, theta2)

Row ``t`` of every T-length array refers to the ``t``-th observed pair
``(x_t, y_{t+h})``; the state anchor ``btilde_0 = 0`` and the initial
log-variance ``log_vol0`` sit one step before the first row.
"""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, ShapeError

LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class SvPriorConfig:
    mu_prior_mean: float = 0.0
    mu_prior_var: float = 100.0
    rho_beta_a: float = 5.0
    rho_beta_b: float = 1.5
    theta2_gamma_shape: float = 0.5
    theta2_gamma_rate: float = 0.5

    def __post_init__(self):
        for name in ("mu_prior_var", "rho_beta_a", "rho_beta_b", "theta2_gamma_shape", "theta2_gamma_rate"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"sv.{name} must be > 0")


@dataclass(frozen=True)
class ShrinkageBlockConfig:
    """Triple-Gamma settings for one block (``v`` or ``beta``).

    ``a``, ``c`` and ``kappa`` are starting values when learned and fixed
    values otherwise. Learned ``a`` and ``c`` live on (0, 0.5) with
    ``2a ~ Beta(a_prior_alpha, a_prior_beta)`` and likewise for ``c``;
    a learned ``kappa`` has ``kappa / 2 ~ F(2a, 2c)``.
    """

    a: float = 1.0 / 6.0
    c: float = 1.0 / 6.0
    kappa: float = 20.0
    learn_a: bool = True
    learn_c: bool = True
    learn_kappa: bool = True
    a_prior_alpha: float = 5.0
    a_prior_beta: float = 10.0
    c_prior_alpha: float = 5.0
    c_prior_beta: float = 10.0
    a_step: float = 1.0
    c_step: float = 1.0

    def __post_init__(self):
        for name in ("a", "c", "kappa", "a_prior_alpha", "a_prior_beta", "c_prior_alpha", "c_prior_beta", "a_step", "c_step"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"shrinkage.{name} must be > 0")
        if self.learn_a and not self.a < 0.5:
            raise ConfigError("a must lie in (0, 0.5) when learned")
        if self.learn_c and not self.c < 0.5:
            raise ConfigError("c must lie in (0, 0.5) when learned")


@dataclass(frozen=True)
class TripleGammaConfig:
    v: ShrinkageBlockConfig = field(default_factory=ShrinkageBlockConfig)
    beta: ShrinkageBlockConfig = field(default_factory=ShrinkageBlockConfig)

    @classmethod
    def fixed(cls, a: float = 0.5, c: float = 0.5, kappa: float = 20.0) -> "TripleGammaConfig":
        blk = ShrinkageBlockConfig(a=a, c=c, kappa=kappa, learn_a=False, learn_c=False, learn_kappa=False)
        return cls(v=blk, beta=blk)


@dataclass(frozen=True)
class TvpSvModelSpec:
    horizon: int = 1
    K: int = 3
    sv: SvPriorConfig = field(default_factory=SvPriorConfig)
    shrinkage: TripleGammaConfig = field(default_factory=TripleGammaConfig)
    # fixes every local variance (tau2, lambda) at its starting value
    fix_local_scales: bool = False
    tau2_init: float = 1.0

    def __post_init__(self):
        if self.K < 1:
            raise ConfigError("K must be >= 1")
        if self.horizon < 1:
            raise ConfigError("horizon must be >= 1")


@dataclass
class ModelParameters:
    beta0: np.ndarray
    sqrt_v: np.ndarray
    states_tilde: np.ndarray
    log_vol: np.ndarray
    log_vol0: float
    mu_sigma: float
    rho_sigma: float
    theta2: float
    tau2_v: np.ndarray
    lambda_v: np.ndarray
    tau2_beta: np.ndarray
    lambda_beta: np.ndarray
    a_v: float
    c_v: float
    kappa_v: float
    a_beta: float
    c_beta: float
    kappa_beta: float

    @property
    def K(self) -> int:
        return self.beta0.size

    @property
    def T(self) -> int:
        return self.log_vol.size

    def copy(self) -> "ModelParameters":
        return replace(self, **{f.name: np.array(getattr(self, f.name), copy=True)
                                for f in fields(self) if isinstance(getattr(self, f.name), np.ndarray)})

    def validate(self) -> None:
        K, T = self.K, self.T
        if self.sqrt_v.shape != (K,) or self.states_tilde.shape != (T, K):
            raise ShapeError("parameter arrays have inconsistent shapes")
        for name in ("tau2_v", "lambda_v", "tau2_beta", "lambda_beta"):
            arr = getattr(self, name)
            if arr.shape != (K,) or not np.all(arr > 0):
                raise ShapeError(f"{name} must be a positive {K}-vector")
        if not abs(self.rho_sigma) < 1 or not self.theta2 > 0:
            raise ShapeError("need |rho_sigma| < 1 and theta2 > 0")
        if not np.all(np.isfinite(self.log_vol)):
            raise ShapeError("log_vol must be finite")

    def to_dict(self) -> dict:
        return {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in asdict(self).items()}


def initial_parameters(spec: TvpSvModelSpec, T: int, y: np.ndarray | None = None) -> ModelParameters:
    """Deterministic starting point for a chain."""
    K = spec.K
    s = spec.shrinkage
    lv = 0.0
    if y is not None and y.size > 1:
        lv = float(np.log(max(np.var(y), 1e-8)))
    return ModelParameters(
        beta0=np.zeros(K),
        sqrt_v=np.full(K, 0.1),
        states_tilde=np.zeros((T, K)),
        log_vol=np.full(T, lv),
        log_vol0=lv,
        mu_sigma=lv,
        rho_sigma=0.9,
        theta2=0.1,
        tau2_v=np.full(K, spec.tau2_init),
        lambda_v=np.full(K, 2.0 / spec.tau2_init),
        tau2_beta=np.full(K, spec.tau2_init),
        lambda_beta=np.full(K, 2.0 / spec.tau2_init),
        a_v=s.v.a,
        c_v=s.v.c,
        kappa_v=s.v.kappa,
        a_beta=s.beta.a,
        c_beta=s.beta.c,
        kappa_beta=s.beta.kappa,
    )


def centered_states(params: ModelParameters) -> np.ndarray:
    """``beta_t = beta0 + sqrt_v * btilde_t`` for every row."""
    return params.beta0 + params.states_tilde * params.sqrt_v


def normalize_states(beta: np.ndarray, beta0: np.ndarray, sqrt_v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`centered_states`; ``sqrt_v`` must be nonzero."""
    return (beta - beta0) / sqrt_v


def fitted_mean(params: ModelParameters, X: np.ndarray) -> np.ndarray:
    return np.einsum("tk,tk->t", centered_states(params), X)


def log_likelihood(params: ModelParameters, data) -> float:
    """Gaussian log-likelihood of the observed targets.

    ``data`` is a RegressionDataset (forecast-only rows are ignored) or a
    ``(y, X)`` pair.
    """
    if isinstance(data, tuple):
        y, X = (np.asarray(a, dtype=float) for a in data)
    else:
        d = data.training()
        y, X = d.targets, d.regressors
    X = np.atleast_2d(X)
    if X.shape != (params.T, params.K) or y.shape != (params.T,):
        raise ShapeError(f"data shape {X.shape} does not match parameters ({params.T}, {params.K})")
    resid = y - fitted_mean(params, X)
    h = params.log_vol
    return float(-0.5 * np.sum(LOG_2PI + h + resid * resid * np.exp(-h)))


# ---------------------------------------------------------------------------
# INI-style config files: flat ``key = value`` within named sections.


def _coerce(text: str, like):
    if isinstance(like, bool):
        t = text.strip().lower()
        if t in ("1", "true", "yes", "on"):
            return True
        if t in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"not a boolean: {text!r}")
    if isinstance(like, int):
        return int(text)
    if isinstance(like, float):
        return float(text)
    return text


def _apply_section(obj, section: configparser.SectionProxy | dict, prefix: str = ""):
    updates = {}
    known = {f.name for f in fields(obj)}
    for key, raw in section.items():
        if not key.startswith(prefix):
            continue
        name = key[len(prefix):]
        if name not in known:
            continue
        current = getattr(obj, name)
        if hasattr(current, "__dataclass_fields__"):
            continue
        try:
            updates[name] = _coerce(raw, current)
        except ValueError as exc:
            raise ConfigError(f"bad value for {prefix}{name}: {raw!r}") from exc
    return replace(obj, **updates) if updates else obj


def model_spec_from_config(cp: configparser.ConfigParser, horizon: int = 1, K: int = 3) -> TvpSvModelSpec:
    spec = TvpSvModelSpec(horizon=horizon, K=K)
    if cp.has_section("model"):
        spec = _apply_section(spec, cp["model"])
    sv = _apply_section(SvPriorConfig(), cp["sv"]) if cp.has_section("sv") else SvPriorConfig()
    v_blk = ShrinkageBlockConfig()
    b_blk = ShrinkageBlockConfig()
    if cp.has_section("shrinkage"):
        v_blk = _apply_section(v_blk, cp["shrinkage"], "v_")
        b_blk = _apply_section(b_blk, cp["shrinkage"], "beta_")
    return replace(spec, horizon=horizon, K=K, sv=sv, shrinkage=TripleGammaConfig(v=v_blk, beta=b_blk))


def model_spec_to_config(spec: TvpSvModelSpec, cp: configparser.ConfigParser | None = None) -> configparser.ConfigParser:
    cp = cp or configparser.ConfigParser()
    cp["model"] = {"fix_local_scales": str(spec.fix_local_scales), "tau2_init": repr(spec.tau2_init)}
    cp["sv"] = {k: repr(v) for k, v in asdict(spec.sv).items()}
    shr = {}
    for prefix, blk in (("v_", spec.shrinkage.v), ("beta_", spec.shrinkage.beta)):
        for k, v in asdict(blk).items():
            shr[prefix + k] = str(v) if isinstance(v, bool) else repr(v)
    cp["shrinkage"] = shr
    return cp


def read_config(path: str | Path) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    if not Path(path).is_file():
        raise ConfigError(f"config file not found: {path}")
    cp.read(path, encoding="utf-8")
    return cp
