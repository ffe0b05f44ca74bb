"""Predictive densities, quantile extraction and recursive forecasting.

The ``h``-step predictive density at the last estimation period ``T`` is
simulated draw by draw: the coefficients take ``h`` random-walk steps from
``beta_T`` (``beta_{T+h} ~ N(beta_T, h V)`` with ``V = diag(v^2)``), the
log-variance is iterated ``h`` times through its AR(1), and one target is
drawn from the conditional Gaussian. Mixing over posterior draws gives the
integrated density, which can be skewed even though every conditional is
Gaussian.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from .dates import format_quarter, parse_quarter
from .errors import ConfigError, InputError, InsufficientDataError, ParameterError, SchemaError
from .model import ModelParameters, TvpSvModelSpec
from .pipeline import RegressionDataset
from .sampler.chain import PosteriorDraws, SamplerConfig, run_chain, stream

log = logging.getLogger(__name__)

DEFAULT_PROBS = (0.05, 0.95)
MIN_TRAINING = 80
MIN_QUANTILE_DRAWS = 100

# stream indices under the master seed
_CHAIN_STREAM = 1
_PREDICTIVE_STREAM = 2


@dataclass
class PredictiveDensity:
    """Simulated predictive draws of ``y_{T+h}`` for one origin.

    ``cond_mean`` and ``cond_var`` hold the Gaussian conditional moments
    behind each draw. With ``reps > 1`` draws are stacked draw-major.
    """

    origin: int | None
    horizon: int
    draws: np.ndarray
    cond_mean: np.ndarray
    cond_var: np.ndarray

    def __len__(self) -> int:
        return self.draws.size

    def quantiles(self, probs: Sequence[float] = DEFAULT_PROBS) -> np.ndarray:
        return extract_quantiles(self, probs)


def simulate_predictive(draws: PosteriorDraws, x_T, h: int, rng: np.random.Generator,
                        steps: int | None = None, reps: int = 1, origin: int | None = None) -> PredictiveDensity:
    """Simulate ``y_{T+h} | x_T`` for every retained posterior draw.

    ``steps`` is the number of state transitions from the last estimation
    period (defaults to ``h``). ``reps`` draws are simulated per posterior
    draw, which exposes the conditional law of a single draw.
    """
    if int(h) != h or h < 1:
        raise ParameterError(f"horizon must be a positive integer, got {h}")
    steps = int(h) if steps is None else int(steps)
    if steps < 0:
        raise ParameterError("steps must be >= 0")
    if reps < 1:
        raise ParameterError("reps must be >= 1")
    x = np.asarray(x_T, dtype=float).reshape(-1)
    if len(draws) == 0:
        raise InputError("posterior draws are empty")
    if x.size != draws.K:
        raise InputError(f"x_T has {x.size} entries, model has K={draws.K}")
    if not np.all(np.isfinite(x)):
        raise InputError("x_T must be finite")

    N, K = draws.beta0.shape
    beta_T = draws.beta0 + draws.states_tilde[:, -1, :] * draws.sqrt_v
    mu = draws.scalars["mu_sigma"]
    rho = draws.scalars["rho_sigma"]
    theta = np.sqrt(draws.scalars["theta2"])
    h_T = draws.log_vol[:, -1]

    rep = np.repeat
    beta_T, sqrt_v = rep(beta_T, reps, axis=0), rep(draws.sqrt_v, reps, axis=0)
    mu, rho, theta, lv = rep(mu, reps), rep(rho, reps), rep(theta, reps), rep(h_T, reps)
    n = N * reps

    # the sum of `steps` standard normal increments has variance `steps`
    beta = beta_T + sqrt_v * np.sqrt(steps) * rng.standard_normal((n, K))
    for _ in range(steps):
        lv = mu + rho * (lv - mu) + theta * rng.standard_normal(n)
    mean = beta @ x
    var = np.exp(lv)
    y = mean + np.sqrt(var) * rng.standard_normal(n)
    return PredictiveDensity(origin, int(h), y, mean, var)


def extract_quantiles(density, probs: Sequence[float] = DEFAULT_PROBS) -> np.ndarray:
    """Empirical quantiles by linear interpolation of order statistics.

    Uses the ``(n - 1) p + 1`` position convention, so draws ``1..100`` at
    ``p = 0.05`` give 5.95.
    """
    values = density.draws if isinstance(density, PredictiveDensity) else np.asarray(density, dtype=float)
    values = values.reshape(-1)
    p = np.atleast_1d(np.asarray(probs, dtype=float))
    if np.any(~(p > 0) | ~(p < 1)):
        raise ParameterError(f"probabilities must lie in (0, 1), got {p.tolist()}")
    if values.size < MIN_QUANTILE_DRAWS:
        raise InsufficientDataError(f"need at least {MIN_QUANTILE_DRAWS} draws, got {values.size}")
    return np.quantile(values, p, method="linear")


@dataclass
class QuantilePath:
    """Per-origin predictive quantiles in tidy form.

    ``frame`` has columns ``origin`` (quarter index), ``horizon``, ``prob``,
    ``quantile`` and ``realized`` (NaN when the target is not observed).
    """

    frame: pd.DataFrame
    model: str = "tvp"

    COLUMNS = ("origin", "horizon", "prob", "quantile", "realized")

    def __post_init__(self):
        missing = [c for c in self.COLUMNS if c not in self.frame.columns]
        if missing:
            raise SchemaError(f"quantile path lacks columns {missing}", column=missing[0])
        self.frame = self.frame.loc[:, list(self.COLUMNS)].sort_values(["horizon", "origin", "prob"]).reset_index(drop=True)

    @classmethod
    def from_records(cls, records: list[dict], model: str = "tvp") -> "QuantilePath":
        return cls(pd.DataFrame.from_records(records, columns=list(cls.COLUMNS)), model)

    @property
    def probs(self) -> np.ndarray:
        return np.unique(self.frame["prob"].to_numpy())

    @property
    def horizons(self) -> np.ndarray:
        return np.unique(self.frame["horizon"].to_numpy())

    def series(self, prob: float, horizon: int | None = None) -> pd.DataFrame:
        """Rows for one probability (and horizon), indexed by origin."""
        f = self.frame
        sel = np.isclose(f["prob"], prob)
        if horizon is not None:
            sel &= f["horizon"] == horizon
        out = f.loc[sel].set_index("origin")
        if out.index.has_duplicates:
            raise InputError("several horizons present; pass horizon=")
        return out

    def is_monotone(self) -> bool:
        f = self.frame.sort_values(["horizon", "origin", "prob"])
        d = f.groupby(["horizon", "origin"])["quantile"].diff().dropna()
        return bool(np.all(d >= 0))

    def concat(self, other: "QuantilePath") -> "QuantilePath":
        return QuantilePath(pd.concat([self.frame, other.frame], ignore_index=True), self.model)

    def to_frame(self) -> pd.DataFrame:
        f = self.frame.copy()
        f["origin"] = [format_quarter(int(o)) for o in f["origin"]]
        return f

    def to_csv(self, path: str | Path) -> None:
        self.to_frame().to_csv(path, index=False)

    @classmethod
    def from_csv(cls, path: str | Path, model: str | None = None) -> "QuantilePath":
        df = pd.read_csv(path, float_precision="round_trip")
        if "origin" not in df.columns:
            raise SchemaError(f"{path}: missing column 'origin'", column="origin")
        df["origin"] = [parse_quarter(o) for o in df["origin"]]
        return cls(df, model or Path(path).stem)


def extend_parameters(p: ModelParameters, T: int, rng: np.random.Generator | None = None) -> ModelParameters:
    """Pad (or trim) a parameter set to ``T`` periods for warm starts."""
    T0 = p.states_tilde.shape[0]
    if T <= T0:
        return replace(p, states_tilde=p.states_tilde[:T].copy(), log_vol=p.log_vol[:T].copy())
    extra = T - T0
    last = p.states_tilde[-1]
    steps = np.zeros((extra, p.K)) if rng is None else np.cumsum(rng.standard_normal((extra, p.K)), axis=0)
    states = np.vstack([p.states_tilde, last + steps])
    lv = np.concatenate([p.log_vol, np.full(extra, p.log_vol[-1])])
    return replace(p, states_tilde=states, log_vol=lv)


def forecast_origin(data: RegressionDataset, origin: int, spec: TvpSvModelSpec, cfg: SamplerConfig,
                    probs: Sequence[float] = DEFAULT_PROBS, min_train: int = MIN_TRAINING,
                    init: ModelParameters | None = None) -> tuple[dict, PredictiveDensity, PosteriorDraws]:
    """Estimate on data available at ``origin`` and simulate its predictive."""
    h = data.horizon
    train = data.observed_through(origin)
    if len(train) < min_train:
        raise ConfigError(
            f"origin {format_quarter(origin)} leaves {len(train)} training rows; need at least {min_train}"
        )
    T = len(train)
    start = extend_parameters(init, T) if init is not None else None
    chain = run_chain(spec, train, cfg, init=start, rng=stream(cfg.seed, _CHAIN_STREAM, h, origin))
    x = data.row(origin)
    steps = int(origin - train.origins[-1])
    dens = simulate_predictive(chain, x, h, stream(cfg.seed, _PREDICTIVE_STREAM, h, origin), steps=steps, origin=origin)
    pos = np.flatnonzero(data.origins == origin)[0]
    realized = float(data.targets[pos])
    q = extract_quantiles(dens, probs)
    return {"origin": origin, "realized": realized, "quantiles": q}, dens, chain


def recursive_forecast(data: RegressionDataset, spec: TvpSvModelSpec, cfg: SamplerConfig, start_origin: int | str,
                       probs: Sequence[float] = DEFAULT_PROBS, min_train: int = MIN_TRAINING,
                       end_origin: int | str | None = None, stride: int = 1, warm_start: bool = False,
                       model: str = "tvp", keep_densities: bool = False, workers: int = 1):
    """Expanding-window forecasts for every origin from ``start_origin``.

    At origin ``t`` the model is re-estimated from scratch on the pairs whose
    target is observed by ``t`` (``origin + h <= t``), then the predictive at
    ``x_t`` is simulated. The chain for origin ``t`` uses the stream
    ``(seed, 1, h, t)`` and the predictive ``(seed, 2, h, t)``, so each origin
    is reproducible on its own, and ``workers > 1`` (separate processes)
    gives the same output as a single worker.

    ``warm_start`` starts each chain from the previous origin's final state
    (padded by one period) instead of the default initial values; the chain
    is then no longer independent of the origins before it.

    Returns a QuantilePath, or ``(path, densities)`` with ``keep_densities``.
    """
    start = parse_quarter(start_origin) if isinstance(start_origin, str) else int(start_origin)
    end = data.origins[-1] if end_origin is None else (
        parse_quarter(end_origin) if isinstance(end_origin, str) else int(end_origin))
    if stride < 1:
        raise ConfigError("stride must be >= 1")
    origins = [int(o) for o in data.origins if start <= o <= end][::stride]
    if not origins:
        raise ConfigError("no forecast origins in the requested range")
    first_train = len(data.observed_through(origins[0]))
    if first_train < min_train:
        raise ConfigError(
            f"start origin {format_quarter(origins[0])} leaves {first_train} training rows; need at least {min_train}"
        )
    p = np.asarray(probs, dtype=float)
    records = []
    densities = []
    if workers > 1 and not warm_start:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_origin_job, data, t, spec, cfg, p, min_train) for t in origins]
            results = [fut.result() for fut in futures]
    else:
        results = []
        init = None
        for t in origins:
            res, dens, chain = forecast_origin(data, t, spec, cfg, p, min_train, init=init)
            if warm_start:
                init = chain.final
            results.append((res, dens))
            log.debug("origin %s done", format_quarter(t))
    for res, dens in results:
        t = res["origin"]
        for pr, q in zip(p, res["quantiles"]):
            records.append({"origin": t, "horizon": data.horizon, "prob": float(pr),
                            "quantile": float(q), "realized": res["realized"]})
        if keep_densities:
            densities.append(dens)
    path = QuantilePath.from_records(records, model)
    return (path, densities) if keep_densities else path


def _origin_job(data, t, spec, cfg, probs, min_train):
    res, dens, _ = forecast_origin(data, t, spec, cfg, probs, min_train)
    return res, dens
