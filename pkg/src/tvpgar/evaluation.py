"""Quantile-score evaluation, relative scores and tail dispersion."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import pandas as pd

from .dates import format_quarter, parse_quarter
from .errors import AlignmentError, ConfigError, DomainError, InputError, ParameterError
from .forecast import QuantilePath


def quantile_score(q, y, tau: float):
    """Pinball loss ``(y - q)(tau - 1{y < q})``; vectorized."""
    if not 0 < tau < 1:
        raise ParameterError(f"tau must lie in (0, 1), got {tau}")
    q = np.asarray(q, dtype=float)
    y = np.asarray(y, dtype=float)
    out = (y - q) * (tau - (y < q))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Period:
    """Closed range of origin quarters; ``None`` leaves a side open."""

    name: str
    start: int | None = None
    end: int | None = None

    @classmethod
    def parse(cls, name: str, text: str) -> "Period":
        """``"1947-Q4:1983-Q4"``, ``":1939-Q2"`` or ``"1984-Q1:"``."""
        if ":" not in text:
            raise ConfigError(f"period {name!r} must look like START:END, got {text!r}")
        a, b = (s.strip() for s in text.split(":", 1))
        return cls(name, parse_quarter(a) if a else None, parse_quarter(b) if b else None)

    def mask(self, origins) -> np.ndarray:
        o = np.asarray(origins)
        m = np.ones(o.shape, dtype=bool)
        if self.start is not None:
            m &= o >= self.start
        if self.end is not None:
            m &= o <= self.end
        return m

    def label(self) -> str:
        a = "" if self.start is None else format_quarter(self.start)
        b = "" if self.end is None else format_quarter(self.end)
        return f"{a}:{b}"


# headline split around the Second World War
TABLE1_PERIODS = (
    Period("pre-WW2", None, parse_quarter("1939-Q2")),
    Period("post-WW2", parse_quarter("1945-Q3"), None),
)
# dispersion eras; two years after each world war are left out
DISPERSION_PERIODS = (
    Period("pre-WW1", None, parse_quarter("1914-Q2")),
    Period("interwar", parse_quarter("1921-Q1"), parse_quarter("1939-Q2")),
    Period("pre-GM", parse_quarter("1947-Q4"), parse_quarter("1983-Q4")),
    Period("since-GM", parse_quarter("1984-Q1"), None),
)


def periods_from_config(section: Mapping[str, str] | configparser.SectionProxy | None,
                        default: Sequence[Period]) -> tuple[Period, ...]:
    if section is None or len(section) == 0:
        return tuple(default)
    return tuple(Period.parse(k, v) for k, v in section.items())


@dataclass
class ScoreSeries:
    model: str
    horizon: int
    tau: float
    origins: np.ndarray
    scores: np.ndarray

    def __post_init__(self):
        self.origins = np.asarray(self.origins, dtype=np.int64)
        self.scores = np.asarray(self.scores, dtype=float)
        if self.origins.shape != self.scores.shape:
            raise AlignmentError("origins and scores differ in length")
        if np.any(self.scores < 0):
            raise DomainError("quantile scores must be >= 0")

    @classmethod
    def from_path(cls, path: QuantilePath, tau: float, horizon: int | None = None,
                  model: str | None = None) -> "ScoreSeries":
        s = path.series(tau, horizon)
        s = s[np.isfinite(s["realized"].to_numpy())]
        h = int(s["horizon"].iloc[0]) if len(s) else int(horizon or 0)
        return cls(model or path.model, h, float(tau), s.index.to_numpy(),
                   quantile_score(s["quantile"].to_numpy(), s["realized"].to_numpy(), tau))

    def masked(self, period: Period | None) -> "ScoreSeries":
        if period is None:
            return self
        m = period.mask(self.origins)
        return ScoreSeries(self.model, self.horizon, self.tau, self.origins[m], self.scores[m])


def _aligned(model: ScoreSeries, baseline: ScoreSeries) -> None:
    if not np.array_equal(model.origins, baseline.origins):
        raise AlignmentError(f"{model.model} and {baseline.model} are scored on different origins")


def relative_mean_score(model: ScoreSeries, baseline: ScoreSeries, period: Period | np.ndarray | None = None) -> float:
    """Mean model score over the mask divided by the mean baseline score."""
    _aligned(model, baseline)
    if period is None:
        m = np.ones(model.origins.size, dtype=bool)
    elif isinstance(period, Period):
        m = period.mask(model.origins)
    else:
        m = np.asarray(period, dtype=bool)
    if not m.any():
        raise InputError("period mask selects no origins")
    denom = baseline.scores[m].mean()
    if not denom > 0:
        raise DomainError("baseline mean score is zero")
    return float(model.scores[m].mean() / denom)


def recursive_mean_path(model: ScoreSeries, baseline: ScoreSeries) -> pd.Series:
    """Ratio of cumulative mean scores through each origin."""
    _aligned(model, baseline)
    if model.origins.size == 0:
        raise InputError("score series are empty")
    cb = np.cumsum(baseline.scores)
    if np.any(cb <= 0):
        raise DomainError("baseline cumulative score is zero at some origin")
    # the cumulative means share the count, so the ratio of sums is the ratio of means
    return pd.Series(np.cumsum(model.scores) / cb, index=model.origins, name=f"{model.model}/{baseline.model}")


def tail_dispersion(path: QuantilePath, periods: Sequence[Period] = DISPERSION_PERIODS,
                    probs: Sequence[float] | None = None, horizon: int | None = None,
                    exclude: Sequence[Period] = ()) -> pd.DataFrame:
    """Sample standard deviation of each quantile path within each period.

    ``exclude`` removes further date ranges. Periods with fewer than two
    origins get NaN and ``flagged = True``.
    """
    probs = path.probs if probs is None else probs
    horizons = path.horizons if horizon is None else [horizon]
    rows = []
    for h in horizons:
        for p in probs:
            s = path.series(p, int(h))
            o = s.index.to_numpy()
            keep = np.ones(o.size, dtype=bool)
            for ex in exclude:
                keep &= ~ex.mask(o)
            for per in periods:
                vals = s["quantile"].to_numpy()[keep & per.mask(o)]
                ok = vals.size >= 2
                rows.append({"period": per.name, "horizon": int(h), "prob": float(p), "n": int(vals.size),
                             "sd": float(np.std(vals, ddof=1)) if ok else np.nan, "flagged": not ok})
    return pd.DataFrame(rows, columns=["period", "horizon", "prob", "n", "sd", "flagged"])


@dataclass
class EvaluationReport:
    """Mean and relative quantile scores per model, period and horizon."""

    scores: pd.DataFrame
    baseline: str
    tau: float
    dispersion: pd.DataFrame | None = None
    paths: dict[str, pd.Series] = field(default_factory=dict)

    def relative(self, model: str, period: str, horizon: int) -> float:
        s = self.scores
        row = s[(s.model == model) & (s.period == period) & (s.horizon == horizon)]
        if row.empty:
            raise InputError(f"no score for {model}/{period}/h={horizon}")
        return float(row["relative"].iloc[0])

    def to_csv(self, path: str | Path) -> None:
        self.scores.to_csv(path, index=False, float_format="%.10g")

    def to_text(self) -> str:
        """Aligned table: one row per model, one column per horizon and period."""
        s = self.scores
        periods = list(dict.fromkeys(s["period"]))
        horizons = sorted(s["horizon"].unique())
        heads = [f"h={h} {p}" for h in horizons for p in periods]
        models = list(dict.fromkeys(s["model"]))
        w0 = max(5, *(len(m) for m in models))
        widths = [max(8, len(hd)) for hd in heads]
        lines = [f"Quantile scores at tau = {self.tau:g} relative to {self.baseline}"]
        lines.append("  ".join(["model".ljust(w0)] + [hd.rjust(w) for hd, w in zip(heads, widths)]))
        for m in models:
            cells = []
            for (h, p), w in zip([(h, p) for h in horizons for p in periods], widths):
                r = s[(s.model == m) & (s.horizon == h) & (s.period == p)]
                v = r["relative"].iloc[0] if len(r) else np.nan
                cells.append(("" if np.isnan(v) else f"{v:.3f}").rjust(w))
            lines.append("  ".join([m.ljust(w0)] + cells))
        return "\n".join(lines) + "\n"


def evaluate(paths: Mapping[str, QuantilePath], baseline: str, tau: float = 0.05,
             periods: Sequence[Period] = TABLE1_PERIODS,
             dispersion_periods: Sequence[Period] | None = DISPERSION_PERIODS,
             dispersion_models: Iterable[str] | None = None) -> EvaluationReport:
    """Score every model against ``baseline`` on their common origins."""
    if baseline not in paths:
        raise InputError(f"baseline model {baseline!r} not among {sorted(paths)}")
    rows = []
    rec = {}
    for h in paths[baseline].horizons:
        base = ScoreSeries.from_path(paths[baseline], tau, int(h), baseline)
        for name, path in paths.items():
            if int(h) not in path.horizons:
                continue
            ms = ScoreSeries.from_path(path, tau, int(h), name)
            common = np.intersect1d(ms.origins, base.origins)
            mm = _restrict(ms, common)
            bb = _restrict(base, common)
            rec[f"{name}_h{int(h)}"] = recursive_mean_path(mm, bb) if common.size and bb.scores[0] > 0 else pd.Series(dtype=float)
            for per in periods:
                m = per.mask(common)
                n = int(m.sum())
                mean = float(mm.scores[m].mean()) if n else np.nan
                try:
                    ratio = relative_mean_score(mm, bb, per) if n else np.nan
                except DomainError:
                    ratio = np.nan
                rows.append({"model": name, "horizon": int(h), "period": per.name, "n": n,
                             "mean_score": mean, "relative": ratio})
    disp = None
    if dispersion_periods is not None:
        names = list(dispersion_models) if dispersion_models is not None else [n for n in paths if n != baseline]
        parts = []
        for n in names:
            d = tail_dispersion(paths[n], dispersion_periods)
            d.insert(0, "model", n)
            parts.append(d)
        disp = pd.concat(parts, ignore_index=True) if parts else None
    scores = pd.DataFrame(rows, columns=["model", "horizon", "period", "n", "mean_score", "relative"])
    return EvaluationReport(scores, baseline, tau, disp, rec)


def _restrict(s: ScoreSeries, origins: np.ndarray) -> ScoreSeries:
    m = np.isin(s.origins, origins)
    return ScoreSeries(s.model, s.horizon, s.tau, s.origins[m], s.scores[m])
