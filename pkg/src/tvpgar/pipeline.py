"""Quarterly series transforms and regression-dataset assembly.

Growth rates are annualized percent. Every transform returns a new series
whose ``start`` reflects the observations lost to lags or leads.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import pandas as pd
from scipy.interpolate import make_interp_spline
from scipy.linalg import solveh_banded

from .dates import format_quarter, parse_quarter, parse_year, quarter_of
from .errors import (
    AlignmentError,
    DomainError,
    InputError,
    InsufficientDataError,
    LengthError,
    SchemaError,
)

HP_LAMBDA_SLOW = 5e6
BASELINE_COLUMNS = ("stress",)
EXTENDED_COLUMNS = ("stress", "credit_growth", "house_growth")


@dataclass(frozen=True)
class QuarterlySeries:
    name: str
    start: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.size < 1:
            raise LengthError(f"series {self.name!r} is empty")
        if not np.all(np.isfinite(v)):
            raise InputError(f"series {self.name!r} contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "start", int(self.start))

    def __len__(self) -> int:
        return self.values.size

    @property
    def end(self) -> int:
        return self.start + self.values.size - 1

    @property
    def index(self) -> np.ndarray:
        return np.arange(self.start, self.end + 1)

    def dates(self) -> list[str]:
        return [format_quarter(q) for q in self.index]

    def window(self, first: int, last: int) -> "QuarterlySeries":
        if first < self.start or last > self.end or last < first:
            raise AlignmentError(
                f"{self.name!r} covers {format_quarter(self.start)}..{format_quarter(self.end)}, "
                f"requested {format_quarter(first)}..{format_quarter(last)}"
            )
        return QuarterlySeries(self.name, first, self.values[first - self.start : last - self.start + 1])

    def renamed(self, name: str) -> "QuarterlySeries":
        return QuarterlySeries(name, self.start, self.values)


@dataclass(frozen=True)
class AnnualSeries:
    name: str
    start: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.size < 1:
            raise LengthError(f"series {self.name!r} is empty")
        if not np.all(np.isfinite(v)):
            raise InputError(f"series {self.name!r} contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "start", int(self.start))

    def __len__(self) -> int:
        return self.values.size

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.start, self.start + self.values.size)


@dataclass
class RegressionDataset:
    """Direct-forecast pairs ``(x_t, y_{t+h})`` for one horizon.

    Rows whose target lies beyond the sample carry ``NaN`` targets and are
    flagged by :attr:`forecast_only`.
    """

    horizon: int
    origins: np.ndarray
    targets: np.ndarray
    regressors: np.ndarray
    columns: tuple[str, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.origins = np.asarray(self.origins, dtype=np.int64).reshape(-1)
        self.targets = np.asarray(self.targets, dtype=float).reshape(-1)
        self.regressors = np.atleast_2d(np.asarray(self.regressors, dtype=float))
        self.columns = tuple(self.columns)
        n = self.origins.size
        if self.horizon < 1:
            raise InputError("horizon must be >= 1")
        if self.targets.size != n or self.regressors.shape[0] != n:
            raise AlignmentError("origins, targets and regressors must have equal length")
        if self.regressors.shape[1] != len(self.columns):
            raise AlignmentError("column names do not match regressor width")
        if not np.all(np.isfinite(self.regressors)):
            raise InputError("regressors must be finite")
        if n > 1 and np.any(np.diff(self.origins) != 1):
            raise AlignmentError("origins must be consecutive quarters")
        tail = np.isnan(self.targets)
        if np.any(np.isinf(self.targets)):
            raise InputError("targets must be finite or NaN (forecast-only)")
        if tail.any() and not np.all(tail[np.argmax(tail):]):
            raise AlignmentError("forecast-only rows must form a trailing block")

    @property
    def K(self) -> int:
        return self.regressors.shape[1]

    @property
    def forecast_only(self) -> np.ndarray:
        return np.isnan(self.targets)

    def __len__(self) -> int:
        return self.origins.size

    def training(self) -> "RegressionDataset":
        """Rows with an observed target."""
        keep = ~self.forecast_only
        return self.subset(keep)

    def subset(self, mask: np.ndarray) -> "RegressionDataset":
        mask = np.asarray(mask)
        return RegressionDataset(
            self.horizon,
            self.origins[mask],
            self.targets[mask],
            self.regressors[mask],
            self.columns,
            dict(self.meta),
        )

    def observed_through(self, date: int) -> "RegressionDataset":
        """Pairs whose target date ``origin + h`` is at or before ``date``."""
        mask = (self.origins + self.horizon <= date) & ~self.forecast_only
        return self.subset(mask)

    def row(self, origin: int) -> np.ndarray:
        pos = np.flatnonzero(self.origins == origin)
        if pos.size == 0:
            raise AlignmentError(f"origin {format_quarter(origin)} not in dataset")
        return self.regressors[pos[0]].copy()

    def to_frame(self) -> pd.DataFrame:
        df = pd.DataFrame(self.regressors, columns=list(self.columns))
        df.insert(0, "target", self.targets)
        df.insert(0, "date", [format_quarter(q) for q in self.origins])
        df["forecast_only"] = self.forecast_only.astype(int)
        return df

    def to_csv(self, path: str | Path) -> None:
        self.to_frame().to_csv(path, index=False)

    @classmethod
    def from_csv(cls, path: str | Path, horizon: int | None = None) -> "RegressionDataset":
        df = pd.read_csv(path, float_precision="round_trip")
        for col in ("date", "target"):
            if col not in df.columns:
                raise SchemaError(f"{path}: missing column {col!r}", column=col)
        cols = [c for c in df.columns if c not in ("date", "target", "forecast_only")]
        origins = [parse_quarter(d) for d in df["date"]]
        if horizon is None:
            horizon = _horizon_from_name(Path(path).name)
        return cls(horizon, origins, df["target"].to_numpy(float), df[cols].to_numpy(float), cols)


def _horizon_from_name(name: str) -> int:
    import re

    m = re.search(r"_h(\d+)", name)
    if m is None:
        raise InputError(f"cannot infer horizon from file name {name!r}")
    return int(m.group(1))


def growth_target(log_gdp: QuarterlySeries, h: int) -> QuarterlySeries:
    """Annualized percent growth from ``t`` to ``t + h``, indexed by origin ``t``."""
    if h < 1:
        raise InputError("h must be >= 1")
    y = log_gdp.values
    if y.size <= h:
        raise LengthError(f"need more than {h} observations, got {y.size}")
    return QuarterlySeries(f"{log_gdp.name}_growth_h{h}", log_gdp.start, (y[h:] - y[:-h]) * (400.0 / h))


def lagged_growth(log_gdp: QuarterlySeries) -> QuarterlySeries:
    """One-quarter annualized growth observed at ``t``: ``400 (Y_t - Y_{t-1})``."""
    y = log_gdp.values
    if y.size < 2:
        raise LengthError("need at least two observations")
    return QuarterlySeries("lag_growth", log_gdp.start + 1, np.diff(y) * 400.0)


def _second_difference_bands(n: int, lam: float) -> np.ndarray:
    """Upper banded storage of ``I + lam D'D`` for solveh_banded."""
    ab = np.zeros((3, n))
    diag = np.zeros(n)
    off1 = np.zeros(n - 1)
    off2 = np.zeros(n - 2)
    m = n - 2
    for a, ca in enumerate((1.0, -2.0, 1.0)):
        diag[a : a + m] += ca * ca
    off1[0:m] += 1.0 * -2.0
    off1[1 : m + 1] += -2.0 * 1.0
    off2[:m] += 1.0
    ab[2] = 1.0 + lam * diag
    ab[1, 1:] = lam * off1
    ab[0, 2:] = lam * off2
    return ab


def _banded_matvec(ab: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = ab[2] * x
    out[:-1] += ab[1, 1:] * x[1:]
    out[1:] += ab[1, 1:] * x[:-1]
    out[:-2] += ab[0, 2:] * x[2:]
    out[2:] += ab[0, 2:] * x[:-2]
    return out


def hp_detrend(series: QuarterlySeries, lam: float = 1600.0) -> tuple[QuarterlySeries, QuarterlySeries]:
    """Hodrick-Prescott trend and cycle.

    Solves ``(I + lam D'D) trend = y`` with a banded Cholesky factorization of
    the pentadiagonal system, followed by one step of iterative refinement
    (the system is poorly conditioned for slow-moving filters). The
    least-squares line is taken out first and added back, which is exact
    because ``D`` annihilates lines.

    Returns
    -------
    trend, cycle : QuarterlySeries
    """
    y = series.values
    if not np.all(np.isfinite(y)):
        raise InputError("series must be finite")
    if y.size < 4:
        raise LengthError("HP filter needs at least 4 observations")
    if not lam > 0:
        raise InputError("lambda must be positive")
    ab = _second_difference_bands(y.size, float(lam))
    # lines pass through the filter unchanged, so filter the deviation from
    # the least-squares line; this keeps the error small for large lambda
    s = np.arange(y.size, dtype=float) - 0.5 * (y.size - 1)
    line = y.mean() + s * (s @ y) / (s @ s)
    dev = y - line
    trend = solveh_banded(ab, dev)
    trend = trend + solveh_banded(ab, dev - _banded_matvec(ab, trend))
    trend = line + trend
    return (
        QuarterlySeries(f"{series.name}_trend", series.start, trend),
        QuarterlySeries(f"{series.name}_cycle", series.start, y - trend),
    )


def spline_disaggregate(annual: AnnualSeries, knot_quarter: int = 4) -> QuarterlySeries:
    """Quarterly path from a C1 quadratic interpolating spline.

    Annual values are placed at quarter ``knot_quarter`` of their year. The
    output spans the first knot to the last knot; nothing is extrapolated.
    """
    if len(annual) < 3:
        raise InsufficientDataError("quadratic spline needs at least 3 annual observations")
    if not 1 <= knot_quarter <= 4:
        raise InputError("knot_quarter must be in 1..4")
    knots = np.array([quarter_of(int(y), knot_quarter) for y in annual.years])
    x = (knots - knots[0]).astype(float)
    spline = make_interp_spline(x, annual.values, k=2)
    grid = np.arange(0, knots[-1] - knots[0] + 1, dtype=float)
    return QuarterlySeries(annual.name, int(knots[0]), spline(grid))


def avg_log_growth_3y(series: QuarterlySeries) -> QuarterlySeries:
    """Trailing three-year average log growth, annualized percent."""
    x = series.values
    if np.any(x <= 0):
        raise DomainError(f"{series.name!r}: log growth needs strictly positive levels")
    if x.size <= 12:
        raise LengthError("need more than 12 quarterly observations")
    lx = np.log(x)
    return QuarterlySeries(f"{series.name}_g3y", series.start + 12, (lx[12:] - lx[:-12]) / 3.0 * 100.0)


def zscore(series: QuarterlySeries) -> QuarterlySeries:
    v = series.values
    sd = v.std(ddof=1) if v.size > 1 else 0.0
    if sd == 0:
        raise DomainError("cannot standardize a constant series")
    return QuarterlySeries(series.name, series.start, (v - v.mean()) / sd)


def assemble_dataset(
    gdp: QuarterlySeries,
    predictors: Sequence[QuarterlySeries],
    h: int,
    columns: Sequence[str] = BASELINE_COLUMNS,
) -> RegressionDataset:
    """Align the target and regressors on their common quarter range.

    ``gdp`` is log real GDP. The design matrix is
    ``[intercept, lag_growth, *columns]`` where each name in ``columns``
    selects a series from ``predictors`` by name. Origins run over the
    maximal common support of the regressors; origins whose target date
    falls past the end of ``gdp`` are kept as forecast-only rows.
    """
    by_name = {p.name: p for p in predictors}
    missing = [c for c in columns if c not in by_name]
    if missing:
        raise SchemaError(f"predictor series not supplied: {missing}", column=missing[0])
    lag = lagged_growth(gdp)
    target = growth_target(gdp, h)
    parts = [lag] + [by_name[c] for c in columns]
    first = max(p.start for p in parts)
    last = min(p.end for p in parts)
    # the target must exist at the first origin, otherwise the dataset is unusable
    if last < first or target.end < first:
        raise AlignmentError("series have no common quarter range")
    origins = np.arange(first, last + 1)
    X = np.column_stack([np.ones(origins.size)] + [p.window(first, last).values for p in parts])
    y = np.full(origins.size, np.nan)
    have = origins <= target.end
    y[have] = target.values[origins[have] - target.start]
    names = ("intercept", "lag_growth", *columns)
    meta = {"first_origin": format_quarter(first), "last_origin": format_quarter(last)}
    return RegressionDataset(h, origins, y, X, names, meta)


# ---------------------------------------------------------------------------
# CSV input


def read_quarterly_csv(source: str | Path | io.TextIOBase) -> list[QuarterlySeries]:
    """Read a ``date,<col>,...`` CSV with YYYY-Qn dates into one series per column.

    Empty cells are allowed only at the ends of a column; each column keeps
    its own contiguous range.
    """
    df = pd.read_csv(source, dtype={"date": str}, float_precision="round_trip")
    dates = _parse_dates(df, parse_quarter, "YYYY-Qn", source)
    return [_column_series(df, c, dates, QuarterlySeries, source) for c in df.columns if c != "date"]


def read_annual_csv(source: str | Path | io.TextIOBase) -> list[AnnualSeries]:
    df = pd.read_csv(source, dtype={"date": str}, float_precision="round_trip")
    years = _parse_dates(df, parse_year, "YYYY", source)
    return [_column_series(df, c, years, AnnualSeries, source) for c in df.columns if c != "date"]


def _parse_dates(df: pd.DataFrame, parser, fmt: str, source) -> np.ndarray:
    if df.columns.size == 0 or df.columns[0] != "date":
        raise SchemaError(f"{source}: first column must be 'date'", column="date", row=0)
    out = []
    for i, tok in enumerate(df["date"]):
        try:
            out.append(parser(tok))
        except ValueError:
            raise SchemaError(f"{source}: bad date {tok!r}, expected {fmt}", column="date", row=i + 2) from None
    out = np.asarray(out)
    if out.size > 1 and np.any(np.diff(out) != 1):
        bad = int(np.flatnonzero(np.diff(out) != 1)[0]) + 1
        raise SchemaError(f"{source}: dates are not consecutive", column="date", row=bad + 2)
    return out


def _column_series(df, col, stamps, cls, source):
    try:
        vals = pd.to_numeric(df[col], errors="raise").to_numpy(float)
    except (ValueError, TypeError):
        bad = pd.to_numeric(df[col], errors="coerce").isna() & df[col].notna()
        row = int(np.flatnonzero(bad.to_numpy())[0]) + 2
        raise SchemaError(f"{source}: non-numeric value in column {col!r}", column=col, row=row) from None
    ok = np.isfinite(vals)
    if not ok.any():
        raise SchemaError(f"{source}: column {col!r} has no values", column=col)
    lo, hi = np.flatnonzero(ok)[[0, -1]]
    if not ok[lo : hi + 1].all():
        row = int(lo + np.flatnonzero(~ok[lo : hi + 1])[0]) + 2
        raise SchemaError(f"{source}: interior gap in column {col!r}", column=col, row=row)
    return cls(col, int(stamps[lo]), vals[lo : hi + 1])


def series_to_frame(series: Iterable[QuarterlySeries]) -> pd.DataFrame:
    frames = [pd.Series(s.values, index=s.index, name=s.name) for s in series]
    df = pd.concat(frames, axis=1).sort_index()
    df.insert(0, "date", [format_quarter(q) for q in df.index])
    return df.reset_index(drop=True)


def build_predictors(
    quarterly: dict[str, QuarterlySeries],
    annual: dict[str, AnnualSeries],
    *,
    stress: str = "stress",
    credit: str | None = "credit_to_gdp",
    house: str | None = "house_price",
    hp_lambda: float = HP_LAMBDA_SLOW,
    knot_quarter: int = 4,
    standardize_stress: bool = False,
) -> list[QuarterlySeries]:
    """Turn raw inputs into the named predictor series used by the models.

    The stress index is HP-detrended (its cycle is kept); credit-to-GDP and
    real house prices are disaggregated to quarters and converted to
    three-year average log growth. Credit and house inputs may come from
    either the annual or the quarterly file.
    """
    if stress not in quarterly:
        raise SchemaError(f"quarterly input lacks column {stress!r}", column=stress)
    _, cycle = hp_detrend(quarterly[stress], hp_lambda)
    if standardize_stress:
        cycle = zscore(cycle)
    out = [cycle.renamed("stress")]
    for src, name in ((credit, "credit_growth"), (house, "house_growth")):
        if src is None:
            continue
        if src in annual:
            q = spline_disaggregate(annual[src], knot_quarter)
        elif src in quarterly:
            q = quarterly[src]
        else:
            continue
        out.append(avg_log_growth_3y(q).renamed(name))
    return out
