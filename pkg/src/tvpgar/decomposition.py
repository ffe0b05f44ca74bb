"""Rolling linear summaries of predicted quantiles.

For each window end ``t`` the predicted quantiles ``Q_{s+h,p}`` are
regressed by OLS on the regressors ``x_s`` over ``s in (t - window, t]``.
Contributions ``alpha_j x_{t,j}`` at the window end add up to the fitted
value. Stacking the coefficients at a date across horizons gives the local
projections.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import pandas as pd
from scipy import stats
from scipy.linalg import qr as qr_decomp, solve_triangular

from .dates import format_quarter, parse_quarter
from .errors import AlignmentError, InputError, ParameterError
from .forecast import QuantilePath
from .pipeline import RegressionDataset

DEFAULT_WINDOW = 40
HAC_LAGS = 4
RANK_RTOL = 1e-10


@dataclass
class OlsResult:
    coefficients: np.ndarray  # NaN for dropped columns
    se: np.ndarray
    kept: np.ndarray  # boolean mask of columns used
    df: int
    r2: float


def _independent_columns(X: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Keep columns in order, dropping those spanned by earlier ones."""
    n, K = X.shape
    norms = np.linalg.norm(X, axis=0)
    keep = np.zeros(K, dtype=bool)
    basis = np.zeros((n, 0))
    for j in range(K):
        if norms[j] == 0:
            continue
        z = X[:, j] / norms[j]
        if basis.shape[1]:
            z = z - basis @ (basis.T @ z)
            z = z - basis @ (basis.T @ z)
        r = np.linalg.norm(z)
        if r > rtol * max(n, K) ** 0.5 * 1e2:
            keep[j] = True
            basis = np.column_stack([basis, z / r])
    return keep


def ols(y: np.ndarray, X: np.ndarray, cov: str = "classical", lags: int = HAC_LAGS) -> OlsResult:
    """OLS with collinear columns dropped; classical or Newey-West errors."""
    n, K = X.shape
    kept = _independent_columns(X)
    Xk = X[:, kept]
    k = Xk.shape[1]
    coef = np.full(K, np.nan)
    se = np.full(K, np.nan)
    if k == 0:
        return OlsResult(coef, se, kept, n, 0.0)
    # column equilibration keeps the triangular solves scale-free
    s = np.linalg.norm(Xk, axis=0)
    Q, R = qr_decomp(Xk / s, mode="economic")
    b = solve_triangular(R, Q.T @ y) / s
    resid = y - Xk @ b
    df = n - k
    Rinv = solve_triangular(R, np.eye(k))
    bread = (Rinv @ Rinv.T) / np.outer(s, s)  # (X'X)^{-1}
    if cov == "classical":
        sigma2 = float(resid @ resid) / df if df > 0 else np.nan
        V = sigma2 * bread
    elif cov == "hac":
        u = Xk * resid[:, None]
        S = u.T @ u
        for l in range(1, min(lags, n - 1) + 1):
            w = 1.0 - l / (lags + 1.0)
            G = u[l:].T @ u[:-l]
            S += w * (G + G.T)
        V = bread @ S @ bread * (n / df if df > 0 else np.nan)
    else:
        raise ParameterError(f"unknown covariance type {cov!r}")
    coef[kept] = b
    se[kept] = np.sqrt(np.maximum(np.diag(V), 0.0))
    tss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(resid @ resid) / tss if tss > 0 else 1.0
    return OlsResult(coef, se, kept, df, r2)


@dataclass
class DecompositionResult:
    """Per window end: coefficients, errors, flags, contributions, fit."""

    horizon: int
    prob: float
    columns: tuple[str, ...]
    window: int
    window_end: np.ndarray
    coefficients: np.ndarray
    se: np.ndarray
    significant: np.ndarray
    contributions: np.ndarray
    fitted: np.ndarray
    model_quantile: np.ndarray
    r2: np.ndarray
    rank_deficient: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def t_stats(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.coefficients / self.se

    def at(self, date: int | str) -> int:
        d = parse_quarter(date) if isinstance(date, str) else int(date)
        pos = np.flatnonzero(self.window_end == d)
        if pos.size == 0:
            raise InputError(f"no window ends at {format_quarter(d)}")
        return int(pos[0])

    def to_frame(self) -> pd.DataFrame:
        W, K = self.coefficients.shape
        return pd.DataFrame({
            "window_end": np.repeat([format_quarter(int(t)) for t in self.window_end], K),
            "horizon": self.horizon,
            "prob": self.prob,
            "regressor": np.tile(self.columns, W),
            "coefficient": self.coefficients.reshape(-1),
            "se": self.se.reshape(-1),
            "significant": self.significant.reshape(-1),
            "contribution": self.contributions.reshape(-1),
            "fitted": np.repeat(self.fitted, K),
            "model_quantile": np.repeat(self.model_quantile, K),
            "rank_deficient": np.repeat(self.rank_deficient, K),
        })

    def to_csv(self, path: str | Path) -> None:
        self.to_frame().to_csv(path, index=False)


def linear_posterior_summary(quantiles: QuantilePath | pd.Series, data: RegressionDataset, p: float,
                             window: int = DEFAULT_WINDOW, cov: str = "classical", lags: int = HAC_LAGS,
                             level: float = 0.05) -> DecompositionResult:
    """Rolling OLS of predicted quantiles on the regressors.

    ``quantiles`` is a QuantilePath (the rows for ``p`` and the dataset's
    horizon are used) or a Series of quantiles indexed by origin. Windows
    cover consecutive origins present in both inputs. Columns that are
    collinear within a window are dropped (coefficient NaN, contribution 0)
    and the window is flagged ``rank_deficient``.
    """
    K = data.K
    if window < K + 2:
        raise ParameterError(f"window must be >= K + 2 = {K + 2}")
    if isinstance(quantiles, QuantilePath):
        q = quantiles.series(p, data.horizon)["quantile"]
    else:
        q = pd.Series(quantiles)
    common = np.intersect1d(q.index.to_numpy(dtype=np.int64), data.origins)
    if common.size < window:
        raise InputError(f"only {common.size} aligned origins; window needs {window}")
    # a strided recursive run is fine as long as the spacing is even
    if common.size > 1 and np.any(np.diff(common) != common[1] - common[0]):
        raise AlignmentError("aligned origins must be evenly spaced quarters")
    Q = q.loc[common].to_numpy(dtype=float)
    X = data.regressors[np.searchsorted(data.origins, common)]
    W = common.size - window + 1
    coef = np.full((W, K), np.nan)
    se = np.full((W, K), np.nan)
    sig = np.zeros((W, K), dtype=bool)
    contrib = np.zeros((W, K))
    fitted = np.zeros(W)
    r2 = np.zeros(W)
    deficient = np.zeros(W, dtype=bool)
    for i in range(W):
        sl = slice(i, i + window)
        res = ols(Q[sl], X[sl], cov, lags)
        coef[i], se[i], r2[i] = res.coefficients, res.se, res.r2
        deficient[i] = not res.kept.all()
        crit = stats.t.ppf(1.0 - level / 2.0, res.df) if res.df > 0 else np.inf
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.abs(res.coefficients / res.se)
        sig[i] = np.where(np.isnan(t), False, t > crit)
        xt = X[i + window - 1]
        contrib[i] = np.where(res.kept, np.nan_to_num(res.coefficients) * xt, 0.0)
        fitted[i] = contrib[i].sum()
    return DecompositionResult(
        data.horizon, float(p), tuple(data.columns), window, common[window - 1:], coef, se, sig,
        contrib, fitted, Q[window - 1:], r2, deficient, {"cov": cov, "lags": lags, "level": level},
    )


def local_projections(results: Mapping[int, DecompositionResult], dates: Sequence[int | str]) -> pd.DataFrame:
    """Coefficients at fixed dates as a function of the horizon."""
    if not results:
        raise InputError("no decomposition results supplied")
    parsed = [parse_quarter(d) if isinstance(d, str) else int(d) for d in dates]
    gaps = []
    for h, res in results.items():
        for d in parsed:
            if d not in set(res.window_end.tolist()):
                gaps.append(f"h={h} at {format_quarter(d)}")
    if gaps:
        raise InputError(f"missing decompositions: {', '.join(gaps)}")
    rows = []
    for d in parsed:
        for h in sorted(results):
            res = results[h]
            i = res.at(d)
            for j, name in enumerate(res.columns):
                rows.append({"date": format_quarter(d), "regressor": name, "horizon": int(h), "prob": res.prob,
                             "coefficient": res.coefficients[i, j], "se": res.se[i, j],
                             "significant": bool(res.significant[i, j])})
    return pd.DataFrame(rows, columns=["date", "regressor", "horizon", "prob", "coefficient", "se", "significant"])
