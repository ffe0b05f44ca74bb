"""Linear quantile regression baseline.

The default solver is iteratively reweighted least squares on a smoothed
check loss whose smoothing parameter is annealed down to ``1e-8``; the
result is then polished onto an exact vertex of the LP (``K`` zero
residuals) by a short exchange search among the observations with the
smallest residuals. ``method="lp"`` solves the LP directly with HiGHS.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd
from scipy import sparse
from scipy.linalg import lstsq
from scipy.optimize import linprog

from .dates import format_quarter, parse_quarter
from .errors import ConfigError, InputError, NumericalError, ParameterError, RankDeficiencyError, ShapeError
from .forecast import QuantilePath
from .pipeline import RegressionDataset

SMOOTH_START = 1e-2
SMOOTH_END = 1e-8
MAX_ITER = 200
POLISH_POOL = 40


@dataclass
class QuantileFit:
    tau: float
    coefficients: np.ndarray
    objective: float
    columns: tuple[str, ...] = ()
    n: int = 0
    method: str = "irls"
    iterations: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def K(self) -> int:
        return self.coefficients.size

    def to_frame(self) -> pd.DataFrame:
        cols = self.columns or tuple(f"x{j}" for j in range(self.K))
        return pd.DataFrame({"tau": self.tau, "coefficient": list(cols), "value": self.coefficients})

    def to_csv(self, path: str | Path) -> None:
        self.to_frame().to_csv(path, index=False)


def check_loss(u, tau: float):
    """``rho_tau(u) = u (tau - 1{u < 0})``."""
    u = np.asarray(u, dtype=float)
    return u * (tau - (u < 0))


def objective(b: np.ndarray, y: np.ndarray, X: np.ndarray, tau: float) -> float:
    return float(np.sum(check_loss(y - X @ b, tau)))


def collinear_columns(X: np.ndarray, columns: Sequence[str] | None = None, rtol: float = 1e-10) -> list[str]:
    """Columns that are linear combinations of the columns before them."""
    names = list(columns) if columns is not None else [f"x{j}" for j in range(X.shape[1])]
    scale = np.linalg.norm(X, axis=0)
    Z = X / np.where(scale > 0, scale, 1.0)
    bad = []
    kept = []
    for j in range(X.shape[1]):
        if scale[j] == 0:
            bad.append(names[j])
            continue
        cand = kept + [j]
        s = np.linalg.svd(Z[:, cand], compute_uv=False)
        if s[-1] <= rtol * max(s[0], 1.0) * max(X.shape):
            bad.append(names[j])
        else:
            kept.append(j)
    return bad


def _as_arrays(data, columns):
    if isinstance(data, RegressionDataset):
        d = data.training()
        return d.targets, d.regressors, tuple(d.columns)
    y, X = data
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).reshape(-1)
    if X.shape[0] != y.size:
        raise ShapeError("X and y have different numbers of rows")
    cols = tuple(columns) if columns is not None else tuple(f"x{j}" for j in range(X.shape[1]))
    return y, X, cols


def _irls(y, X, tau, tol, max_iter):
    b = lstsq(X, y)[0]
    eps = SMOOTH_START
    it = 0
    while it < max_iter:
        it += 1
        r = y - X @ b
        cw = np.where(r >= 0, tau, 1.0 - tau)
        w = cw / np.maximum(np.abs(r), eps)
        sw = np.sqrt(w)
        b_new = lstsq(X * sw[:, None], y * sw)[0]
        step = np.max(np.abs(b_new - b)) / (1.0 + np.max(np.abs(b)))
        b = b_new
        if step < tol:
            if eps <= SMOOTH_END:
                break
            eps = max(eps * 0.1, SMOOTH_END)
        elif step < 1e-4 and eps > SMOOTH_END:
            eps = max(eps * 0.1, SMOOTH_END)
    return b, it


def _vertex(y, X, basis):
    A = X[basis]
    if np.linalg.matrix_rank(A) < X.shape[1]:
        return None
    return np.linalg.solve(A, y[basis])


def _polish(b, y, X, tau, pool=POLISH_POOL, max_steps=100):
    """Move to an LP vertex near ``b`` and descend by single exchanges."""
    n, K = X.shape
    r = np.abs(y - X @ b)
    order = np.argsort(r, kind="stable")
    cand_pool = order[: min(n, max(pool, K))]
    basis = None
    best = None
    for combo in itertools.combinations(cand_pool[: min(len(cand_pool), K + 4)], K):
        v = _vertex(y, X, list(combo))
        if v is not None:
            basis, best = list(combo), v
            break
    if basis is None:
        return b, objective(b, y, X, tau)
    f_best = objective(best, y, X, tau)
    for _ in range(max_steps):
        improved = False
        r = np.abs(y - X @ best)
        near = np.argsort(r, kind="stable")[: min(n, pool)]
        for k in range(K):
            for i in near:
                if i in basis:
                    continue
                trial = basis.copy()
                trial[k] = int(i)
                v = _vertex(y, X, trial)
                if v is None:
                    continue
                f = objective(v, y, X, tau)
                if f < f_best - 1e-12 * (1.0 + abs(f_best)):
                    basis, best, f_best, improved = trial, v, f, True
        if not improved:
            break
    return best, f_best


def _lp(y, X, tau):
    n, K = X.shape
    # variables: b+ (K), b- (K), u+ (n), u- (n)
    c = np.concatenate([np.zeros(2 * K), np.full(n, tau), np.full(n, 1.0 - tau)])
    I = sparse.identity(n, format="csr")
    A = sparse.hstack([sparse.csr_matrix(X), sparse.csr_matrix(-X), I, -I], format="csr")
    res = linprog(c, A_eq=A, b_eq=y, bounds=[(0, None)] * (2 * K + 2 * n), method="highs")
    if not res.success:
        raise NumericalError(f"LP solver failed: {res.message}")
    return res.x[:K] - res.x[K: 2 * K]


def fit_quantile_regression(data, tau: float, columns: Sequence[str] | None = None, method: str = "irls",
                            tol: float = SMOOTH_END, max_iter: int = MAX_ITER, polish: bool = True) -> QuantileFit:
    """Minimize ``sum rho_tau(y_i - x_i' b)``.

    ``data`` is a RegressionDataset (observed rows) or a ``(y, X)`` pair.
    """
    if not 0 < tau < 1:
        raise ParameterError(f"tau must lie in (0, 1), got {tau}")
    y, X, cols = _as_arrays(data, columns)
    n, K = X.shape
    if n < K + 1:
        raise InputError(f"need at least K + 1 = {K + 1} rows, got {n}")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(X))):
        raise InputError("data must be finite")
    bad = collinear_columns(X, cols)
    if bad:
        raise RankDeficiencyError(f"design is rank deficient; collinear columns: {bad}", columns=bad)
    if method == "irls":
        b, it = _irls(y, X, tau, tol, max_iter)
        f = objective(b, y, X, tau)
        if polish:
            bv, fv = _polish(b, y, X, tau)
            if fv <= f + 1e-12 * (1.0 + abs(f)):
                b, f = bv, fv
    elif method == "lp":
        b, it = _lp(y, X, tau), 0
        f = objective(b, y, X, tau)
    else:
        raise ConfigError(f"unknown QR method {method!r}")
    return QuantileFit(float(tau), np.asarray(b, dtype=float), f, cols, n, method, it)


def predict_quantile(fit: QuantileFit, x) -> float:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != fit.K:
        raise ShapeError(f"x has {x.size} entries, fit has {fit.K} coefficients")
    return float(x @ fit.coefficients)


def lp_vertex_oracle(y, X, tau: float) -> tuple[np.ndarray, float]:
    """Exhaustive search over all ``K``-subsets of observations.

    Some optimal solution of the QR linear program interpolates ``K``
    observations, so the best vertex is a global minimizer. Only for tiny
    problems.
    """
    y = np.asarray(y, dtype=float)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n, K = X.shape
    best, f_best = None, np.inf
    for combo in itertools.combinations(range(n), K):
        A = X[list(combo)]
        if abs(np.linalg.det(A)) < 1e-12:
            continue
        b = np.linalg.solve(A, y[list(combo)])
        f = objective(b, y, X, tau)
        if f < f_best:
            best, f_best = b, f
    if best is None:
        raise RankDeficiencyError("no nonsingular K-subset")
    return best, f_best


def recursive_quantile_regression(data: RegressionDataset, start_origin: int | str, probs: Sequence[float] = (0.05, 0.95),
                                  min_train: int = 80, end_origin: int | str | None = None, stride: int = 1,
                                  model: str = "qr", method: str = "irls") -> QuantilePath:
    """Re-fit the QR at every origin on the same expanding windows as the TVP model."""
    start = parse_quarter(start_origin) if isinstance(start_origin, str) else int(start_origin)
    end = data.origins[-1] if end_origin is None else (
        parse_quarter(end_origin) if isinstance(end_origin, str) else int(end_origin))
    origins = [int(o) for o in data.origins if start <= o <= end][::stride]
    if not origins:
        raise ConfigError("no forecast origins in the requested range")
    records = []
    for t in origins:
        train = data.observed_through(t)
        if len(train) < min_train:
            raise ConfigError(
                f"origin {format_quarter(t)} leaves {len(train)} training rows; need at least {min_train}"
            )
        x = data.row(t)
        realized = float(data.targets[np.flatnonzero(data.origins == t)[0]])
        qs = [predict_quantile(fit_quantile_regression(train, p, method=method), x) for p in probs]
        # quantile crossing is not repaired; report in ascending order of probability
        for p, q in zip(probs, qs):
            records.append({"origin": t, "horizon": data.horizon, "prob": float(p), "quantile": q, "realized": realized})
    return QuantilePath.from_records(records, model)
