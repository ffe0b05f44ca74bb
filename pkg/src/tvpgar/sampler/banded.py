"""Gaussian draws from banded precision matrices."""

from __future__ import annotations

import logging

import numpy as np
from scipy.linalg import lapack

from ..errors import NumericalError

log = logging.getLogger(__name__)


def banded_cholesky(low: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor in LAPACK band storage.

    ``low[d, i]`` holds ``P[i + d, i]``. On numerical failure the diagonal is
    jittered (relative 1e-10, growing tenfold) before giving up.
    """
    chol, info = lapack.dpbtrf(low, lower=1)
    if info == 0:
        return chol
    scale = float(np.mean(np.abs(low[0]))) or 1.0
    jitter = 1e-10 * scale
    for _ in range(8):
        trial = low.copy()
        trial[0] += jitter
        chol, info = lapack.dpbtrf(trial, lower=1)
        if info == 0:
            log.warning("precision not positive definite; factorized with jitter %.3g", jitter)
            return chol
        jitter *= 10.0
    raise NumericalError("banded precision matrix is not positive definite")


def sample_banded(low: np.ndarray, rhs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draw ``x ~ N(P^{-1} rhs, P^{-1})`` for banded precision ``P``."""
    chol = banded_cholesky(low)
    mean, info = lapack.dpbtrs(chol, rhs[:, None], lower=1)
    if info != 0:
        raise NumericalError("banded solve failed")
    z = rng.standard_normal((rhs.size, 1))
    noise, info = lapack.dtbtrs(chol, z, uplo="L", trans="T")
    if info != 0:
        raise NumericalError("banded triangular solve failed")
    return (mean + noise)[:, 0]


def banded_to_dense(low: np.ndarray) -> np.ndarray:
    bw, n = low.shape
    P = np.zeros((n, n))
    for d in range(bw):
        idx = np.arange(n - d)
        P[idx + d, idx] = low[d, : n - d]
        P[idx, idx + d] = low[d, : n - d]
    return P
