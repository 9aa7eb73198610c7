"""Ordinary least squares, the workhorse under the ADF and Granger tests."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from sempolar.errors import CollinearityError, InputError


@dataclass(frozen=True)
class OlsFit:
    """Least-squares fit of y on X (X includes any constant column)."""

    coefficients: np.ndarray
    rss: float
    n: int
    k: int
    xtx_inv: np.ndarray | None = None

    @property
    def sigma2(self) -> float:
        """Residual variance estimate RSS / (n - k)."""
        if self.n <= self.k:
            raise InputError(f"no residual degrees of freedom (n={self.n}, k={self.k})")
        return self.rss / (self.n - self.k)

    def stderr(self, j: int) -> float:
        if self.xtx_inv is None:
            raise InputError("fit was computed without covariance (need_cov=False)")
        return math.sqrt(self.sigma2 * self.xtx_inv[j, j])


def fit_ols(X: np.ndarray, y: np.ndarray, *, need_cov: bool = False) -> OlsFit:
    """Fit y = X b + e by least squares.

    Raises :class:`CollinearityError` when X is rank deficient, naming the
    shortfall; nested models fitted on the same rows therefore satisfy
    RSS_unrestricted <= RSS_restricted.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise InputError(f"incompatible shapes X{X.shape}, y{y.shape}")
    n, k = X.shape
    if n < k:
        raise InputError(f"underdetermined system: {n} rows < {k} regressors")
    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < k:
        raise CollinearityError(f"design matrix is rank deficient (rank {rank} < {k} columns)")
    resid = y - X @ coef
    rss = float(resid @ resid)
    xtx_inv = None
    if need_cov:
        xtx_inv = np.linalg.inv(X.T @ X)
    return OlsFit(coefficients=coef, rss=rss, n=n, k=k, xtx_inv=xtx_inv)
