"""Augmented Dickey-Fuller unit-root test and serial differencing.

Specification is constant-only (no trend):

    dy_t = alpha + gamma * y_{t-1} + sum_{k=1..p} delta_k * dy_{t-k} + e_t

with the test statistic gamma_hat / se(gamma_hat).  The lag order p is
chosen by AIC over 0..max_lag (candidates compared on a common sample,
then the winner refit on the full usable sample), with the Schwert rule
max_lag = floor(12 * (n/100)^(1/4)) as the default ceiling.  Critical
values come from the MacKinnon (2010) response-surface coefficients for
the constant-only case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from sempolar.errors import DegenerateInputError, InputError
from sempolar.polarity import SPPoint, SPSeries
from sempolar.stats.ols import fit_ols

STATIONARY = "stationary"
NON_STATIONARY = "non-stationary"

# MacKinnon (2010) response surface, constant-only, one series:
# crit(q, n) = b0 + b1/n + b2/n^2 + b3/n^3
_CRIT_COEF = {
    "1%": (-3.43035, -6.5393, -16.786, -79.433),
    "5%": (-2.86154, -2.8903, -4.234, -40.04),
    "10%": (-2.56677, -1.5384, -2.809, 0.0),
}


def critical_value(level: str, n: int) -> float:
    b0, b1, b2, b3 = _CRIT_COEF[level]
    return b0 + b1 / n + b2 / n**2 + b3 / n**3


@dataclass(frozen=True)
class AdfResult:
    statistic: float
    crit_1pct: float
    crit_5pct: float
    lags_used: int
    conclusion: str
    n: int

    @property
    def stationary(self) -> bool:
        return self.conclusion == STATIONARY


def _series_values(series) -> np.ndarray:
    if isinstance(series, SPSeries):
        return series.values()
    return np.asarray(series, dtype=np.float64)


def difference(series: SPSeries) -> SPSeries:
    """First differences; a difference touching a filled point stays flagged."""
    if len(series.points) < 2:
        raise InputError(f"cannot difference a series of length {len(series.points)}")
    points = []
    for prev, cur in zip(series.points, series.points[1:]):
        points.append(
            SPPoint(
                bucket=cur.bucket,
                value=cur.value - prev.value,
                filled=prev.filled or cur.filled,
                n1=cur.n1,
                n2=cur.n2,
            )
        )
    return SPSeries(series.keyword_id, series.pair, series.granularity, points)


def _adf_design(values: np.ndarray, p: int, start: int) -> tuple[np.ndarray, np.ndarray]:
    """Rows t = start .. len(dy)-1 of the lag-p regression (in dy index space)."""
    dy = np.diff(values)
    rows = np.arange(start, dy.shape[0])
    cols = [np.ones(rows.shape[0]), values[rows]]
    for k in range(1, p + 1):
        cols.append(dy[rows - k])
    return np.column_stack(cols), dy[rows]


def adf_test(series, max_lag: int | None = None) -> AdfResult:
    """ADF test with AIC lag selection; stationary iff statistic < 5% value."""
    values = _series_values(series)
    n = values.shape[0]
    if n < 20:
        raise InputError(f"ADF needs at least 20 observations, got {n}")
    if not np.all(np.isfinite(values)):
        raise InputError("series contains non-finite values")
    if np.ptp(values) == 0.0 or np.ptp(np.diff(values)) == 0.0:
        raise DegenerateInputError("series has zero variance; ADF statistic undefined")

    if max_lag is None:
        max_lag = int(math.floor(12.0 * (n / 100.0) ** 0.25))
    max_lag = max(0, min(max_lag, n // 2 - 3))

    # candidates share the sample starting at max_lag so AICs are comparable
    best_p = 0
    best_aic = math.inf
    for p in range(max_lag + 1):
        X, y = _adf_design(values, p, start=max_lag)
        fit = fit_ols(X, y)
        nobs = X.shape[0]
        rss = max(fit.rss, 1e-300)
        aic = nobs * math.log(rss / nobs) + 2.0 * fit.k
        if aic < best_aic:
            best_aic = aic
            best_p = p

    X, y = _adf_design(values, best_p, start=best_p)
    fit = fit_ols(X, y, need_cov=True)
    se = fit.stderr(1)
    if se == 0.0:
        raise DegenerateInputError("degenerate regression: zero standard error")
    stat = float(fit.coefficients[1]) / se
    nobs = X.shape[0]
    crit1 = critical_value("1%", nobs)
    crit5 = critical_value("5%", nobs)
    conclusion = STATIONARY if stat < crit5 else NON_STATIONARY
    return AdfResult(stat, crit1, crit5, best_p, conclusion, nobs)
