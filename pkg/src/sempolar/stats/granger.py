"""Granger-causality F-tests over paired SP series.

For lag L and aligned series x, y of length n the restricted model
regresses y_t on a constant and y_{t-1..t-L}; the unrestricted model adds
x_{t-1..t-L}.  With n_eff = n - L usable rows,

    F = ((RSS_r - RSS_u) / L) / (RSS_u / (n_eff - 2L - 1))

and the p-value is the F(L, n_eff - 2L - 1) upper tail.
``run_hypotheses`` wraps the full bidirectional procedure: ADF both
series, difference a failing series once, then test every lag in range
both ways.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from sempolar.errors import DegenerateInputError, InputError
from sempolar.polarity import SPSeries
from sempolar.stats.adf import AdfResult, adf_test, difference
from sempolar.stats.ols import fit_ols
from sempolar.stats.special import f_sf

UNCORRECTED_NOTE = "p-values are uncorrected for multiple comparisons across lags"


@dataclass(frozen=True)
class GrangerResult:
    direction: str
    lag: int
    f_value: float
    p_value: float
    n_effective: int

    def significant(self, alpha: float = 0.05) -> bool:
        return self.p_value < alpha


def _lagged_columns(values: np.ndarray, lag: int, rows: np.ndarray) -> list[np.ndarray]:
    return [values[rows - k] for k in range(1, lag + 1)]


def granger_test(x, y, lag: int, *, direction: str = "x->y") -> GrangerResult:
    """Does past x improve prediction of y beyond y's own past?"""
    x = np.asarray(x.values() if isinstance(x, SPSeries) else x, dtype=np.float64)
    y = np.asarray(y.values() if isinstance(y, SPSeries) else y, dtype=np.float64)
    if lag < 1:
        raise InputError(f"lag must be >= 1, got {lag}")
    if x.shape != y.shape or x.ndim != 1:
        raise InputError(f"series must be 1-d and aligned, got {x.shape} vs {y.shape}")
    n = x.shape[0]
    if n < 3 * lag + 4:
        raise InputError(f"need at least {3 * lag + 4} observations for lag {lag}, got {n}")

    rows = np.arange(lag, n)
    n_eff = rows.shape[0]
    target = y[rows]
    const = np.ones(n_eff)
    restricted = np.column_stack([const, *_lagged_columns(y, lag, rows)])
    unrestricted = np.column_stack([restricted, *_lagged_columns(x, lag, rows)])

    fit_r = fit_ols(restricted, target)
    fit_u = fit_ols(unrestricted, target)
    df2 = n_eff - 2 * lag - 1
    rss_u = fit_u.rss
    rss_r = max(fit_r.rss, rss_u)  # nested: equality is the floor, fp dust clipped
    if rss_u <= 1e-300:
        return GrangerResult(direction, lag, math.inf, 0.0, n_eff)
    f_value = ((rss_r - rss_u) / lag) / (rss_u / df2)
    return GrangerResult(direction, lag, f_value, f_sf(f_value, lag, df2), n_eff)


@dataclass
class AdfTrail:
    """ADF verdicts for one series, before and (if needed) after differencing."""

    initial: AdfResult
    differenced: bool = False
    after: AdfResult | None = None

    @property
    def final(self) -> AdfResult:
        return self.after if self.after is not None else self.initial


@dataclass
class HypothesesReport:
    results: list[GrangerResult] = field(default_factory=list)
    adf: dict[str, AdfTrail] = field(default_factory=dict)
    min_significant: dict[str, int | None] = field(default_factory=dict)
    alpha: float = 0.05
    note: str = UNCORRECTED_NOTE

    def significant_lags(self, direction: str) -> list[int]:
        return [r.lag for r in self.results if r.direction == direction and r.significant(self.alpha)]


def _stationary_values(series: SPSeries, name: str, report: HypothesesReport) -> np.ndarray:
    trail = AdfTrail(initial=adf_test(series))
    used = series
    if not trail.initial.stationary:
        used = difference(series)
        trail.differenced = True
        trail.after = adf_test(used)
        if not trail.after.stationary:
            raise DegenerateInputError(
                f"series {name!r} remains non-stationary after one differencing pass"
            )
    report.adf[name] = trail
    return used.values()


def run_hypotheses(
    tv: SPSeries,
    tw: SPSeries,
    lag_range: tuple[int, int] = (1, 12),
    *,
    alpha: float = 0.05,
    names: tuple[str, str] = ("tv", "tw"),
) -> HypothesesReport:
    """Bidirectional Granger battery over a lag range.

    Each series failing ADF at 5% is differenced exactly once and
    re-tested (an error if still failing); the other side is trimmed from
    the front so both stay aligned.  Directions are ``{tv}->{tw}`` (H1)
    and ``{tw}->{tv}`` (H2).
    """
    report = HypothesesReport(alpha=alpha)
    tv_vals = _stationary_values(tv, names[0], report)
    tw_vals = _stationary_values(tw, names[1], report)
    m = min(tv_vals.shape[0], tw_vals.shape[0])
    tv_vals = tv_vals[tv_vals.shape[0] - m :]
    tw_vals = tw_vals[tw_vals.shape[0] - m :]

    h1 = f"{names[0]}->{names[1]}"
    h2 = f"{names[1]}->{names[0]}"
    lo, hi = lag_range
    if lo < 1 or hi < lo:
        raise InputError(f"bad lag range {lag_range}")
    for lag in range(lo, hi + 1):
        report.results.append(granger_test(tv_vals, tw_vals, lag, direction=h1))
        report.results.append(granger_test(tw_vals, tv_vals, lag, direction=h2))
    for direction in (h1, h2):
        sig = report.significant_lags(direction)
        report.min_significant[direction] = min(sig) if sig else None
    return report
