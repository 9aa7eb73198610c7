from sempolar.stats.ols import OlsFit, fit_ols
from sempolar.stats.special import f_sf, regularized_incomplete_beta
from sempolar.stats.adf import AdfResult, adf_test, difference
from sempolar.stats.granger import (
    GrangerResult,
    HypothesesReport,
    granger_test,
    run_hypotheses,
)

__all__ = [
    "OlsFit",
    "fit_ols",
    "regularized_incomplete_beta",
    "f_sf",
    "AdfResult",
    "adf_test",
    "difference",
    "GrangerResult",
    "HypothesesReport",
    "granger_test",
    "run_hypotheses",
]
