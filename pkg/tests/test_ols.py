import numpy as np
import pytest

from sempolar.errors import CollinearityError, InputError
from sempolar.stats import fit_ols


def test_closed_form_orthogonal_design():
    # X columns orthogonal: b_j = (x_j . y) / (x_j . x_j), hand-computable
    x0 = np.ones(10)
    x1 = np.array([1.0, -1.0] * 5)
    X = np.column_stack([x0, x1])
    y = np.arange(10, dtype=float)
    fit = fit_ols(X, y)
    b0_hand = float(x0 @ y) / 10.0
    b1_hand = float(x1 @ y) / 10.0
    assert abs(fit.coefficients[0] - b0_hand) < 1e-10
    assert abs(fit.coefficients[1] - b1_hand) < 1e-10
    resid = y - X @ np.array([b0_hand, b1_hand])
    assert abs(fit.rss - float(resid @ resid)) < 1e-10
    assert fit.n == 10 and fit.k == 2


def test_exact_fit_zero_rss():
    X = np.column_stack([np.ones(6), np.arange(6.0)])
    y = 3.0 + 2.0 * np.arange(6.0)
    fit = fit_ols(X, y)
    assert fit.rss < 1e-20
    assert fit.coefficients == pytest.approx([3.0, 2.0], abs=1e-12)


def test_nested_rss_ordering():
    rng = np.random.default_rng(0)
    for _ in range(50):
        X = rng.standard_normal((20, 4))
        y = rng.standard_normal(20)
        small = fit_ols(X[:, :2], y)
        big = fit_ols(X, y)
        assert big.rss <= small.rss + 1e-9


def test_collinear_raises_with_rank():
    x = np.arange(10.0)
    X = np.column_stack([np.ones(10), x, 2.0 * x])
    with pytest.raises(CollinearityError, match="rank"):
        fit_ols(X, np.ones(10))


def test_stderr_matches_textbook_simple_regression():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(40)
    y = 1.0 + 0.5 * x + rng.standard_normal(40) * 0.3
    X = np.column_stack([np.ones(40), x])
    fit = fit_ols(X, y, need_cov=True)
    resid = y - X @ fit.coefficients
    s2 = float(resid @ resid) / (40 - 2)
    se_slope = np.sqrt(s2 / float(((x - x.mean()) ** 2).sum()))
    assert abs(fit.stderr(1) - se_slope) < 1e-12


def test_shape_errors():
    with pytest.raises(InputError):
        fit_ols(np.ones((3, 2)), np.ones(4))
    with pytest.raises(InputError):
        fit_ols(np.ones((2, 3)), np.ones(2))  # underdetermined
