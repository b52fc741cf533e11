import numpy as np
import pytest
from scipy.special import kolmogorov as scipy_kolmogorov

from edgecount.errors import InvalidArgumentError
from edgecount.ks import chi2_2_cdf, kolmogorov_sf, ks_pvalue, ks_statistic, ks_test


def test_quantile_construction():
    # samples exactly at the (i - 0.5)/n quantiles give D = 1/(2n)
    n = 40
    u = (np.arange(1, n + 1) - 0.5) / n
    x = -2.0 * np.log(1.0 - u)  # chi2(2) quantiles
    assert ks_statistic(x, chi2_2_cdf) == pytest.approx(1 / (2 * n), abs=1e-12)


def test_single_sample_at_median():
    x = [-2.0 * np.log(0.5)]
    assert ks_statistic(x, chi2_2_cdf) == pytest.approx(0.5, abs=1e-12)


def test_empty_sample_rejected():
    with pytest.raises(InvalidArgumentError):
        ks_statistic([], chi2_2_cdf)
    with pytest.raises(InvalidArgumentError):
        ks_pvalue(0.1, 0)


def test_kolmogorov_critical_value():
    assert kolmogorov_sf(1.358) == pytest.approx(0.05, abs=5e-4)


def test_series_matches_scipy():
    for lam in (0.3, 0.5, 0.8, 1.0, 1.36, 2.0, 3.0):
        assert kolmogorov_sf(lam) == pytest.approx(float(scipy_kolmogorov(lam)), abs=1e-10)
    assert kolmogorov_sf(0.0) == 1.0
    assert 0.0 <= kolmogorov_sf(0.05) <= 1.0


def test_ks_level_calibration():
    # samples truly from chi2(2): rejection at 0.05 stays near 0.05
    rng = np.random.default_rng(3)
    rej = 0
    trials = 400
    for _ in range(trials):
        x = rng.exponential(2.0, size=500)  # chi2(2) = Exp(mean 2)
        _, p = ks_test(x, chi2_2_cdf)
        rej += p <= 0.05
    assert 0.02 <= rej / trials <= 0.08


def test_ks_pvalue_uniform_under_null():
    # the p-value itself is ~uniform: its own KS check has p > 0.01
    rng = np.random.default_rng(4)
    pvals = []
    for _ in range(2000):
        x = rng.exponential(2.0, size=200)
        pvals.append(ks_test(x, chi2_2_cdf)[1])
    d = ks_statistic(pvals, lambda t: np.clip(t, 0, 1))
    assert ks_pvalue(d, len(pvals)) > 0.01
