"""One-sample Kolmogorov-Smirnov machinery against a known CDF.

Used to compare empirical permutation distributions of the generalized
statistic with its chi-square(2) reference, F(x) = 1 - exp(-x/2).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidArgumentError


def chi2_2_cdf(x):
    return 1.0 - np.exp(-0.5 * np.asarray(x, dtype=np.float64))


def ks_statistic(samples, cdf) -> float:
    """sup-norm distance between the empirical CDF and ``cdf``.

    D = max_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n) over the sorted sample.
    """
    x = np.sort(np.asarray(samples, dtype=np.float64))
    n = len(x)
    if n == 0:
        raise InvalidArgumentError("KS statistic needs a nonempty sample")
    f = np.asarray(cdf(x), dtype=np.float64)
    i = np.arange(1, n + 1)
    return float(np.max(np.maximum(i / n - f, f - (i - 1) / n)))


def kolmogorov_sf(lam: float) -> float:
    """Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).

    Alternating series truncated once terms drop below 1e-12; clamped into
    [0, 1] (for small lambda the partial sums can overshoot slightly).
    """
    if lam <= 0.0:
        return 1.0
    total = 0.0
    sign = 1.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * lam * lam)
        total += sign * term
        if term < 1e-12 or k > 100000:
            break
        sign = -sign
        k += 1
    return min(1.0, max(0.0, 2.0 * total))


def ks_pvalue(d_stat: float, n_samples: int) -> float:
    """Asymptotic p-value of the one-sample KS statistic."""
    if n_samples < 1:
        raise InvalidArgumentError("need at least one sample")
    return kolmogorov_sf(math.sqrt(n_samples) * d_stat)


def ks_test(samples, cdf) -> tuple[float, float]:
    d = ks_statistic(samples, cdf)
    return d, ks_pvalue(d, len(np.asarray(samples)))
