"""Scalar special functions for the variance-stabilizing transform and test thresholds.

Only what the stationarity tests need: digamma, trigamma and the chi-square
quantile. Digamma/trigamma use upward recurrence into the asymptotic regime
plus a Bernoulli-number tail; the quantile inverts the regularized incomplete
gamma CDF by bracketed root search.
"""

import math
from functools import lru_cache

from scipy.optimize import brentq
from scipy.special import gammainc

__all__ = ["digamma", "trigamma", "chi2_cdf", "chi2_quantile"]

# Asymptotic series kick in here; terms below are B_{2n} coefficients.
_ASYMPTOTIC_X = 10.0

# psi(x) ~ ln x - 1/(2x) - sum c[n] / x^(2n+2), c[n] = B_{2n+2} / (2n+2)
_DIGAMMA_TAIL = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)

# psi'(x) ~ 1/x + 1/(2x^2) + sum c[n] / x^(2n+3), c[n] = B_{2n+2}
_TRIGAMMA_TAIL = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
)


def digamma(x: float) -> float:
    """Digamma function psi(x) for real x > 0."""
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"digamma requires x > 0, got {x}")
    acc = 0.0
    while x < _ASYMPTOTIC_X:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = 0.0
    power = inv2
    for c in _DIGAMMA_TAIL:
        tail += c * power
        power *= inv2
    return acc + math.log(x) - 0.5 / x - tail


def trigamma(x: float) -> float:
    """Trigamma function psi'(x) for real x > 0."""
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"trigamma requires x > 0, got {x}")
    acc = 0.0
    while x < _ASYMPTOTIC_X:
        acc += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    tail = 0.0
    power = inv * inv2
    for c in _TRIGAMMA_TAIL:
        tail += c * power
        power *= inv2
    return acc + inv + 0.5 * inv2 + tail


def chi2_cdf(x: float, df: int) -> float:
    """CDF of the chi-square distribution with ``df`` degrees of freedom."""
    df = _check_df(df)
    if x <= 0.0:
        return 0.0
    return float(gammainc(df / 2.0, x / 2.0))


@lru_cache(maxsize=4096)
def chi2_quantile(p: float, df: int) -> float:
    """p-quantile of the chi-square distribution with ``df`` degrees of freedom.

    The CDF (regularized incomplete gamma) is strictly increasing, so the
    quantile is found by Brent's method on an expanding bracket. Results are
    cached; repeated thresholds dominate the Monte Carlo harness otherwise.
    """
    df = _check_df(df)
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {p}")
    hi = df + 10.0 * math.sqrt(2.0 * df) + 10.0
    while chi2_cdf(hi, df) <= p:
        hi *= 2.0
    return float(brentq(lambda x: chi2_cdf(x, df) - p, 0.0, hi, xtol=1e-12, rtol=1e-14))


def _check_df(df: int) -> int:
    if int(df) != df or df < 1:
        raise ValueError(f"degrees of freedom must be a positive integer, got {df}")
    return int(df)
