"""Correlation and autocorrelation estimators, the Ljung-Box portmanteau test,
and the significance thresholds used to decide which correlations matter.

The chi-square and Student-t tail routines are self-contained (regularized
incomplete gamma/beta via series and Lentz continued fractions) so the test
suite can check them against an independent reference implementation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DataError
from .ingest import AlignedPanel

Sign = Literal["positive", "negative"]

_EPS = 1e-15
_FPMIN = 1e-300
_MAX_ITER = 500


# -- special functions --------------------------------------------------------

def _lower_gamma_series(a: float, x: float) -> float:
    # regularized P(a, x) for x < a + 1
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_gamma_contfrac(a: float, x: float) -> float:
    # regularized Q(a, x) for x >= a + 1, modified Lentz
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def regularized_gamma_upper(a: float, x: float) -> float:
    """Upper regularized incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a)."""
    if a <= 0:
        raise ValueError("shape parameter must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _lower_gamma_series(a, x)
    return _upper_gamma_contfrac(a, x)


def _betacf(a: float, b: float, x: float) -> float:
    # continued fraction for the regularized incomplete beta, modified Lentz
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("shape parameters must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def chi_square_upper_tail(q: float, df: int) -> float:
    """P(chi^2_df > q)."""
    if q < 0:
        raise ValueError("q must be non-negative")
    if df < 1:
        raise ValueError("df must be a positive integer")
    return regularized_gamma_upper(df / 2.0, q / 2.0)


def t_upper_tail(t: float, df: int) -> float:
    """P(T_df > t) for a Student-t variable."""
    if df < 1:
        raise ValueError("df must be a positive integer")
    p = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))
    return p if t >= 0 else 1.0 - p


def t_upper_quantile(alpha_half: float, df: int) -> float:
    """Value t with P(T_df > t) = alpha_half, found by bracketed bisection."""
    if not 0.0 < alpha_half < 0.5:
        raise ValueError("alpha_half must lie in (0, 0.5)")
    if df < 1:
        raise ValueError("df must be a positive integer")
    lo, hi = 0.0, 1.0
    while t_upper_tail(hi, df) > alpha_half:
        hi *= 2.0
        if hi > 1e15:
            break
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if t_upper_tail(mid, df) > alpha_half:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# -- estimators ----------------------------------------------------------------

def pearson(x: np.ndarray, y: np.ndarray) -> float:
    """Sample correlation coefficient between two equally long vectors."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
        raise ValueError("inputs must be 1-d vectors of equal length")
    if x.size < 3:
        raise ValueError("need at least 3 observations")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        raise DataError("degenerate series: correlation undefined for a constant vector")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def sample_acf(x: np.ndarray, h: int) -> float:
    """Sample autocorrelation at lag h (autocovariance normalized by lag 0)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    h = abs(int(h))
    if h >= n:
        raise ValueError(f"lag {h} must be smaller than the sample size {n}")
    d = x - x.mean()
    g0 = float(np.dot(d, d)) / n
    if g0 == 0.0:
        raise DataError("degenerate series: autocorrelation undefined for a constant vector")
    if h == 0:
        return 1.0
    gh = float(np.dot(d[h:], d[: n - h])) / n
    return gh / g0


@dataclass(frozen=True)
class LjungBoxResult:
    statistic: float
    lag: int
    p_value: float


def ljung_box(x: np.ndarray, lag: int) -> LjungBoxResult:
    """Portmanteau test of serial uncorrelatedness up to the given lag.

    Q = n(n+2) * sum_{h=1}^{lag} acf(h)^2 / (n-h), compared to chi^2_lag.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if lag < 1:
        raise ValueError("lag must be positive")
    if lag >= n:
        raise ValueError(f"lag {lag} must be smaller than the sample size {n}")
    q = 0.0
    for h in range(1, lag + 1):
        rho = sample_acf(x, h)
        q += rho * rho / (n - h)
    q *= n * (n + 2.0)
    return LjungBoxResult(statistic=q, lag=lag, p_value=chi_square_upper_tail(q, lag))


def default_ljung_box_lag(n: int) -> int:
    """Default lag: the natural log of the sample size, rounded."""
    return max(1, min(n - 1, round(math.log(n))))


# -- significance thresholds ---------------------------------------------------

def correlation_critical_point(n: int, alpha: float) -> float:
    """Smallest |r| distinguishable from zero at level alpha for sample size n.

    Inverts the t statistic r*sqrt(n-2)/sqrt(1-r^2) at the two-sided level.
    """
    if n < 5:
        raise ValueError("need sample size n >= 5")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    t = t_upper_quantile(alpha / 2.0, n - 2)
    return t / math.sqrt(n - 2 + t * t)


def delta_threshold(n: int, alpha: float, sign: Sign = "positive") -> float:
    """Group-membership cut-off: the midpoint between 1 and the critical point."""
    if sign not in ("positive", "negative"):
        raise ValueError(f"unknown sign {sign!r}")
    d = (1.0 + correlation_critical_point(n, alpha)) / 2.0
    return d if sign == "positive" else -d


@dataclass(frozen=True)
class SignificanceThresholds:
    """Resolved significance configuration for one segment."""

    alpha: float
    n: int
    c_alpha: float
    delta: float
    sign: Sign

    def __post_init__(self) -> None:
        if not 0.0 < self.c_alpha < abs(self.delta) < 1.0:
            raise DataError(
                f"threshold {self.delta} must exceed the critical point "
                f"{self.c_alpha:.4f} in magnitude and stay below 1"
            )
        if (self.sign == "positive") != (self.delta > 0):
            raise DataError(f"sign {self.sign!r} inconsistent with threshold {self.delta}")


def significance_thresholds(
    n: int, alpha: float, sign: Sign = "positive", delta_override: float | None = None
) -> SignificanceThresholds:
    """Bundle the critical point and group threshold for a segment of size n."""
    c = correlation_critical_point(n, alpha)
    if delta_override is None:
        delta = delta_threshold(n, alpha, sign)
    else:
        delta = delta_override
        if sign == "negative" and delta > 0:
            delta = -delta
    return SignificanceThresholds(alpha=alpha, n=n, c_alpha=c, delta=delta, sign=sign)


# -- correlation matrix --------------------------------------------------------

@dataclass(frozen=True)
class CorrelationMatrix:
    """Pairwise sample correlations over one segment's panel."""

    tickers: tuple[str, ...]
    values: np.ndarray
    n: int

    def value(self, a: str, b: str) -> float:
        i = self.tickers.index(a)
        j = self.tickers.index(b)
        return float(self.values[i, j])


def correlation_matrix(panel: AlignedPanel) -> CorrelationMatrix:
    """All pairwise correlations for a panel segment.

    Constant columns cannot carry a correlation; they are dropped with a
    warning instead of failing the whole matrix.
    """
    usable, excluded = [], []
    for ticker in panel.tickers:
        col = np.asarray(panel.columns[ticker], dtype=float)
        if float(np.max(col)) == float(np.min(col)):
            excluded.append(ticker)
        else:
            usable.append(ticker)
    if excluded:
        warnings.warn(
            "excluding constant return series: " + ", ".join(excluded),
            stacklevel=2,
        )
    if len(usable) < 2:
        raise DataError(
            f"fewer than 2 usable columns after excluding constant series "
            f"({', '.join(excluded) or 'none excluded'})"
        )

    z_cols = []
    for ticker in usable:
        d = np.asarray(panel.columns[ticker], dtype=float)
        d = d - d.mean()
        z_cols.append(d / math.sqrt(float(np.dot(d, d))))
    p = len(usable)
    values = np.eye(p)
    for i in range(p):
        for j in range(i + 1, p):
            r = float(np.dot(z_cols[i], z_cols[j]))
            r = min(1.0, max(-1.0, r))
            values[i, j] = values[j, i] = r
    return CorrelationMatrix(tickers=tuple(usable), values=values, n=len(panel.dates))
