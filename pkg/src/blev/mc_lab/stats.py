"""Estimators and test statistics used by the experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..errors import DegenerateInput

__all__ = [
    "HillScan",
    "empirical_cf",
    "hill_estimator",
    "hill_scan",
    "kolmogorov_sf",
    "ks_statistic",
    "mean_se",
    "median_se",
    "normal_cdf",
    "stable_cf_reference",
    "tail_slope",
    "taylor_tail_T",
    "variance_se",
]


def mean_se(x) -> tuple:
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 2:
        raise ValueError("need at least two samples for a standard error")
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(n))


def variance_se(x) -> tuple:
    """Unbiased sample variance with its large-sample standard error."""
    x = np.asarray(x, dtype=float)
    n = x.size
    c = x - x.mean()
    v = float(c @ c / (n - 1))
    m4 = float(np.mean(c**4))
    return v, math.sqrt(max(m4 - v * v, 0.0) / n)


def median_se(x, rng_seed: int = 0, n_boot: int = 200) -> tuple:
    """Median with a bootstrap standard error (fixed seed for reproducibility)."""
    x = np.asarray(x, dtype=float)
    rng = np.random.default_rng(rng_seed)
    idx = rng.integers(0, x.size, size=(n_boot, x.size))
    boots = np.median(x[idx], axis=1)
    return float(np.median(x)), float(boots.std(ddof=1))


# --------------------------------------------------------------------------
# Kolmogorov-Smirnov
# --------------------------------------------------------------------------


def kolmogorov_sf(lam: float, terms: int = 100) -> float:
    """P(K > lam) for the Kolmogorov distribution."""
    if lam <= 0:
        return 1.0
    if lam < 0.3:
        # the alternating series converges slowly here; use the theta-function form
        s = math.fsum(
            math.exp(-((2 * k - 1) ** 2) * math.pi**2 / (8 * lam * lam)) for k in range(1, terms + 1)
        )
        return min(1.0, max(0.0, 1.0 - math.sqrt(2 * math.pi) / lam * s))
    s = math.fsum((-1) ** (k - 1) * math.exp(-2 * k * k * lam * lam) for k in range(1, terms + 1))
    return min(1.0, max(0.0, 2.0 * s))


def ks_statistic(samples, cdf: Callable) -> tuple:
    """One-sample KS statistic sup|F_n - F| and its asymptotic p-value."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n < 50:
        raise ValueError(f"KS test needs n >= 50 samples, got {n}")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    d = float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))
    sq = math.sqrt(n)
    # small-sample correction of Stephens (1970)
    return d, kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d)


def normal_cdf(x):
    from scipy.special import ndtr

    return ndtr(x)


# --------------------------------------------------------------------------
# Tail index
# --------------------------------------------------------------------------


def _top(samples, k):
    x = np.asarray(samples, dtype=float)
    n = x.size
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    if np.any(x <= 0):
        raise ValueError("Hill estimator needs strictly positive samples")
    return -np.sort(-x)[: k + 1]


def hill_estimator(samples, k: int) -> float:
    """k / sum_{i<=k} log(X_(i) / X_(k+1)) over descending order statistics."""
    top = _top(samples, int(k))
    spacing = np.log(top[:-1]) - math.log(top[-1])
    total = float(spacing.sum())
    if total <= 1e-12 * max(1.0, abs(math.log(top[-1]))) * k:
        raise DegenerateInput("top order statistics are tied: zero log-spacing")
    return k / total


@dataclass(frozen=True)
class HillScan:
    ks: np.ndarray
    estimates: np.ndarray
    k: int
    estimate: float
    drift: float
    unstable: bool


def hill_scan(samples, k=None, lo_exp: float = 0.4, hi_exp: float = 0.7, num: int = 25,
              drift_tol: float = 0.1) -> HillScan:
    """Hill estimate at the default k = ceil(n^0.6) plus a plateau scan.

    ``drift`` is the least-squares slope of the estimate against log k over
    the scan, relative to the default estimate; a plateau has |drift| small.
    """
    n = int(np.asarray(samples).size)
    k0 = int(math.ceil(n**0.6)) if k is None else int(k)
    ks = np.unique(np.geomspace(max(2, n**lo_exp), min(n - 1, n**hi_exp), num).astype(int))
    est = np.array([hill_estimator(samples, kk) for kk in ks])
    h0 = hill_estimator(samples, k0)
    slope = float(np.polyfit(np.log(ks), est, 1)[0]) if ks.size > 1 else 0.0
    drift = slope / h0
    return HillScan(ks, est, k0, h0, drift, abs(drift) > drift_tol)


def tail_slope(samples, k: int) -> float:
    """Slope of log empirical survival against log x over the top k points."""
    top = _top(samples, int(k))[:-1]
    n = np.asarray(samples).size
    surv = np.arange(1, top.size + 1) / n
    return float(np.polyfit(np.log(top), np.log(surv), 1)[0])


# --------------------------------------------------------------------------
# Characteristic functions
# --------------------------------------------------------------------------


def empirical_cf(samples, lambda_grid) -> np.ndarray:
    x = np.asarray(samples, dtype=float)
    lam = np.atleast_1d(np.asarray(lambda_grid, dtype=float))
    if x.size == 0:
        raise ValueError("empirical CF of an empty sample")
    return np.exp(1j * np.outer(lam, x)).mean(axis=1)


def stable_cf_reference(p: float, lam):
    """exp(e^{i pi p / 2} lam^p) for lam > 0, the totally skewed stable CF."""
    if not 1 < p < 2:
        raise ValueError(f"p must lie in (1, 2), got {p}")
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("stable CF reference defined for lambda > 0")
    a = lam**p
    out = np.exp(math.cos(math.pi * p / 2) * a) * (
        np.cos(math.sin(math.pi * p / 2) * a) + 1j * np.sin(math.sin(math.pi * p / 2) * a)
    )
    return complex(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Taylor remainder of e^{-x}
# --------------------------------------------------------------------------


def taylor_tail_T(n: int, x: float) -> float:
    """(-1)^{n+1}(e^{-x} - sum_{k<=n} (-x)^k/k!), always in [0, x^{n+1}/(n+1)!]."""
    if n < 0 or x < 0:
        raise ValueError("taylor_tail_T needs n >= 0 and x >= 0")
    if x == 0:
        return 0.0
    if x <= 1.0:
        # remainder series sum_{j>=0} (-1)^j x^{n+1+j}/(n+1+j)!, no cancellation
        term = x ** (n + 1) / math.factorial(n + 1)
        terms = []
        j = 0
        while term > 1e-300 and j < 200:
            terms.append((-1) ** j * term)
            j += 1
            term *= x / (n + 1 + j)
        return max(0.0, math.fsum(terms))
    partial = math.fsum((-x) ** k / math.factorial(k) for k in range(n + 1))
    val = (-1) ** (n + 1) * (math.exp(-x) - partial)
    return max(0.0, val)
