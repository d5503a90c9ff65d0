import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats as sps

from blev.errors import DegenerateInput
from blev.mc_lab import stats


def test_mean_and_variance_se(rng):
    x = rng.standard_normal(40000)
    m, se = stats.mean_se(x)
    assert se == pytest.approx(1 / 200, rel=0.05)
    v, vse = stats.variance_se(x)
    assert v == pytest.approx(1.0, abs=4 * vse)
    assert vse == pytest.approx(math.sqrt(2 / 40000), rel=0.05)
    with pytest.raises(ValueError):
        stats.mean_se([1.0])


def test_median_se_is_reproducible(rng):
    x = rng.standard_normal(500)
    assert stats.median_se(x) == stats.median_se(x)


# -- Kolmogorov-Smirnov -------------------------------------------------------


@pytest.mark.parametrize("lam", [0.2, 0.29, 0.31, 0.5, 0.8, 1.0, 1.36, 2.0])
def test_kolmogorov_sf_matches_reference(lam):
    assert stats.kolmogorov_sf(lam) == pytest.approx(sps.kstwobign.sf(lam), abs=1e-12)


def test_ks_self_test_rejection_rate():
    g = np.random.default_rng(2)
    rej = sum(stats.ks_statistic(g.standard_normal(1000), stats.normal_cdf)[1] < 0.05 for _ in range(200))
    assert 0.02 <= rej / 200 <= 0.09


def test_ks_examples(rng):
    d, p = stats.ks_statistic(np.zeros(100), stats.normal_cdf)
    assert d >= 0.5 and p < 1e-6
    big = stats.ks_statistic(rng.standard_normal(10**5), stats.normal_cdf)[0]
    assert big < 0.01
    with pytest.raises(ValueError):
        stats.ks_statistic(np.zeros(10), stats.normal_cdf)


def test_ks_statistic_matches_scipy(rng):
    x = rng.standard_normal(300) * 1.1
    assert stats.ks_statistic(x, stats.normal_cdf)[0] == pytest.approx(sps.kstest(x, "norm").statistic, abs=1e-14)


# -- Hill ----------------------------------------------------------------------


def test_hill_on_pareto():
    x = np.random.default_rng(9).pareto(1.5, 10**5) + 1.0
    k = math.ceil(1e5**0.6)
    assert stats.hill_estimator(x, k) == pytest.approx(1.5, abs=0.05)
    scan = stats.hill_scan(x)
    assert scan.k == k and not scan.unstable
    assert stats.tail_slope(x, k) == pytest.approx(-1.5, abs=0.1)


def test_hill_on_exponential_has_no_plateau():
    x = np.random.default_rng(10).exponential(1.0, 10**5)
    scan = stats.hill_scan(x)
    assert scan.unstable
    # the index estimate behaves like log(n / k) and falls as k grows
    assert scan.estimates[0] > scan.estimates[-1]


def test_hill_degenerate():
    with pytest.raises(DegenerateInput):
        stats.hill_estimator(np.full(100, 3.0), 10)
    with pytest.raises(ValueError):
        stats.hill_estimator(np.arange(1.0, 11.0), 10)
    with pytest.raises(ValueError):
        stats.hill_estimator(np.array([-1.0, 2.0, 3.0]), 1)


# -- characteristic functions ------------------------------------------------


def test_empirical_cf_examples(rng):
    assert np.all(stats.empirical_cf(np.zeros(50), [0.5, 1.0, 3.0]) == 1)
    x = rng.standard_normal(20000)
    assert stats.empirical_cf(x, [0.0])[0] == 1
    assert abs(stats.empirical_cf(x, [1.0])[0] - math.exp(-0.5)) < 3 / math.sqrt(x.size)


def test_stable_reference_examples():
    v = stats.stable_cf_reference(1.5, 1.0)
    a = math.sqrt(2) / 2
    assert v == pytest.approx(math.exp(-a) * complex(math.cos(a), math.sin(a)), abs=1e-15)
    lam = np.array([1e-9, 0.3, 1.0, 5.0])
    for p in (1.1, 1.5, 1.9):
        ref = stats.stable_cf_reference(p, lam)
        assert np.allclose(ref, np.exp(np.exp(1j * math.pi * p / 2) * lam**p), atol=1e-15)
        assert np.all(np.abs(ref[1:]) < 1)
        assert ref[0] == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(ValueError):
        stats.stable_cf_reference(2.0, 1.0)


def test_stable_reference_is_left_skewed_stable():
    # exp(e^{i pi p/2} lam^p) is the alpha = p, skew = -1 law of scale (-cos(pi p/2))^{1/p}
    p = 1.5
    scale = (-math.cos(math.pi * p / 2)) ** (1 / p)
    law = sps.levy_stable(p, -1.0, loc=0.0, scale=scale)
    law.dist.parameterization = "S1"
    x = law.rvs(size=40000, random_state=np.random.default_rng(5))
    lam = np.array([0.25, 0.5, 1.0, 2.0])
    err = np.abs(stats.empirical_cf(x, lam) - stats.stable_cf_reference(p, lam))
    assert err.max() < 0.02


# -- Taylor remainder ----------------------------------------------------------


def test_taylor_tail_examples():
    assert stats.taylor_tail_T(0, 0.0) == 0.0
    assert stats.taylor_tail_T(0, 0.7) == pytest.approx(1 - math.exp(-0.7), rel=1e-14)
    assert stats.taylor_tail_T(1, 1.0) == pytest.approx(math.exp(-1), rel=1e-14)
    assert stats.taylor_tail_T(2, 1e-4) == pytest.approx(1e-12 / 6, rel=1e-6)


def test_taylor_tail_bound_on_random_points():
    g = np.random.default_rng(6)
    ns, xs = g.integers(0, 5, 10**4), g.uniform(0, 50, 10**4)
    for n, x in zip(ns, xs):
        v = stats.taylor_tail_T(int(n), float(x))
        bound = min(2 * x**n / math.factorial(n), x ** (n + 1) / math.factorial(n + 1))
        assert 0 <= v <= bound * (1 + 1e-12)


@given(st.integers(0, 6), st.floats(0, 30))
def test_taylor_tail_bound_property(n, x):
    v = stats.taylor_tail_T(n, x)
    assert 0 <= v <= min(2 * x**n / math.factorial(n), x ** (n + 1) / math.factorial(n + 1)) * (1 + 1e-12) + 1e-300
