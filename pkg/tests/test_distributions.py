import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lpss.distributions import (
    MarginalDistribution,
    cdf,
    from_dict,
    inverse_cdf,
    lognormal,
    lognormal_from_mean_cov,
    norm_ppf,
    normal,
    uniform,
)
from lpss.errors import DomainError

mpmath.mp.dps = 40


def _reference_quantile(p: float) -> float:
    """Bisection on an arbitrary-precision erfc-based normal CDF."""
    target = mpmath.mpf(p)
    lo, hi = mpmath.mpf(-40), mpmath.mpf(40)
    for _ in range(200):
        mid = (lo + hi) / 2
        if mpmath.erfc(-mid / mpmath.sqrt(2)) / 2 < target:
            lo = mid
        else:
            hi = mid
    return float((lo + hi) / 2)


class TestNormalQuantile:
    def test_examples(self):
        assert inverse_cdf(uniform(0, 1), 0.5) == 0.5
        assert inverse_cdf(normal(0, 1), 0.5) == 0.0
        assert inverse_cdf(normal(0, 1), 0.975) == pytest.approx(1.959964, abs=1e-6)

    @pytest.mark.parametrize(
        "p",
        [1e-12, 1e-10, 1e-8, 1e-5, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.9, 0.97575,
         0.999, 1 - 1e-5, 1 - 1e-8, 1 - 1e-10, 1 - 1e-12],
    )
    def test_against_high_precision_oracle(self, p):
        assert abs(norm_ppf(p) - _reference_quantile(p)) < 1e-9

    def test_random_probabilities_against_oracle(self):
        u = np.random.default_rng(7).random(300)
        got = norm_ppf(u)
        ref = np.array([_reference_quantile(float(x)) for x in u])
        assert np.max(np.abs(got - ref)) < 1e-9

    def test_strictly_increasing_on_grid(self):
        u = np.linspace(1e-12, 1 - 1e-12, 10_000)
        for d in (normal(0, 1), uniform(-2, 3), lognormal(0.1, 0.7)):
            assert np.all(np.diff(d.ppf(u)) > 0)

    @pytest.mark.parametrize("u", [0.0, 1.0, -0.1, 1.5, float("nan")])
    def test_rejects_probabilities_outside_open_interval(self, u):
        with pytest.raises(DomainError):
            normal().ppf(u)


class TestCdf:
    def test_examples(self):
        assert cdf(uniform(0, 2), 0.5) == 0.25
        assert cdf(normal(0, 1), 0.0) == 0.5
        assert cdf(lognormal(0, 1), 1.0) == pytest.approx(0.5, abs=1e-15)

    def test_outside_support(self):
        with pytest.raises(DomainError):
            cdf(lognormal(0, 1), -1.0)
        with pytest.raises(DomainError):
            cdf(uniform(0, 1), 2.0)

    @pytest.mark.parametrize(
        "dist", [uniform(0, 1), uniform(-3, 5), normal(0, 1), normal(2, 0.3),
                 lognormal(0, 1), lognormal(-0.645, 0.044)],
        ids=lambda d: d.label(),
    )
    def test_round_trip(self, dist):
        u = np.random.default_rng(1).random(1000)
        assert np.max(np.abs(dist.cdf(dist.ppf(u)) - u)) < 1e-9

    def test_inverse_of_cdf_relative(self):
        # the upper tail of a double-precision CDF saturates near 1, so stay interior
        x = np.linspace(-8, 5, 501)
        d = normal(0, 1)
        assert np.allclose(d.ppf(d.cdf(x)), x, rtol=1e-9, atol=1e-9)

    def test_limits(self):
        d = normal(0, 1)
        assert d.cdf(-np.inf) == 0.0 and d.cdf(np.inf) == 1.0
        x = np.linspace(-10, 10, 1001)
        assert np.all(np.diff(d.cdf(x)) >= 0)


class TestLognormalFromMeanCov:
    def test_unit_log_parameters(self):
        d = lognormal_from_mean_cov(math.exp(0.5), math.sqrt(math.e - 1))
        mu, sigma = d.params
        assert mu == pytest.approx(0.0, abs=1e-12)
        assert sigma == pytest.approx(1.0, abs=1e-12)

    def test_thickness_row(self):
        mu, sigma = lognormal_from_mean_cov(0.525, 0.044).params
        assert mu == pytest.approx(-0.645324, abs=1e-6)
        # closed form sqrt(log(1 + 0.044^2)) = 0.0439787...
        assert sigma == pytest.approx(math.sqrt(math.log1p(0.044**2)), rel=1e-14)
        assert sigma == pytest.approx(0.043979, abs=1e-6)

    def test_degenerate_limit(self):
        mu, sigma = lognormal_from_mean_cov(1.0, 1e-6).params
        assert abs(mu) < 1e-6 and abs(sigma) < 1e-6 + 1e-12

    @pytest.mark.parametrize("mean,cov", [(0, 0.1), (-1, 0.1), (1, 0), (1, -0.2)])
    def test_rejects_nonpositive(self, mean, cov):
        with pytest.raises(DomainError):
            lognormal_from_mean_cov(mean, cov)

    def test_moment_match(self):
        d = lognormal_from_mean_cov(1.3 * 34, 0.1235)
        x = d.ppf(np.random.default_rng(3).random(1_000_000))
        se_mean = x.std() / math.sqrt(x.size)
        assert abs(x.mean() - 44.2) < 3 * se_mean
        cov = x.std() / x.mean()
        assert abs(cov - 0.1235) < 3 * 0.1235 / math.sqrt(2 * x.size) * 1.5

    @given(st.floats(0.01, 100), st.floats(0.01, 2))
    def test_analytic_moments(self, mean, cov):
        d = lognormal_from_mean_cov(mean, cov)
        assert d.mean == pytest.approx(mean, rel=1e-10)
        assert math.sqrt(d.variance) / d.mean == pytest.approx(cov, rel=1e-8)


class TestConstructionAndSerialization:
    @pytest.mark.parametrize("bad", [(1.0, 1.0), (2.0, 1.0)])
    def test_uniform_needs_increasing_bounds(self, bad):
        with pytest.raises(DomainError):
            uniform(*bad)

    def test_positive_scale(self):
        with pytest.raises(DomainError):
            normal(0, 0)
        with pytest.raises(DomainError):
            lognormal(0, -1)

    @pytest.mark.parametrize("d", [uniform(0, 1), normal(1, 2), lognormal(0.2, 0.3)],
                             ids=lambda d: d.label())
    def test_dict_round_trip(self, d):
        assert from_dict(d.to_dict()) == d

    def test_lognormal_from_mean_cov_dict(self):
        d = from_dict({"kind": "lognormal", "mean": 0.525, "cov": 0.044})
        assert d == lognormal_from_mean_cov(0.525, 0.044)

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            from_dict({"kind": "cauchy"})

    def test_frozen_and_hashable(self):
        assert len({normal(0, 1), normal(0, 1), uniform()}) == 2
        assert isinstance(normal(), MarginalDistribution)


@settings(max_examples=200)
@given(st.floats(1e-12, 1 - 1e-12))
def test_quantile_round_trip_property(u):
    assert abs(norm_ppf(u) - _reference_quantile(u)) < 1e-9 or abs(normal().cdf(norm_ppf(u)) - u) < 1e-15
