import math
from statistics import NormalDist

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biasedci.errors import DomainError
from biasedci.normal import (interval_prob, sample_bivariate, std_normal_cdf, std_normal_pdf,
                             std_normal_quantile, substream)

from conftest import bisect_quantile, mp_cdf

finite = st.floats(-40, 40, allow_nan=False)


class TestCdf:
    def test_zero(self):
        assert std_normal_cdf(0.0) == 0.5

    def test_known_value(self):
        assert std_normal_cdf(1.959964) == pytest.approx(0.975, abs=1e-7)

    @pytest.mark.parametrize("x", [-38.0, -20.0, -8.5, -3.0, -1.0, -1e-3, 0.3, 1.959964, 5.0, 9.0])
    def test_against_mpmath(self, x):
        ref = mp_cdf(x)
        assert abs(std_normal_cdf(x) - ref) <= 1e-14
        # relative accuracy in the lower tail as well
        if ref > 0:
            assert std_normal_cdf(x) == pytest.approx(ref, rel=1e-13)

    def test_three(self):
        assert abs(std_normal_cdf(-3.0) + std_normal_cdf(3.0) - 1.0) <= 1e-15

    @given(finite)
    def test_symmetry(self, x):
        assert abs(std_normal_cdf(x) + std_normal_cdf(-x) - 1.0) <= 1e-15

    def test_monotone_on_grid(self):
        x = np.linspace(-12, 12, 200001)
        assert np.all(np.diff(std_normal_cdf(x)) >= 0)

    def test_array_matches_scalar(self):
        x = np.linspace(-9, 9, 101)
        arr = std_normal_cdf(x)
        np.testing.assert_allclose(arr, [std_normal_cdf(float(v)) for v in x], rtol=1e-14, atol=1e-16)

    @pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
    def test_non_finite(self, bad):
        with pytest.raises(DomainError):
            std_normal_cdf(bad)
        with pytest.raises(DomainError):
            std_normal_cdf(np.array([0.0, bad]))

    def test_pdf(self):
        assert std_normal_pdf(0.0) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-15)
        assert std_normal_pdf(1.3) == pytest.approx(NormalDist().pdf(1.3), rel=1e-14)


class TestQuantile:
    def test_median(self):
        assert std_normal_quantile(0.5) == 0.0

    @pytest.mark.parametrize("p, z", [(0.975, 1.959964), (0.95, 1.644854)])
    def test_examples(self, p, z):
        assert std_normal_quantile(p) == pytest.approx(z, abs=5e-7)

    @pytest.mark.parametrize("p", [1e-300, 1e-20, 1e-6, 0.01, 0.02425, 0.3, 0.75, 0.95, 0.975,
                                   0.999, 1 - 1e-12])
    def test_bisection_oracle(self, p):
        assert std_normal_quantile(p) == pytest.approx(bisect_quantile(p), rel=1e-12, abs=1e-13)

    @given(st.floats(1e-9, 1 - 1e-9))
    def test_matches_statistics(self, p):
        assert std_normal_quantile(p) == pytest.approx(NormalDist().inv_cdf(p), rel=1e-9, abs=1e-11)

    @given(st.floats(1e-300, 1 - 1e-16, exclude_min=True))
    @settings(max_examples=500)
    def test_round_trip(self, p):
        assert abs(std_normal_cdf(std_normal_quantile(p)) - p) <= 1e-12

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, 1.5, math.nan])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            std_normal_quantile(bad)


class TestIntervalProb:
    def test_lemma_a1(self):
        # An interval of fixed width has more mass the closer its centre is to 0.
        g = np.random.default_rng(11)
        violations = 0
        for _ in range(10_000):
            a, b = g.uniform(-5, 5, 2)
            if abs(a) > abs(b):
                a, b = b, a
            if abs(b) - abs(a) < 1e-9:
                continue
            d = g.uniform(1e-3, 4)
            if not interval_prob(a - d, a + d) > interval_prob(b - d, b + d):
                violations += 1
        assert violations == 0

    def test_upper_tail_precision(self):
        ref = mp_cdf(-9.0) - mp_cdf(-10.0)
        assert interval_prob(9.0, 10.0) == pytest.approx(ref, rel=1e-12)

    def test_matches_difference(self):
        assert interval_prob(-1.0, 2.0) == pytest.approx(std_normal_cdf(2.0) - std_normal_cdf(-1.0),
                                                         abs=1e-15)


class TestSampler:
    def test_deterministic(self):
        a = sample_bivariate(1.0, 2.0, 1.0, 0.5, 0.3, 42, 1000)
        b = sample_bivariate(1.0, 2.0, 1.0, 0.5, 0.3, 42, 1000)
        assert np.array_equal(a, b)
        c = sample_bivariate(1.0, 2.0, 1.0, 0.5, 0.3, 43, 1000)
        assert not np.array_equal(a, c)

    def test_shape(self):
        assert sample_bivariate(0, 0, 1, 1, 0, 0, 7).shape == (7, 2)

    def test_degenerate_marginal(self):
        x = sample_bivariate(0.0, 3.5, 1.0, 0.0, 0.4, 1, 1000)
        assert np.all(x[:, 1] == 3.5)

    def test_perfect_correlation(self):
        x = sample_bivariate(1.0, 4.0, 2.0, 2.0, 1.0, 5, 1000)
        assert np.array_equal(x[:, 1], x[:, 0] + 3.0)

    def test_uncorrelated_large_n(self):
        n = 10**6
        x = sample_bivariate(0.0, 0.0, 1.0, 1.0, 0.0, 2024, n)
        r = np.corrcoef(x.T)[0, 1]
        assert abs(r) < 4 / math.sqrt(n)

    def test_moments(self):
        x = sample_bivariate(-1.0, 2.0, 2.0, 0.5, -0.6, 9, 200_000)
        assert x.mean(axis=0) == pytest.approx([-1.0, 2.0], abs=0.02)
        assert x.std(axis=0) == pytest.approx([2.0, 0.5], rel=0.01)
        assert np.corrcoef(x.T)[0, 1] == pytest.approx(-0.6, abs=0.01)

    def test_substreams_independent_of_order(self):
        a = substream(7, 3).standard_normal(5)
        substream(7, 1).standard_normal(100)
        assert np.array_equal(a, substream(7, 3).standard_normal(5))
        assert not np.array_equal(a, substream(7, 4).standard_normal(5))

    @pytest.mark.parametrize("kw", [dict(rho=1.2), dict(rho=-1.5), dict(s1=-1.0), dict(s2=-0.1)])
    def test_invalid(self, kw):
        args = dict(mu1=0.0, mu2=0.0, s1=1.0, s2=1.0, rho=0.0, seed=0, n=3)
        args.update(kw)
        with pytest.raises(DomainError):
            sample_bivariate(**args)

    @pytest.mark.parametrize("seed", [-1, 2**64, 1.5])
    def test_bad_seed(self, seed):
        with pytest.raises(DomainError):
            sample_bivariate(0, 0, 1, 1, 0, seed, 3)
