import math

import numpy as np
import pytest
from scipy import stats
from scipy.special import erfc

from tempexit.samplers import (
    TemperedStableParams,
    make_stream,
    sample_gaussian,
    sample_onesided_stable,
    sample_symmetric_stable,
    sample_tempered_onesided,
)

KS_LEVEL = 1e-3


class TestStreams:
    def test_replay_is_bit_identical(self):
        a = make_stream(42, 0).random(1_000_000)
        b = make_stream(42, 0).random(1_000_000)
        assert np.array_equal(a, b)

    def test_distinct_indices_uncorrelated(self):
        n = 1_000_000
        a = make_stream(42, 0).random(n)
        b = make_stream(42, 1).random(n)
        corr = np.corrcoef(a, b)[0, 1]
        assert abs(corr) <= 3.0 / math.sqrt(n)

    def test_uniform_range(self):
        u = make_stream(42, 7).random()
        assert 0.0 <= u < 1.0

    def test_negative_seed_rejected(self):
        with pytest.raises(ValueError):
            make_stream(-1, 0)
        with pytest.raises(ValueError):
            make_stream(1, -2)

    def test_sampler_replay(self):
        # every sampler replays bit-for-bit on an equal-state stream
        p = TemperedStableParams(0.6, 0.5)
        for draw in (
            lambda s: sample_gaussian(s, 100),
            lambda s: sample_symmetric_stable(s, 0.7, 100),
            lambda s: sample_onesided_stable(s, 0.7, 100),
            lambda s: sample_tempered_onesided(s, p, 0.01, 100),
        ):
            assert np.array_equal(draw(make_stream(3, 5)), draw(make_stream(3, 5)))


class TestGaussian:
    def test_moments(self):
        n = 1_000_000
        x = sample_gaussian(make_stream(7, 0), n)
        assert abs(x.mean()) <= 3e-3
        assert abs(x.var(ddof=1) - 1.0) <= 5e-3

    def test_ks_against_normal(self):
        x = sample_gaussian(make_stream(7, 1), 200_000)
        assert stats.kstest(x, "norm").pvalue > KS_LEVEL


class TestSymmetricStable:
    def test_cauchy_special_case(self):
        x = sample_symmetric_stable(make_stream(11, 0), 1.0, 200_000)
        assert stats.kstest(x, "cauchy").pvalue > KS_LEVEL

    def test_characteristic_function(self):
        n = 400_000
        beta = 0.5
        x = sample_symmetric_stable(make_stream(11, 1), beta, n)
        for k in (0.5, 1.0, 2.0):
            emp = np.cos(k * x).mean()
            assert abs(emp - math.exp(-abs(k) ** beta)) <= 3.0 / math.sqrt(n)

    def test_median_symmetry(self):
        n = 200_000
        x = sample_symmetric_stable(make_stream(11, 2), 1.3, n)
        q1, med, q3 = np.percentile(x, [25, 50, 75])
        assert abs(med) <= 3.0 * (q3 - q1) / math.sqrt(n)

    def test_step_scaling(self):
        # ds^(1/beta) times a unit draw has characteristic fn e^{-ds |k|^beta}
        n = 400_000
        beta, ds = 1.2, 0.05
        x = ds ** (1.0 / beta) * sample_symmetric_stable(make_stream(11, 3), beta, n)
        for k in (0.5, 1.0, 2.0):
            emp = np.cos(k * x).mean()
            assert abs(emp - math.exp(-ds * abs(k) ** beta)) <= 3.0 / math.sqrt(n)

    @pytest.mark.parametrize("beta", [0.0, 2.0, -0.3, 2.5])
    def test_domain_error(self, beta):
        with pytest.raises(ValueError):
            sample_symmetric_stable(make_stream(1, 0), beta)


class TestOnesidedStable:
    def test_half_alpha_density(self):
        # alpha = 1/2 has the closed-form law with density
        # (2 sqrt(pi))^-1 x^{-3/2} e^{-1/(4x)}, i.e. CDF erfc(1/(2 sqrt(x)))
        x = sample_onesided_stable(make_stream(13, 0), 0.5, 200_000)
        res = stats.kstest(x, lambda v: erfc(1.0 / (2.0 * np.sqrt(v))))
        assert res.pvalue > KS_LEVEL

    def test_laplace_transform(self):
        n = 400_000
        alpha = 0.7
        x = sample_onesided_stable(make_stream(13, 1), alpha, n)
        for lam in (0.5, 1.0, 2.0):
            emp = np.exp(-lam * x).mean()
            assert abs(emp - math.exp(-(lam ** alpha))) <= 3.0 / math.sqrt(n)

    def test_strictly_positive(self):
        x = sample_onesided_stable(make_stream(13, 2), 0.3, 100_000)
        assert np.all(x > 0.0)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 1.4])
    def test_domain_error(self, alpha):
        with pytest.raises(ValueError):
            sample_onesided_stable(make_stream(1, 0), alpha)


class TestTemperedOnesided:
    def test_untempered_reduction_is_bit_identical(self):
        # mu = 0 consumes the stream exactly like the scaled one-sided draw
        p = TemperedStableParams(0.6, 0.0)
        ds = 0.04
        a = sample_tempered_onesided(make_stream(17, 0), p, ds, 1000)
        b = ds ** (1.0 / 0.6) * sample_onesided_stable(make_stream(17, 0), 0.6, 1000)
        assert np.array_equal(a, b)

    def test_mean_identity(self):
        n = 1_000_000
        alpha, mu, ds = 0.6, 0.1, 0.01
        x = sample_tempered_onesided(make_stream(17, 1), TemperedStableParams(alpha, mu), ds, n)
        target = ds * alpha * mu ** (alpha - 1.0)
        stderr = x.std(ddof=1) / math.sqrt(n)
        assert abs(x.mean() - target) <= 3.0 * stderr

    def test_mean_identity_grid(self):
        n = 100_000
        ds = 0.01
        for alpha in (0.2, 0.6, 0.9):
            for mu in (0.01, 0.1, 1.0):
                p = TemperedStableParams(alpha, mu)
                x = sample_tempered_onesided(make_stream(17, 2), p, ds, n)
                target = ds * alpha * mu ** (alpha - 1.0)
                stderr = x.std(ddof=1) / math.sqrt(n)
                assert abs(x.mean() - target) <= 3.0 * stderr, (alpha, mu)

    def test_acceptance_rate_identity(self):
        # the tilting rejection accepts with overall probability e^{-ds mu^alpha};
        # replicate the proposal/accept mechanism and count
        alpha, mu, ds = 0.5, 1.0, 0.1
        n = 200_000
        s = make_stream(17, 3)
        y = ds ** (1.0 / alpha) * sample_onesided_stable(s, alpha, n)
        accepted = s.random(n) < np.exp(-mu * y)
        rate = accepted.mean()
        target = math.exp(-ds * mu ** alpha)
        stderr = math.sqrt(target * (1.0 - target) / n)
        assert abs(rate - target) <= 3.0 * stderr

    def test_positive_and_errors(self):
        p = TemperedStableParams(0.5, 2.0)
        x = sample_tempered_onesided(make_stream(17, 4), p, 0.05, 10_000)
        assert np.all(x > 0.0)
        with pytest.raises(ValueError):
            sample_tempered_onesided(make_stream(1, 0), TemperedStableParams(1.0, 0.1), 0.01)
        with pytest.raises(ValueError):
            sample_tempered_onesided(make_stream(1, 0), p, 0.0)


class TestParams:
    def test_validation(self):
        TemperedStableParams(1.0, 0.0)
        TemperedStableParams(0.3, 2.0)
        with pytest.raises(ValueError):
            TemperedStableParams(0.0, 0.1)
        with pytest.raises(ValueError):
            TemperedStableParams(1.2, 0.1)
        with pytest.raises(ValueError):
            TemperedStableParams(0.5, -0.1)
