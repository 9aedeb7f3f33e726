import math

import numpy as np
import pytest

from tempexit.dynamics import (
    Domain,
    GaussianDriver,
    MaxStepsExceeded,
    StableDriver,
    contains,
    run_trajectory,
    step,
)
from tempexit.samplers import TemperedStableParams, make_stream


class TestDomain:
    def test_contains(self):
        assert contains(Domain.interval(10.0), 0.0)
        assert not contains(Domain.ball(2, 100.0), [100.0, 0.0])
        assert not contains(Domain.interval(1.0), -1.0000001)

    def test_boundary_counts_as_exited(self):
        assert not contains(Domain.interval(1.0), 1.0)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            contains(Domain.ball(2, 1.0), [0.0, 0.0, 0.0])

    def test_validation(self):
        with pytest.raises(ValueError):
            Domain(0, 1.0)
        with pytest.raises(ValueError):
            Domain(1, 0.0)


class TestDrivers:
    def test_validation(self):
        with pytest.raises(ValueError):
            GaussianDriver(a=0.0)
        with pytest.raises(ValueError):
            GaussianDriver(eps=-1.0)
        with pytest.raises(ValueError):
            StableDriver(beta=2.0)
        with pytest.raises(ValueError):
            StableDriver(beta=0.5, eps=0.0)


class TestStep:
    def test_gaussian_variance(self):
        # per-step variance is 2 eps a ds
        eps, a, ds = 0.5, 2.0, 0.01
        drv = GaussianDriver(a=a, eps=eps)
        s = make_stream(5, 0)
        n = 200_000
        incr = np.array([step(0.0, ds, None, drv, s)[0] for _ in range(n)])
        target = 2.0 * eps * a * ds
        var = incr.var(ddof=1)
        stderr = var * math.sqrt(2.0 / n)
        assert abs(var - target) <= 3.0 * stderr

    def test_stable_2d_characteristic_function(self):
        # one isotropic stable step has char fn e^{-eps^beta ds |k|^beta}
        beta, ds = 0.5, 1.0
        drv = StableDriver(beta=beta)
        s = make_stream(5, 1)
        n = 50_000
        incr = np.array([step([0.0, 0.0], ds, None, drv, s) for _ in range(n)])
        emp = np.cos(incr[:, 0]).mean()  # k = (1, 0)
        assert abs(emp - math.exp(-ds)) <= 3.0 / math.sqrt(n)

    def test_drift_enters_mean(self):
        c, ds = 2.0, 0.01
        drv = GaussianDriver()
        s = make_stream(5, 2)
        n = 100_000
        incr = np.array([step(0.0, ds, lambda x: np.array([c]), drv, s)[0] for _ in range(n)])
        stderr = incr.std(ddof=1) / math.sqrt(n)
        assert abs(incr.mean() - c * ds) <= 3.0 * stderr

    def test_ds_validation(self):
        with pytest.raises(ValueError):
            step(0.0, 0.0, None, GaussianDriver(), make_stream(1, 0))


class TestRunTrajectory:
    def test_classical_interval_exit_time(self):
        # Brownian driver with the deterministic clock: u(0) = r^2 / 2
        domain = Domain.interval(10.0)
        drv = GaussianDriver()
        clock = TemperedStableParams(1.0, 0.1)
        n = 10_000
        t = np.empty(n)
        for i in range(n):
            rec = run_trajectory(0.0, domain, None, drv, clock, 1e-2, 10**8, make_stream(6, i))
            assert rec.t_exit == rec.s_exit
            assert abs(rec.landing[0]) >= 10.0
            assert rec.s_exit == rec.steps * 1e-2
            t[i] = rec.t_exit
        stderr = t.std(ddof=1) / math.sqrt(n)
        tol = max(0.05 * 50.0, 3.0 * stderr)
        assert abs(t.mean() - 50.0) <= tol

    def test_start_on_boundary_rejected(self):
        with pytest.raises(ValueError):
            run_trajectory(10.0, Domain.interval(10.0), None, GaussianDriver(),
                           None, 0.01, 100, make_stream(1, 0))

    def test_leapover_is_strict(self):
        domain = Domain.interval(100.0)
        drv = StableDriver(beta=0.5)
        strict = 0
        for i in range(500):
            rec = run_trajectory(0.0, domain, None, drv, None, 1e-2, 10**8, make_stream(7, i))
            assert abs(rec.landing[0]) >= 100.0
            strict += abs(rec.landing[0]) > 100.0
        assert strict > 250  # jumps overshoot the boundary essentially always

    def test_gaussian_overshoot_shrinks_with_ds(self):
        # mean overshoot scales like sqrt(ds): quartering ds at least halves it
        domain = Domain.interval(2.0)
        drv = GaussianDriver()

        def mean_overshoot(ds, seed):
            o = 0.0
            n = 3000
            for i in range(n):
                rec = run_trajectory(0.0, domain, None, drv, None, ds, 10**8, make_stream(seed, i))
                o += abs(rec.landing[0]) - 2.0
            return o / n

        coarse = mean_overshoot(1e-2, 8)
        fine = mean_overshoot(2.5e-3, 9)
        assert fine <= 0.65 * coarse

    def test_escape_side_scale_invariance(self):
        # matched x0/r and matched ds/r^beta give the same landing-side law
        beta = 0.5

        def side_fraction(r, ds, seed):
            domain = Domain.interval(r)
            drv = StableDriver(beta=beta)
            hits = 0
            n = 3000
            for i in range(n):
                rec = run_trajectory(0.5 * r, domain, None, drv, None, ds, 10**8,
                                     make_stream(seed, i))
                hits += rec.landing[0] >= r
            return hits / n, n

        p1, n1 = side_fraction(1.0, 1e-3, 10)
        p2, n2 = side_fraction(100.0, 1e-3 * 100.0 ** beta, 11)
        pooled = (p1 * n1 + p2 * n2) / (n1 + n2)
        z = (p1 - p2) / math.sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2))
        assert abs(z) <= 3.0

    def test_ratio_of_ensemble_means(self):
        # mean physical / mean operational time approaches alpha mu^(alpha-1)
        clock = TemperedStableParams(0.6, 0.1)
        domain = Domain.interval(3.0)
        drv = GaussianDriver()
        n = 4000
        t = np.empty(n)
        s = np.empty(n)
        for i in range(n):
            rec = run_trajectory(0.0, domain, None, drv, clock, 1e-2, 10**8, make_stream(12, i))
            t[i] = rec.t_exit
            s[i] = rec.s_exit
        rate = 0.6 * 0.1 ** -0.4
        ratio = t.mean() / s.mean()
        # delta-method stderr for the ratio of means
        var = (t.var(ddof=1) - 2.0 * ratio * np.cov(t, s, ddof=1)[0, 1]
               + ratio ** 2 * s.var(ddof=1)) / (n * s.mean() ** 2)
        assert abs(ratio - rate) <= 3.0 * math.sqrt(var)

    def test_max_steps_exceeded_carries_partial(self):
        with pytest.raises(MaxStepsExceeded) as exc_info:
            run_trajectory(0.0, Domain.interval(50.0), None, GaussianDriver(),
                           None, 1e-4, 500, make_stream(13, 0))
        partial = exc_info.value.partial
        assert partial.steps == 500
        assert partial.s_exit == pytest.approx(500 * 1e-4)
        assert abs(partial.landing[0]) < 50.0

    def test_drift_path_matches_contract(self):
        # stepwise path with drift still reports consistent records
        rec = run_trajectory(0.0, Domain.interval(1.0), lambda x: np.array([5.0]),
                             GaussianDriver(), TemperedStableParams(1.0, 0.0),
                             1e-3, 10**6, make_stream(14, 0))
        assert rec.t_exit == rec.s_exit
        assert abs(rec.landing[0]) >= 1.0
        assert rec.s_exit == pytest.approx(rec.steps * 1e-3)

    def test_2d_ball_exit(self):
        rec = run_trajectory([0.0, 0.0], Domain.ball(2, 5.0), None, GaussianDriver(),
                             TemperedStableParams(0.5, 0.2), 1e-2, 10**8, make_stream(15, 0))
        assert rec.landing.shape == (2,)
        assert float(rec.landing @ rec.landing) >= 25.0
        assert rec.t_exit > 0.0
