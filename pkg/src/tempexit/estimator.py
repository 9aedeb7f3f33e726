"""Monte Carlo ensembles over trajectories and comparison against closed forms.

Trajectory i always runs on the stream keyed (master_seed, i), and ensemble
statistics reduce per-trajectory results in index order, so an estimate is a
pure function of (master_seed, n_traj, parameters): partitioning the ensemble
across any number of worker processes reproduces the result bit-for-bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from tempexit.clock import TemperedStableParams
from tempexit.dynamics import (
    Domain,
    DriftField,
    Driver,
    GaussianDriver,
    MaxStepsExceeded,
    contains,
    run_trajectory,
)
from tempexit.samplers import make_stream

__all__ = [
    "CensoringError",
    "CompareReport",
    "HalfLineLeft",
    "HalfLineRight",
    "MCEstimate",
    "MfetEstimate",
    "PredicateTarget",
    "RunningStats",
    "WholeComplement",
    "accumulate",
    "compare",
    "estimate_escape",
    "estimate_mfet",
]

# Fraction of censored (max-steps) trajectories above which an estimate is
# considered biased and refused.
CENSOR_FRACTION = 1e-3

# Trajectories per worker task; fixed so task boundaries never depend on the
# worker count.
_CHUNK = 2048


class CensoringError(RuntimeError):
    """Too many trajectories hit max_steps for an unbiased estimate."""

    def __init__(self, n_censored: int, n_requested: int):
        frac = n_censored / n_requested
        super().__init__(
            f"{n_censored}/{n_requested} trajectories ({frac:.2%}) exceeded max_steps"
        )
        self.n_censored = n_censored
        self.n_requested = n_requested


class RunningStats:
    """Streaming mean/variance (Welford's one-pass update)."""

    __slots__ = ("count", "mean", "_m2")

    def __init__(self) -> None:
        self.count = 0
        self.mean = 0.0
        self._m2 = 0.0

    def push(self, x: float) -> "RunningStats":
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self._m2 += delta * (x - self.mean)
        return self

    @property
    def variance(self) -> float:
        """Unbiased sample variance (0 for fewer than two samples)."""
        if self.count < 2:
            return 0.0
        return self._m2 / (self.count - 1)

    @property
    def stderr(self) -> float:
        if self.count < 1:
            return 0.0
        return math.sqrt(self.variance / self.count)


def accumulate(state: RunningStats, sample: float) -> RunningStats:
    """Fold one sample into the running statistics and return them."""
    return state.push(sample)


class _PairedStats:
    # Welford for two jointly observed samples plus their comoment, used for
    # the delta-method standard error of a ratio of means.
    __slots__ = ("count", "mean_x", "mean_y", "_mxx", "_myy", "_mxy")

    def __init__(self) -> None:
        self.count = 0
        self.mean_x = 0.0
        self.mean_y = 0.0
        self._mxx = 0.0
        self._myy = 0.0
        self._mxy = 0.0

    def push(self, x: float, y: float) -> None:
        self.count += 1
        dx = x - self.mean_x
        dy = y - self.mean_y
        self.mean_x += dx / self.count
        self.mean_y += dy / self.count
        self._mxx += dx * (x - self.mean_x)
        self._myy += dy * (y - self.mean_y)
        self._mxy += dx * (y - self.mean_y)

    def ratio_of_means(self) -> tuple[float, float]:
        """(mean_x / mean_y, delta-method stderr of the ratio)."""
        n = self.count
        r = self.mean_x / self.mean_y
        if n < 2:
            return r, 0.0
        sxx = self._mxx / (n - 1)
        syy = self._myy / (n - 1)
        sxy = self._mxy / (n - 1)
        var = (sxx - 2.0 * r * sxy + r * r * syy) / (n * self.mean_y * self.mean_y)
        return r, math.sqrt(max(var, 0.0))


EstimateKind = Literal["physical_mfet", "operational_mfet", "escape_prob"]


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo mean with its standard error.

    For escape probabilities the standard error is the Bernoulli formula
    sqrt(mean (1 - mean) / count).
    """

    mean: float
    stderr: float
    count: int
    kind: EstimateKind


@dataclass(frozen=True)
class MfetEstimate:
    """Paired physical/operational exit-time estimates from one ensemble.

    ratio is the ratio of means t_exit / s_exit with a delta-method standard
    error accounting for the strong correlation between the two.
    """

    physical: MCEstimate
    operational: MCEstimate
    ratio: float
    ratio_stderr: float
    n_censored: int
    n_requested: int


# --- landing target sets ----------------------------------------------------


@dataclass(frozen=True)
class HalfLineRight:
    """E = [threshold, inf) along the first coordinate."""

    threshold: float

    def contains(self, landing: np.ndarray) -> bool:
        return float(landing[0]) >= self.threshold


@dataclass(frozen=True)
class HalfLineLeft:
    """E = (-inf, threshold] along the first coordinate."""

    threshold: float

    def contains(self, landing: np.ndarray) -> bool:
        return float(landing[0]) <= self.threshold


@dataclass(frozen=True)
class WholeComplement:
    """All of the domain's exterior: every landing counts."""

    def contains(self, landing: np.ndarray) -> bool:
        return True


@dataclass(frozen=True)
class PredicateTarget:
    """Arbitrary predicate over landing points (not picklable across workers
    unless the callable is a module-level function)."""

    predicate: Callable[[np.ndarray], bool]

    def contains(self, landing: np.ndarray) -> bool:
        return bool(self.predicate(landing))


TargetSet = HalfLineRight | HalfLineLeft | WholeComplement | PredicateTarget


# --- ensemble runners -------------------------------------------------------


def _mfet_chunk(args) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    (x0, domain, drift, driver, clock, ds, max_steps, master_seed, lo, hi) = args
    n = hi - lo
    t = np.empty(n)
    s = np.empty(n)
    cens = np.zeros(n, dtype=bool)
    for j in range(n):
        stream = make_stream(master_seed, lo + j)
        try:
            rec = run_trajectory(x0, domain, drift, driver, clock, ds, max_steps, stream)
            t[j] = rec.t_exit
            s[j] = rec.s_exit
        except MaxStepsExceeded:
            cens[j] = True
            t[j] = np.nan
            s[j] = np.nan
    return t, s, cens


def _escape_chunk(args) -> tuple[np.ndarray, np.ndarray]:
    (x0, domain, target, driver, ds, max_steps, master_seed, lo, hi) = args
    n = hi - lo
    hit = np.zeros(n, dtype=bool)
    cens = np.zeros(n, dtype=bool)
    for j in range(n):
        stream = make_stream(master_seed, lo + j)
        try:
            rec = run_trajectory(x0, domain, None, driver, None, ds, max_steps, stream)
            hit[j] = target.contains(rec.landing)
        except MaxStepsExceeded:
            cens[j] = True
    return hit, cens


def _run_chunks(worker, common_args, n_traj: int, workers: int) -> list:
    bounds = [(lo, min(lo + _CHUNK, n_traj)) for lo in range(0, n_traj, _CHUNK)]
    tasks = [common_args + (lo, hi) for lo, hi in bounds]
    if workers <= 1 or len(tasks) == 1:
        return [worker(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(worker, tasks))


def estimate_mfet(
    x0,
    domain: Domain,
    drift: DriftField | None,
    driver: Driver,
    clock: TemperedStableParams,
    ds: float,
    n_traj: int,
    master_seed: int,
    max_steps: int = 10**8,
    workers: int = 1,
) -> MfetEstimate:
    """Estimate the mean first exit time from n_traj independent trajectories.

    Returns streaming mean/stderr of the physical exit time t_exit and the
    operational exit time s_exit.  Trajectories that hit max_steps are counted
    and excluded; if more than CENSOR_FRACTION of them are censored the
    estimate would be biased and CensoringError is raised instead.
    """
    if n_traj < 2:
        raise ValueError(f"n_traj must be >= 2, got {n_traj}")
    if not contains(domain, x0):
        raise ValueError(f"start point {x0} is not strictly inside the domain")
    common = (np.atleast_1d(np.asarray(x0, dtype=float)), domain, drift, driver,
              clock, ds, max_steps, master_seed)
    chunks = _run_chunks(_mfet_chunk, common, n_traj, workers)

    t_stats = RunningStats()
    s_stats = RunningStats()
    pair = _PairedStats()
    n_censored = 0
    for t, s, cens in chunks:
        for j in range(t.shape[0]):
            if cens[j]:
                n_censored += 1
                continue
            accumulate(t_stats, float(t[j]))
            accumulate(s_stats, float(s[j]))
            pair.push(float(t[j]), float(s[j]))
    if n_censored > CENSOR_FRACTION * n_traj:
        raise CensoringError(n_censored, n_traj)
    ratio, ratio_stderr = pair.ratio_of_means()
    return MfetEstimate(
        physical=MCEstimate(t_stats.mean, t_stats.stderr, t_stats.count, "physical_mfet"),
        operational=MCEstimate(s_stats.mean, s_stats.stderr, s_stats.count, "operational_mfet"),
        ratio=ratio,
        ratio_stderr=ratio_stderr,
        n_censored=n_censored,
        n_requested=n_traj,
    )


def estimate_escape(
    x0,
    domain: Domain,
    target: TargetSet,
    driver: Driver,
    ds: float,
    n_traj: int,
    master_seed: int,
    max_steps: int = 10**8,
    workers: int = 1,
) -> MCEstimate:
    """Estimate the probability that the first landing outside the domain is in
    the target set.

    Escape probabilities only make sense for jump processes, so the driver
    must be stable.  The simulation runs in operational time only; no clock
    parameter exists here, which is what makes the estimate independent of
    the waiting-time law by construction.
    """
    if isinstance(driver, GaussianDriver):
        raise ValueError(
            "escape probability is undefined for the Gaussian driver "
            "(continuous paths land exactly on the boundary)"
        )
    if n_traj < 2:
        raise ValueError(f"n_traj must be >= 2, got {n_traj}")
    if not contains(domain, x0):
        raise ValueError(f"start point {x0} is not strictly inside the domain")
    common = (np.atleast_1d(np.asarray(x0, dtype=float)), domain, target, driver,
              ds, max_steps, master_seed)
    chunks = _run_chunks(_escape_chunk, common, n_traj, workers)

    n_hit = 0
    n_used = 0
    n_censored = 0
    for hit, cens in chunks:
        n_censored += int(cens.sum())
        n_used += int((~cens).sum())
        n_hit += int(hit[~cens].sum())
    if n_censored > CENSOR_FRACTION * n_traj:
        raise CensoringError(n_censored, n_traj)
    p = n_hit / n_used
    stderr = math.sqrt(p * (1.0 - p) / n_used)
    return MCEstimate(p, stderr, n_used, "escape_prob")


# --- comparison against analytic values --------------------------------------


@dataclass(frozen=True)
class CompareReport:
    """Statistical comparison of a Monte Carlo estimate with an analytic value.

    passed is True when |z| <= z_max or rel_err <= rel_tol.
    """

    analytic: float
    estimate: MCEstimate
    z: float
    rel_err: float
    passed: bool


def compare(
    estimate: MCEstimate,
    analytic: float,
    rel_tol: float = 0.05,
    z_max: float = 3.0,
) -> CompareReport:
    """Build the pass/fail report for one estimate."""
    diff = estimate.mean - analytic
    if estimate.stderr > 0.0:
        z = diff / estimate.stderr
    else:
        z = 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
    if analytic != 0.0:
        rel_err = abs(diff) / abs(analytic)
    else:
        rel_err = 0.0 if diff == 0.0 else math.inf
    passed = abs(z) <= z_max or rel_err <= rel_tol
    return CompareReport(analytic, estimate, z, rel_err, passed)
