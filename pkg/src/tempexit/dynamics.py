"""Domains, noise drivers, and trajectory simulation until first exit.

A trajectory is an Euler walk in operational time s:

    Gaussian driver:  x' = x + F(x) ds + sqrt(2 eps a ds) G
    stable driver:    x' = x + F(x) ds + eps ds^(1/beta) S

with G a standard normal vector and S a unit isotropic beta-stable vector
(characteristic function e^{-|k|^beta}).  In dimension >= 2 the stable vector
uses the sub-Gaussian representation S = sqrt(2 A) G with A positive
(beta/2)-stable, which is exactly isotropic.

The physical clock advances by one tempered-stable increment per operational
step, including the step on which the exit occurs; run_trajectory reports the
accumulated physical time at exit together with the landing point (the first
grid position outside the domain, which for stable drivers captures the
leapover past the boundary).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from tempexit.samplers import (
    RngStream,
    TemperedStableParams,
    sample_onesided_stable,
    sample_symmetric_stable,
    sample_tempered_onesided,
)

__all__ = [
    "Domain",
    "DriftField",
    "ExitRecord",
    "GaussianDriver",
    "MaxStepsExceeded",
    "StableDriver",
    "contains",
    "run_trajectory",
    "step",
]

DriftField = Callable[[np.ndarray], np.ndarray]

# Block sizes for the vectorized driftless scan: grow geometrically so short
# trajectories stay cheap and long ones amortize per-call overhead.
_BLOCK_START = 512
_BLOCK_MAX = 16384


@dataclass(frozen=True)
class Domain:
    """Ball of radius r centered at the origin; dim = 1 is the interval (-r, r)."""

    dim: int
    radius: float

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if not self.radius > 0.0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    @staticmethod
    def interval(radius: float) -> "Domain":
        return Domain(1, radius)

    @staticmethod
    def ball(dim: int, radius: float) -> "Domain":
        return Domain(dim, radius)


@dataclass(frozen=True)
class GaussianDriver:
    """Isotropic Gaussian noise: diffusion coefficient a, strength eps."""

    a: float = 1.0
    eps: float = 1.0

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise ValueError(f"a must be positive, got {self.a}")
        if not self.eps > 0.0:
            raise ValueError(f"eps must be positive, got {self.eps}")

    def sample_increments(self, s: RngStream, ds: float, n_steps: int, dim: int) -> np.ndarray:
        sd = math.sqrt(2.0 * self.eps * self.a * ds)
        return sd * s.standard_normal((n_steps, dim))


@dataclass(frozen=True)
class StableDriver:
    """Symmetric beta-stable jumps: index beta in (0, 2), jump scale eps."""

    beta: float
    eps: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.beta < 2.0:
            raise ValueError(f"beta must lie in (0, 2), got {self.beta}")
        if not self.eps > 0.0:
            raise ValueError(f"eps must be positive, got {self.eps}")

    def sample_increments(self, s: RngStream, ds: float, n_steps: int, dim: int) -> np.ndarray:
        scale = self.eps * ds ** (1.0 / self.beta)
        if dim == 1:
            return scale * sample_symmetric_stable(s, self.beta, n_steps)[:, None]
        # sub-Gaussian isotropic vector: sqrt(2A) G with A ~ (beta/2)-stable
        a = sample_onesided_stable(s, 0.5 * self.beta, n_steps)
        g = s.standard_normal((n_steps, dim))
        return scale * np.sqrt(2.0 * a)[:, None] * g


Driver = GaussianDriver | StableDriver


@dataclass(frozen=True)
class ExitRecord:
    """Outcome of one trajectory.

    s_exit : operational exit time, equal to steps * ds
    t_exit : physical exit time (clock evaluated at the exit step)
    landing : first position outside the domain, |landing| >= radius
    steps : number of operational steps taken
    """

    s_exit: float
    t_exit: float
    landing: np.ndarray
    steps: int


class MaxStepsExceeded(RuntimeError):
    """No exit within max_steps; carries the partial record (position still inside)."""

    def __init__(self, partial: ExitRecord):
        super().__init__(f"no exit within {partial.steps} steps (s = {partial.s_exit})")
        self.partial = partial


def contains(d: Domain, x) -> bool:
    """Strict interior test: |x| < radius.  Boundary points count as exited."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (d.dim,):
        raise ValueError(f"position has shape {x.shape}, domain dimension is {d.dim}")
    return float(x @ x) < d.radius * d.radius


def step(
    x,
    ds: float,
    F: DriftField | None,
    drv: Driver,
    s: RngStream,
) -> np.ndarray:
    """One explicit Euler step in operational time.  F = None means zero drift."""
    if not ds > 0.0:
        raise ValueError(f"ds must be positive, got {ds}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    incr = drv.sample_increments(s, ds, 1, x.shape[0])[0]
    if F is None:
        return x + incr
    return x + np.asarray(F(x), dtype=float) * ds + incr


def _clock_sum(clock: TemperedStableParams | None, s: RngStream, ds: float, n_steps: int) -> float:
    if clock is None or clock.alpha == 1.0 or n_steps == 0:
        return n_steps * ds
    return float(np.sum(sample_tempered_onesided(s, clock, ds, n_steps)))


def run_trajectory(
    x0,
    d: Domain,
    F: DriftField | None,
    drv: Driver,
    clock: TemperedStableParams | None,
    ds: float,
    max_steps: int,
    s: RngStream,
) -> ExitRecord:
    """Simulate from x0 until the first position outside the domain.

    clock = None (or alpha = 1) is the deterministic clock, for which
    t_exit == s_exit exactly.  Raises MaxStepsExceeded if the trajectory is
    still inside after max_steps; the exception carries the partial record.

    Results depend only on the stream state and the arguments, never on how
    trajectories are scheduled across workers.  The zero-drift path draws
    spatial increments in blocks followed by the block's clock increments;
    this consumes the stream in a fixed documented order that differs from
    the strict step/advance interleaving of the drift path, but the sampled
    law is identical.
    """
    if not ds > 0.0:
        raise ValueError(f"ds must be positive, got {ds}")
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps}")
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    if not contains(d, x):
        raise ValueError(f"start point {x0} is not strictly inside the domain")
    if F is not None:
        return _run_stepwise(x, d, F, drv, clock, ds, max_steps, s)
    return _run_blocked(x, d, drv, clock, ds, max_steps, s)


def _run_blocked(
    x: np.ndarray,
    d: Domain,
    drv: Driver,
    clock: TemperedStableParams | None,
    ds: float,
    max_steps: int,
    s: RngStream,
) -> ExitRecord:
    r2 = d.radius * d.radius
    steps = 0
    t_phys = 0.0
    block = _BLOCK_START
    while steps < max_steps:
        m = min(block, max_steps - steps)
        path = x + np.cumsum(drv.sample_increments(s, ds, m, d.dim), axis=0)
        outside = np.flatnonzero(np.einsum("ij,ij->i", path, path) >= r2)
        k = int(outside[0]) if outside.size else -1
        used = k + 1 if k >= 0 else m
        t_phys += _clock_sum(clock, s, ds, used)
        steps += used
        if k >= 0:
            s_exit = steps * ds
            if clock is None or clock.alpha == 1.0:
                t_phys = s_exit
            return ExitRecord(s_exit, t_phys, path[k].copy(), steps)
        x = path[-1]
        block = min(block * 2, _BLOCK_MAX)
    raise MaxStepsExceeded(ExitRecord(steps * ds, t_phys, x.copy(), steps))


def _run_stepwise(
    x: np.ndarray,
    d: Domain,
    F: DriftField,
    drv: Driver,
    clock: TemperedStableParams | None,
    ds: float,
    max_steps: int,
    s: RngStream,
) -> ExitRecord:
    r2 = d.radius * d.radius
    t_phys = 0.0
    for n in range(1, max_steps + 1):
        x = x + np.asarray(F(x), dtype=float) * ds + drv.sample_increments(s, ds, 1, d.dim)[0]
        t_phys += _clock_sum(clock, s, ds, 1)
        if float(x @ x) >= r2:
            s_exit = n * ds
            if clock is None or clock.alpha == 1.0:
                t_phys = s_exit
            return ExitRecord(s_exit, t_phys, x.copy(), n)
    raise MaxStepsExceeded(ExitRecord(max_steps * ds, t_phys, x.copy(), max_steps))
