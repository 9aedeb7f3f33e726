"""Deterministic seeded random streams and samplers for the noise laws.

Conventions (all laws standardized so the closed-form results hold exactly):

* one-sided stable, 0 < alpha < 1:  Laplace transform  E[e^{-lam X}] = e^{-lam^alpha}
* symmetric stable, 0 < beta < 2:   characteristic fn  E[e^{i k X}]  = e^{-|k|^beta}
* tempered one-sided increment over an operational step ds:
                                    E[e^{-lam X}] = e^{-ds ((lam+mu)^alpha - mu^alpha)}

Streams are numpy PCG64 generators keyed by (master_seed, stream_index); the
seed material is mixed through numpy's SeedSequence hash, so distinct indices
give statistically independent streams and equal keys replay bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RngStream",
    "TemperedStableParams",
    "make_stream",
    "sample_gaussian",
    "sample_onesided_stable",
    "sample_symmetric_stable",
    "sample_tempered_onesided",
]

RngStream = np.random.Generator


@dataclass(frozen=True)
class TemperedStableParams:
    """Waiting-time law: stability index alpha, tempering rate mu.

    0 < alpha <= 1 and mu >= 0.  alpha = 1 is the degenerate deterministic
    clock; mu = 0 is the untempered heavy-tailed law (infinite mean for
    alpha < 1).
    """

    alpha: float
    mu: float

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.mu >= 0.0:
            raise ValueError(f"mu must be >= 0, got {self.mu}")


def make_stream(master_seed: int, stream_index: int) -> RngStream:
    """Derive the random stream for one trajectory.

    Identical (master_seed, stream_index) pairs reproduce identical variate
    sequences; distinct indices are independent.  Streams can be created in
    any order, which is what makes trajectory-parallel runs deterministic.
    """
    if master_seed < 0 or stream_index < 0:
        raise ValueError("master_seed and stream_index must be nonnegative")
    seq = np.random.SeedSequence(master_seed, spawn_key=(stream_index,))
    return np.random.Generator(np.random.PCG64(seq))


def sample_gaussian(s: RngStream, size: int | None = None):
    """Standard normal draw(s)."""
    return s.standard_normal(size)


def sample_symmetric_stable(s: RngStream, beta: float, size: int | None = None):
    """Symmetric beta-stable draw(s) with characteristic function e^{-|k|^beta}.

    Chambers-Mallows-Stuck construction: with U uniform on (-pi/2, pi/2) and
    W standard exponential,

        X = sin(beta U) / cos(U)^{1/beta} * (cos((1-beta) U) / W)^{(1-beta)/beta}.

    beta = 1 reduces to tan(U), the standard Cauchy.
    """
    if not 0.0 < beta < 2.0:
        raise ValueError(f"beta must lie in (0, 2), got {beta}")
    scalar = size is None
    n = 1 if scalar else size
    u = (s.random(n) - 0.5) * math.pi
    w = s.standard_exponential(n)
    with np.errstate(over="ignore", divide="ignore"):
        x = (np.sin(beta * u) / np.cos(u) ** (1.0 / beta)) * (
            np.cos((1.0 - beta) * u) / w
        ) ** ((1.0 - beta) / beta)
    return float(x[0]) if scalar else x


def sample_onesided_stable(s: RngStream, alpha: float, size: int | None = None):
    """Positive alpha-stable draw(s) with Laplace transform e^{-lam^alpha}.

    Kanter's rejection-free construction: with U uniform on (0, pi] and W
    standard exponential,

        X = sin(alpha U) / sin(U)^{1/alpha} * (sin((1-alpha) U) / W)^{(1-alpha)/alpha}.

    Valid for 0 < alpha < 1.  Draws from the extreme tail can overflow to
    +inf in double precision; they represent astronomically large waiting
    times and are handled by the tempering rejection downstream.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    scalar = size is None
    n = 1 if scalar else size
    u = math.pi * (1.0 - s.random(n))
    w = s.standard_exponential(n)
    with np.errstate(over="ignore", divide="ignore"):
        x = (np.sin(alpha * u) / np.sin(u) ** (1.0 / alpha)) * (
            np.sin((1.0 - alpha) * u) / w
        ) ** ((1.0 - alpha) / alpha)
    return float(x[0]) if scalar else x


def sample_tempered_onesided(
    s: RngStream,
    p: TemperedStableParams,
    ds: float,
    size: int | None = None,
):
    """Tempered one-sided stable increment(s) over an operational step ds.

    Target Laplace transform e^{-ds ((lam+mu)^alpha - mu^alpha)}, sampled by
    exponential-tilting rejection: propose Y = ds^{1/alpha} X with X one-sided
    stable, accept with probability e^{-mu Y}.  The overall acceptance rate is
    e^{-ds mu^alpha}, close to 1 for the small steps the simulator uses; the
    loop re-proposes until acceptance, it never fails.

    Requires alpha < 1 (the alpha = 1 deterministic clock never samples).
    For mu = 0 every proposal is accepted and the draw consumes exactly the
    same stream state as ds^{1/alpha} * sample_onesided_stable.

    Note: a vectorized call with size=k redraws only rejected slots, so it is
    equal in law to, but not bit-identical with, k scalar calls.
    """
    if not 0.0 < p.alpha < 1.0:
        raise ValueError(f"tempered sampling requires 0 < alpha < 1, got {p.alpha}")
    if not ds > 0.0:
        raise ValueError(f"ds must be positive, got {ds}")
    scalar = size is None
    n = 1 if scalar else size
    scale = ds ** (1.0 / p.alpha)
    if p.mu == 0.0:
        y = scale * sample_onesided_stable(s, p.alpha, n)
        return float(y[0]) if scalar else y
    out = np.empty(n)
    pending = np.arange(n)
    while pending.size:
        y = scale * sample_onesided_stable(s, p.alpha, pending.size)
        # exp underflows to 0 for huge proposals, which rejects them; this is
        # the exact tilted acceptance probability, not a guard.
        accept = s.random(pending.size) < np.exp(-p.mu * y)
        out[pending[accept]] = y[accept]
        pending = pending[~accept]
    return float(out[0]) if scalar else out
