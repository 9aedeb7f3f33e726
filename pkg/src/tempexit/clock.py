"""The physical clock: tempered-stable time accumulated along operational time.

The clock T(s) is a strictly increasing subordinator with Laplace exponent
psi(lam) = (lam + mu)^alpha - mu^alpha.  Its mean rate psi'(0) = alpha mu^(alpha-1)
is the factor by which physical exit times exceed operational exit times.
"""

from __future__ import annotations

from dataclasses import dataclass

from tempexit.samplers import RngStream, TemperedStableParams, sample_tempered_onesided

__all__ = ["ClockState", "InfiniteMeanError", "advance", "mean_rate"]


class InfiniteMeanError(ArithmeticError):
    """The clock's mean rate diverges (mu = 0 with alpha < 1)."""


@dataclass(frozen=True)
class ClockState:
    """Accumulated physical and operational time; both nondecreasing."""

    physical_time: float = 0.0
    operational_time: float = 0.0


def advance(state: ClockState, ds: float, p: TemperedStableParams, s: RngStream) -> ClockState:
    """Advance the clock by one operational step ds.

    Physical time grows by a tempered-stable increment (by exactly ds when
    alpha = 1, the deterministic clock).
    """
    if not ds > 0.0:
        raise ValueError(f"ds must be positive, got {ds}")
    if p.alpha == 1.0:
        dt = ds
    else:
        dt = sample_tempered_onesided(s, p, ds)
    return ClockState(state.physical_time + dt, state.operational_time + ds)


def mean_rate(p: TemperedStableParams) -> float:
    """Mean physical time per unit operational time, alpha * mu^(alpha - 1).

    Returns 1 for alpha = 1 (any mu).  Raises InfiniteMeanError for mu = 0
    with alpha < 1: the untempered waiting times have infinite mean, so every
    mean exit time is infinite too.
    """
    if p.alpha == 1.0:
        return 1.0
    if p.mu == 0.0:
        raise InfiniteMeanError(
            f"mean clock rate diverges for alpha={p.alpha} < 1 with mu=0"
        )
    return p.alpha * p.mu ** (p.alpha - 1.0)
