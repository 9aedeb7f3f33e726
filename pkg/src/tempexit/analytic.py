"""Closed-form mean first exit times and escape probabilities.

All formulas are for the zero-drift, unit-strength dynamics on the centered
ball/interval of radius r.  With the tempering factor c = alpha mu^(alpha-1)
(the mean physical time per unit operational time):

* Gaussian driver, interval:  u(x) = c (r^2 - x^2) / 2
* Gaussian driver, n-ball:    u(x) = c (r^2 - |x|^2) / (2 n)
* stable driver, n-ball:      u(x) = c * getoor_u(x), where

      getoor_u(x) = Gamma(n/2) (r^2 - |x|^2)^(beta/2)
                    / (2^beta Gamma(1 + beta/2) Gamma(n/2 + beta/2))

  is the expected exit time of the unit isotropic beta-stable process
  (Getoor's formula; for n = 1, beta = 1 it reduces to sqrt(r^2 - x^2),
  and beta = 2 recovers the Gaussian forms).

* escape probability of the interval (-r, r) to the right half-line
  [r, inf) for the symmetric beta-stable driver:

      P(x) = (2r)^(1-beta) Gamma(beta) / Gamma(beta/2)^2
             * integral_{-r}^{x} (r^2 - y^2)^(beta/2 - 1) dy
           = I_z(beta/2, beta/2)  with  z = (x + r) / (2r),

  the regularized incomplete beta function (substitute y = r (2t - 1)).
  The escape probability does not involve the clock parameters at all.
"""

from __future__ import annotations

import math

import numpy as np

from tempexit.clock import TemperedStableParams, mean_rate
from tempexit.specfun import QuadSpec, adaptive_quad, log_gamma, reg_inc_beta

__all__ = [
    "escape_prob_interval",
    "escape_prob_interval_by_quadrature",
    "escape_prob_unit_interval",
    "getoor_u",
    "mfet_gaussian_1d",
    "mfet_gaussian_ball",
    "mfet_stable_ball",
]


def _radius2(x, r: float, n: int) -> float:
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    if xv.shape != (n,):
        raise ValueError(f"start point has shape {xv.shape}, expected ({n},)")
    x2 = float(xv @ xv)
    if x2 > r * r:
        raise ValueError(f"start point lies outside the ball: |x| = {math.sqrt(x2)} > {r}")
    return x2


def mfet_gaussian_1d(x: float, r: float, alpha: float, mu: float) -> float:
    """Mean first exit time from (-r, r), Gaussian driver (a = eps = 1)."""
    x2 = _radius2(x, r, 1)
    c = mean_rate(TemperedStableParams(alpha, mu))
    return c * (r * r - x2) / 2.0


def mfet_gaussian_ball(x, r: float, alpha: float, mu: float, n: int) -> float:
    """Mean first exit time from the n-ball of radius r, Gaussian driver."""
    x2 = _radius2(x, r, n)
    c = mean_rate(TemperedStableParams(alpha, mu))
    return c * (r * r - x2) / (2.0 * n)


def getoor_u(x, r: float, beta: float, n: int) -> float:
    """Expected exit time of the unit isotropic beta-stable process from the
    n-ball (0 < beta <= 2; beta = 2 is the Gaussian limit)."""
    if not 0.0 < beta <= 2.0:
        raise ValueError(f"beta must lie in (0, 2], got {beta}")
    x2 = _radius2(x, r, n)
    log_coef = (
        log_gamma(0.5 * n)
        - beta * math.log(2.0)
        - log_gamma(1.0 + 0.5 * beta)
        - log_gamma(0.5 * n + 0.5 * beta)
    )
    return math.exp(log_coef) * (r * r - x2) ** (0.5 * beta)


def mfet_stable_ball(x, r: float, alpha: float, mu: float, beta: float, n: int) -> float:
    """Mean first exit time from the n-ball, symmetric beta-stable driver
    (eps = 1): the tempering factor times Getoor's function."""
    c = mean_rate(TemperedStableParams(alpha, mu))
    return c * getoor_u(x, r, beta, n)


def escape_prob_interval(x: float, r: float, beta: float) -> float:
    """Probability of first landing in [r, inf) from x in (-r, r)."""
    if not 0.0 < beta < 2.0:
        raise ValueError(f"beta must lie in (0, 2), got {beta}")
    if not abs(x) <= r:
        raise ValueError(f"start point must satisfy |x| <= r, got x={x}, r={r}")
    z = (x + r) / (2.0 * r)
    return reg_inc_beta(z, 0.5 * beta, 0.5 * beta)


def escape_prob_unit_interval(x: float, beta: float) -> float:
    """Escape probability for the unit interval (-1, 1) with target [1, inf)."""
    return escape_prob_interval(x, 1.0, beta)


def escape_prob_interval_by_quadrature(
    x: float,
    r: float,
    beta: float,
    spec: QuadSpec = QuadSpec(rel_tol=1e-11),
) -> float:
    """Independent quadrature evaluation of the escape probability.

    Integrates the density (r^2 - y^2)^(beta/2 - 1) directly rather than
    going through the incomplete beta function.  The integrand is evaluated
    in the boundary-offset variable d = y + r, i.e. as (d (2r - d))^(beta/2-1),
    and for x > 0 the interval is split at the midpoint and the right part
    reflected, so every singular endpoint sits at an exactly representable
    zero offset.
    """
    if not 0.0 < beta < 2.0:
        raise ValueError(f"beta must lie in (0, 2), got {beta}")
    if not abs(x) <= r:
        raise ValueError(f"start point must satisfy |x| <= r, got x={x}, r={r}")
    p = 0.5 * beta - 1.0

    def density(d: np.ndarray) -> np.ndarray:
        return (d * (2.0 * r - d)) ** p

    log_pref = log_gamma(beta) - 2.0 * log_gamma(0.5 * beta) + (1.0 - beta) * math.log(2.0 * r)
    pref = math.exp(log_pref)
    if x <= 0.0:
        if x + r == 0.0:
            return 0.0
        return pref * adaptive_quad(density, 0.0, x + r, spec)
    total = 2.0 * adaptive_quad(density, 0.0, r, spec)
    if r - x == 0.0:
        tail = 0.0
    else:
        tail = adaptive_quad(density, 0.0, r - x, spec)
    return pref * (total - tail)
