"""Monte Carlo engine and closed-form reference library for mean first exit
times and escape probabilities of anomalous diffusion processes.

The physical clock is an inverse tempered one-sided stable subordinator
(stability 0 < alpha <= 1, tempering mu >= 0); the spatial driver is either
Gaussian noise or symmetric beta-stable noise (0 < beta < 2).  Trajectories
are simulated in operational time, the physical clock is accumulated
alongside, and ensemble statistics are cross-validated against the closed
forms in :mod:`tempexit.analytic`.
"""

from tempexit.samplers import (
    RngStream,
    TemperedStableParams,
    make_stream,
    sample_gaussian,
    sample_onesided_stable,
    sample_symmetric_stable,
    sample_tempered_onesided,
)
from tempexit.clock import ClockState, InfiniteMeanError, advance, mean_rate
from tempexit.dynamics import (
    Domain,
    ExitRecord,
    GaussianDriver,
    MaxStepsExceeded,
    StableDriver,
    contains,
    run_trajectory,
    step,
)
from tempexit.estimator import (
    CensoringError,
    CompareReport,
    HalfLineLeft,
    HalfLineRight,
    MCEstimate,
    MfetEstimate,
    PredicateTarget,
    RunningStats,
    WholeComplement,
    accumulate,
    compare,
    estimate_escape,
    estimate_mfet,
)
from tempexit.analytic import (
    escape_prob_interval,
    escape_prob_interval_by_quadrature,
    escape_prob_unit_interval,
    getoor_u,
    mfet_gaussian_1d,
    mfet_gaussian_ball,
    mfet_stable_ball,
)
from tempexit.specfun import QuadSpec, QuadratureError, adaptive_quad, log_gamma, reg_inc_beta

__version__ = "0.1.0"

__all__ = [
    "ClockState",
    "CensoringError",
    "CompareReport",
    "Domain",
    "ExitRecord",
    "GaussianDriver",
    "HalfLineLeft",
    "HalfLineRight",
    "InfiniteMeanError",
    "MCEstimate",
    "MaxStepsExceeded",
    "MfetEstimate",
    "PredicateTarget",
    "QuadSpec",
    "QuadratureError",
    "RngStream",
    "RunningStats",
    "StableDriver",
    "TemperedStableParams",
    "WholeComplement",
    "accumulate",
    "adaptive_quad",
    "advance",
    "compare",
    "contains",
    "escape_prob_interval",
    "escape_prob_interval_by_quadrature",
    "escape_prob_unit_interval",
    "estimate_escape",
    "estimate_mfet",
    "getoor_u",
    "log_gamma",
    "make_stream",
    "mean_rate",
    "mfet_gaussian_1d",
    "mfet_gaussian_ball",
    "mfet_stable_ball",
    "reg_inc_beta",
    "run_trajectory",
    "sample_gaussian",
    "sample_onesided_stable",
    "sample_symmetric_stable",
    "sample_tempered_onesided",
    "step",
    "__version__",
]
