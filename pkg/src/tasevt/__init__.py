"""Extreme-value analysis of spectrum-sharing links with transmit antenna selection.

Exact SINR law, Gumbel approximations of the mean and outage capacity
(exact-quantile, IPLR and TPLR constants), and a Monte Carlo oracle.
"""

from .channel import (
    ChannelDraw,
    RngStream,
    SystemParams,
    best_antenna,
    sample_channel,
    sinr,
    transmit_power,
)
from .errors import (
    BracketError,
    ConfigError,
    ConvergenceError,
    DomainError,
    GridError,
    InsufficientTrialsError,
    OutOfRegimeError,
    QuadratureError,
)
from .evt import (
    GumbelConstants,
    MdaDiagnostics,
    Regime,
    asymptotic_mean_capacity,
    asymptotic_outage_capacity,
    gumbel_constants_rate,
    iplr_constants,
    iplr_mean_capacity,
    iplr_outage_capacity,
    mean_capacity,
    outage_capacity,
    tplr_constants,
    tplr_low_interference,
    tplr_mean_capacity,
    tplr_outage_capacity,
    verify_mda_condition,
)
from .exact import (
    QuantileSolverConfig,
    exact_mean_capacity,
    exact_outage_capacity,
    sinr_cdf,
    sinr_cdf_max,
    sinr_quantile,
)
from .montecarlo import (
    CapacityEstimate,
    SimulationPlan,
    empirical_cdf,
    estimate_mean_capacity,
    estimate_outage_capacity,
)
from .special_functions import lambert_w0, upper_incomplete_gamma_zero

__version__ = "0.1.0"
