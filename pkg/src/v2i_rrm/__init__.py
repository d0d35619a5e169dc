"""Twin-timescale radio resource management for a URLLC V2I downlink.

Long-timescale closed-form bandwidth selection from the road-traffic density,
short-timescale max-min power allocation across vehicles via Dinkelbach
iteration, and Monte Carlo validation of the finite-blocklength latency
approximations for MF/ZF massive-MIMO precoding under perfect and imperfect
CSI.
"""

from ._backend import backend_name, get_kernels
from .channel import (
    ChannelConfig,
    EffectiveSinrModel,
    Precoder,
    Vue,
    asymptotic_sinr,
    effective_sinr,
    make_population,
    make_vue,
    pathloss,
    phi,
    place_vues,
    worst_case_pathloss,
)
from .config import SystemConfig, dbm_per_hz_to_w_per_hz, load_config
from .errors import (
    AllInfeasibleError,
    BracketError,
    ConfigError,
    ConvergenceError,
    DomainError,
    InfeasibleRateError,
    RrmError,
)
from .fbl import (
    QosTarget,
    dispersion,
    effective_rate,
    latency,
    latency_from_sinr,
    na_rate,
)
from .montecarlo import (
    EmpiricalRate,
    McConfig,
    OmegaKind,
    OmegaSample,
    empirical_rate,
    instantaneous_inv_sinr,
    sample_omega,
    tightness_report,
)
from .numerics import Tolerance, find_root_monotone, gaussian_q, gaussian_q_inv
from .road_traffic import (
    TrafficModel,
    coherence_time,
    flux,
    max_doppler,
    num_vues,
    speed,
)
from .stage1 import Stage1Inputs, Stage1Result, optimal_bandwidth, worst_case_sinr
from .stage2 import (
    AllocationResult,
    EqualizerState,
    RatioParts,
    dinkelbach_allocate,
    epa_allocate,
    equalize_maxmin,
    h_value,
    ratio_parts,
)

__version__ = "0.1.0"

__all__ = [
    "AllInfeasibleError",
    "AllocationResult",
    "BracketError",
    "ChannelConfig",
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "EffectiveSinrModel",
    "EmpiricalRate",
    "EqualizerState",
    "InfeasibleRateError",
    "McConfig",
    "OmegaKind",
    "OmegaSample",
    "Precoder",
    "QosTarget",
    "RatioParts",
    "RrmError",
    "Stage1Inputs",
    "Stage1Result",
    "SystemConfig",
    "Tolerance",
    "TrafficModel",
    "Vue",
    "asymptotic_sinr",
    "backend_name",
    "coherence_time",
    "dbm_per_hz_to_w_per_hz",
    "dinkelbach_allocate",
    "dispersion",
    "effective_rate",
    "effective_sinr",
    "empirical_rate",
    "epa_allocate",
    "equalize_maxmin",
    "find_root_monotone",
    "flux",
    "gaussian_q",
    "gaussian_q_inv",
    "get_kernels",
    "h_value",
    "instantaneous_inv_sinr",
    "latency",
    "latency_from_sinr",
    "load_config",
    "make_population",
    "make_vue",
    "max_doppler",
    "na_rate",
    "num_vues",
    "optimal_bandwidth",
    "pathloss",
    "phi",
    "place_vues",
    "ratio_parts",
    "sample_omega",
    "speed",
    "tightness_report",
    "worst_case_pathloss",
    "worst_case_sinr",
]
