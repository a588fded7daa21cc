"""BER of differential m-PSK coherent links under equalization-enhanced phase noise."""

from .ber import (
    BerCurve,
    BerMode,
    BerModelConfig,
    BerPoint,
    SnrConvention,
    ber_curve,
    ber_floor,
    ber_mpsk,
    erfc,
    required_snr,
)
from .core import (
    LaserParams,
    LinkParams,
    ModulationSpec,
    NoiseBudget,
    decision_margin,
    eepn_variance,
    intrinsic_variance,
    noise_budget,
    snr_db_to_linear,
    snr_linear_to_db,
)
from .montecarlo import EepnProcess, McConfig, McResult, gray_decode, gray_encode, simulate
from .scenario import Scenario, load_scenario

__version__ = "0.1.0"
