"""Physical parameters and the phase-noise variance budget.

All quantities are SI internally: meters, seconds, Hz, rad^2.  The
``from_engineering`` constructors take the units used in the CLI and in
scenario files (nm, ps/nm/km, km, kHz, GBd).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: speed of light in vacuum, m/s (exact SI value)
SPEED_OF_LIGHT = 299_792_458.0

#: 1 ps/(nm km) expressed in s/m^2
PS_PER_NM_KM = 1e-12 / (1e-9 * 1e3)


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class LinkParams:
    """Fiber link: carrier wavelength [m], CD coefficient [s/m^2], length [m]."""

    wavelength: float
    dispersion_coeff: float
    length: float

    def __post_init__(self):
        _finite("wavelength", self.wavelength)
        _finite("dispersion_coeff", self.dispersion_coeff)
        _finite("length", self.length)
        if self.wavelength <= 0:
            raise ValueError(f"wavelength must be > 0, got {self.wavelength}")
        if self.length < 0:
            raise ValueError(f"length must be >= 0, got {self.length}")

    @classmethod
    def from_engineering(
        cls, wavelength_nm: float, dispersion_ps_per_nm_km: float, length_km: float
    ) -> LinkParams:
        return cls(
            wavelength=wavelength_nm * 1e-9,
            dispersion_coeff=dispersion_ps_per_nm_km * PS_PER_NM_KM,
            length=length_km * 1e3,
        )

    @property
    def accumulated_dispersion(self) -> float:
        """D*L in s/m."""
        return self.dispersion_coeff * self.length


@dataclass(frozen=True)
class LaserParams:
    """Tx and LO 3-dB linewidths [Hz] and the LO/EEPN correlation ``rho``."""

    tx_linewidth: float
    lo_linewidth: float
    rho: float = 0.0

    def __post_init__(self):
        for name in ("tx_linewidth", "lo_linewidth", "rho"):
            _finite(name, getattr(self, name))
        if self.tx_linewidth < 0:
            raise ValueError(f"tx_linewidth must be >= 0, got {self.tx_linewidth}")
        if self.lo_linewidth < 0:
            raise ValueError(f"lo_linewidth must be >= 0, got {self.lo_linewidth}")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [-1, 1], got {self.rho}")

    def swapped(self) -> LaserParams:
        return LaserParams(self.lo_linewidth, self.tx_linewidth, self.rho)


@dataclass(frozen=True)
class ModulationSpec:
    """Modulation level m (power of two >= 4) and symbol rate in baud."""

    level: int
    symbol_rate: float

    def __post_init__(self):
        if isinstance(self.level, bool) or int(self.level) != self.level:
            raise ValueError(f"level must be an integer, got {self.level!r}")
        m = int(self.level)
        if m < 4 or m & (m - 1):
            raise ValueError(f"level must be a power of two >= 4, got {m}")
        object.__setattr__(self, "level", m)
        _finite("symbol_rate", self.symbol_rate)
        if self.symbol_rate <= 0:
            raise ValueError(f"symbol_rate must be > 0, got {self.symbol_rate}")

    @property
    def bits_per_symbol(self) -> int:
        return self.level.bit_length() - 1

    @property
    def symbol_period(self) -> float:
        return 1.0 / self.symbol_rate


@dataclass(frozen=True)
class NoiseBudget:
    """Per-symbol phase-noise variances in rad^2."""

    var_tx: float
    var_lo: float
    var_eepn: float
    var_cross: float
    var_total: float

    @property
    def sigma_total(self) -> float:
        return math.sqrt(self.var_total)


def eepn_variance(link: LinkParams, lo_linewidth: float, mod: ModulationSpec) -> float:
    """Variance of the equalization-enhanced phase noise per symbol.

    ``pi * lambda^2 * D * L * df_LO / (2 c T_s)``; linear in each of D, L,
    the LO linewidth and the symbol rate.
    """
    lo_linewidth = _finite("lo_linewidth", lo_linewidth)
    return (
        math.pi
        * link.wavelength**2
        * link.dispersion_coeff
        * link.length
        * lo_linewidth
        * mod.symbol_rate
        / (2.0 * SPEED_OF_LIGHT)
    )


def intrinsic_variance(linewidth: float, mod: ModulationSpec) -> float:
    """Wiener phase-noise increment variance per symbol, 2*pi*df*T_s."""
    linewidth = _finite("linewidth", linewidth)
    if linewidth < 0:
        raise ValueError(f"linewidth must be >= 0, got {linewidth}")
    return 2.0 * math.pi * linewidth / mod.symbol_rate


def noise_budget(link: LinkParams, lasers: LaserParams, mod: ModulationSpec) -> NoiseBudget:
    var_tx = intrinsic_variance(lasers.tx_linewidth, mod)
    var_lo = intrinsic_variance(lasers.lo_linewidth, mod)
    var_eepn = eepn_variance(link, lasers.lo_linewidth, mod)
    if var_eepn < 0:
        # only reachable with negative accumulated dispersion
        raise ValueError(
            f"EEPN variance is negative ({var_eepn:.3e}); accumulated dispersion must be >= 0"
        )
    var_cross = 2.0 * lasers.rho * math.sqrt(var_lo * var_eepn)
    var_total = var_tx + var_lo + var_eepn + var_cross
    if var_total < 0:
        raise ValueError(f"total phase-noise variance is negative ({var_total:.3e}) for rho={lasers.rho}")
    return NoiseBudget(var_tx, var_lo, var_eepn, var_cross, var_total)


def decision_margin(level: int) -> float:
    """Angular decision margin sqrt(1+sin(pi/m)) - sqrt(1-sin(pi/m)).

    Identical to 2*sin(pi/(2m)) by the half-angle identity.
    """
    m = ModulationSpec(level, 1.0).level
    return folded_margin(math.pi / m)


def folded_margin(angle):
    """sqrt(1+sin a) - sqrt(1-sin a), with ``a`` clamped to [-pi/2, pi/2].

    Accepts scalars or arrays; scalars come back as float.
    """
    s = np.sin(np.clip(np.asarray(angle, dtype=float), -np.pi / 2, np.pi / 2))
    g = np.sqrt(1.0 + s) - np.sqrt(1.0 - s)
    return float(g) if g.ndim == 0 else g


def snr_db_to_linear(db: float) -> float:
    db = _finite("snr_db", db)
    return 10.0 ** (db / 10.0)


def snr_linear_to_db(linear: float) -> float:
    linear = float(linear)
    if not linear > 0 or not math.isfinite(linear):
        raise ValueError(f"linear SNR must be positive and finite, got {linear!r}")
    return 10.0 * math.log10(linear)
