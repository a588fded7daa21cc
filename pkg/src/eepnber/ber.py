"""Analytical BER of differential m-PSK with equalization-enhanced phase noise.

The phase-noise offset ``eps`` is Gaussian with standard deviation
``s = m * sigma / 4`` (the spread implied by the weight
``exp(-8 eps^2 / (m^2 sigma^2))``).  Two readings of the BER integral are
available:

``as_printed``
    the erfc term does not depend on ``eps``; the integral collapses to
    ``erfc(G sqrt(SNR)) / log2(m)`` for any sigma.
``offset_folded``
    ``eps`` shifts the angular decision margin, ``pi/m -> pi/m +/- eps``,
    and the two shifted erfc terms are averaged.  This is the reading that
    produces phase-noise BER floors.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .core import ModulationSpec, NoiseBudget, decision_margin, folded_margin, snr_db_to_linear

#: relative tolerance between successive quadrature refinements
REFINE_RTOL = 1e-9
#: BER values below this are compared on an absolute scale
REFINE_ATOL = 1e-9 * 1e-12
MAX_DOUBLINGS = 2

#: below this sigma the eps spread is far under any erfc scale; use the closed form
TINY_SIGMA = 1e-100

SNR_LOW_DB = -10.0
SNR_HIGH_DB = 60.0


class BerMode(str, enum.Enum):
    AS_PRINTED = "as_printed"
    OFFSET_FOLDED = "offset_folded"


class SnrConvention(str, enum.Enum):
    PER_SYMBOL = "per_symbol"
    PER_BIT = "per_bit"


class QuadratureError(ArithmeticError):
    """Quadrature did not settle after the allowed refinements."""


class BelowFloorError(ValueError):
    """Requested BER is at or below the phase-noise floor."""


class AboveMaxError(ValueError):
    """Requested BER is above what the lowest SNR in the bracket delivers."""


@dataclass(frozen=True)
class BerModelConfig:
    mode: BerMode = BerMode.OFFSET_FOLDED
    quadrature_halfwidth: float = 10.0
    quadrature_points: int = 4001
    snr_convention: SnrConvention = SnrConvention.PER_SYMBOL

    def __post_init__(self):
        object.__setattr__(self, "mode", BerMode(self.mode))
        object.__setattr__(self, "snr_convention", SnrConvention(self.snr_convention))
        n = self.quadrature_points
        if isinstance(n, bool) or int(n) != n or n < 101 or n % 2 == 0:
            raise ValueError(f"quadrature_points must be an odd integer >= 101, got {n!r}")
        object.__setattr__(self, "quadrature_points", int(n))
        h = float(self.quadrature_halfwidth)
        if not math.isfinite(h) or h < 6:
            raise ValueError(f"quadrature_halfwidth must be >= 6, got {h!r}")
        object.__setattr__(self, "quadrature_halfwidth", h)


DEFAULT_CONFIG = BerModelConfig()


@dataclass(frozen=True)
class BerPoint:
    snr_linear: float
    ber: float
    mode: str

    def __post_init__(self):
        if not 0.0 <= self.ber <= 1.0:
            raise ValueError(f"ber must lie in [0, 1], got {self.ber}")
        if not self.snr_linear >= 0:
            raise ValueError(f"snr_linear must be >= 0, got {self.snr_linear}")


@dataclass(frozen=True)
class BerCurve:
    snr_db: tuple[float, ...]
    points: tuple[BerPoint, ...]

    def __len__(self):
        return len(self.points)

    @property
    def ber(self) -> np.ndarray:
        return np.array([p.ber for p in self.points], dtype=float)


def erfc(x):
    """Complementary error function.

    Negative arguments are reflected, ``erfc(-x) = 2 - erfc(x)``, so the
    symmetry holds by construction.
    """
    x = np.asarray(x, dtype=float)
    y = special.erfc(np.abs(x))
    y = np.where(x < 0, 2.0 - y, y)
    return float(y) if y.ndim == 0 else y


def _bits(m: int) -> int:
    return ModulationSpec(m, 1.0).bits_per_symbol


def offset_std(m: int, sigma_total: float) -> float:
    """Standard deviation of the phase offset eps, m*sigma/4."""
    return m * sigma_total / 4.0


def prefactor(m: int, sigma_total: float) -> float:
    return 4.0 / (math.sqrt(2.0 * math.pi) * m * sigma_total * _bits(m))


def weight(eps, m: int, sigma_total: float):
    return np.exp(-8.0 * np.square(np.asarray(eps) / (m * sigma_total)))


def ber_integrand(eps, snr_linear: float, m: int, sigma_total: float, mode=BerMode.OFFSET_FOLDED):
    """Integrand of the BER integral at phase offset ``eps`` (scalar or array)."""
    if not sigma_total > 0:
        raise ValueError(f"sigma_total must be > 0, got {sigma_total!r}")
    mode = BerMode(mode)
    eps = np.asarray(eps, dtype=float)
    root_snr = math.sqrt(snr_linear)
    if mode is BerMode.AS_PRINTED:
        tail = erfc(decision_margin(m) * root_snr)
    else:
        base = math.pi / m
        tail = 0.5 * (
            erfc(folded_margin(base + eps) * root_snr) + erfc(folded_margin(base - eps) * root_snr)
        )
    out = prefactor(m, sigma_total) * weight(eps, m, sigma_total) * tail
    return float(out) if np.ndim(out) == 0 else out


def simpson(values: np.ndarray, step: float) -> float:
    """Composite Simpson rule on an odd number of equally spaced samples."""
    n = values.size
    if n < 3 or n % 2 == 0:
        raise ValueError("Simpson's rule needs an odd number (>= 3) of samples")
    total = values[0] + values[-1] + 4.0 * values[1:-1:2].sum() + 2.0 * values[2:-1:2].sum()
    return float(total * step / 3.0)


def _panels(halfwidth: float, breakpoints: Sequence[float]) -> list[float]:
    inner = sorted({b for b in breakpoints if -halfwidth < b < halfwidth})
    return [-halfwidth, *inner, halfwidth]


def _piecewise_simpson(func: Callable, edges: Sequence[float], intervals: int) -> float:
    """Composite Simpson on each panel between ``edges``.

    Panels get intervals in proportion to their length, but never fewer
    than ``intervals // 8`` so narrow panels around sharp features are
    resolved.
    """
    span = edges[-1] - edges[0]
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        k = max(intervals * (b - a) / span, intervals / 8)
        k = 2 * max(1, math.ceil(k / 2))
        eps = np.linspace(a, b, k + 1)
        total += simpson(np.asarray(func(eps), dtype=float), eps[1] - eps[0])
    return total


def integrate(
    func: Callable,
    m: int,
    sigma_total: float,
    cfg: BerModelConfig = DEFAULT_CONFIG,
    breakpoints: Sequence[float] = (),
) -> float:
    """Integrate ``func(eps)`` over +/- H standard deviations of eps.

    ``breakpoints`` mark kinks or steep transitions of the integrand; they
    become panel edges.  The node count is doubled until two successive
    estimates agree to ``REFINE_RTOL`` (at most ``MAX_DOUBLINGS`` extra
    doublings).
    """
    edges = _panels(cfg.quadrature_halfwidth * offset_std(m, sigma_total), breakpoints)
    intervals = cfg.quadrature_points - 1
    coarse = _piecewise_simpson(func, edges, intervals)
    for _ in range(MAX_DOUBLINGS + 1):
        intervals *= 2
        fine = _piecewise_simpson(func, edges, intervals)
        if abs(fine - coarse) <= max(REFINE_RTOL * abs(fine), REFINE_ATOL):
            return fine
        previous, coarse = coarse, fine
    raise QuadratureError(
        f"quadrature did not converge for m={m}, sigma={sigma_total:.6g} "
        f"(last two estimates {previous!r}, {fine!r})"
    )


def folded_breakpoints(snr: float, m: int) -> list[float]:
    """Clamp kinks of the folded margins and the edges of their erfc steps."""
    base = math.pi / m
    points = []
    for c in (math.pi / 2 - base, math.pi / 2 + base):
        points += [c, -c]
    if snr > 0:
        width = 10.0 / math.sqrt(snr)
        for c in (base - width, base + width):
            points += [c, -c]
    return points


def _symbol_snr(snr_linear: float, m: int, cfg: BerModelConfig) -> float:
    if cfg.snr_convention is SnrConvention.PER_BIT:
        return snr_linear * _bits(m)
    return snr_linear


def ber_mpsk(
    snr_linear: float, m: int, sigma_total: float, cfg: BerModelConfig = DEFAULT_CONFIG
) -> BerPoint:
    """Analytical BER at one SNR (linear) for total phase-noise std ``sigma_total``."""
    snr_linear = float(snr_linear)
    if not (snr_linear >= 0 and math.isfinite(snr_linear)):
        raise ValueError(f"snr_linear must be finite and >= 0, got {snr_linear!r}")
    if not (sigma_total >= 0 and math.isfinite(sigma_total)):
        raise ValueError(f"sigma_total must be finite and >= 0, got {sigma_total!r}")
    snr = _symbol_snr(snr_linear, m, cfg)
    if sigma_total < TINY_SIGMA:
        ber = erfc(decision_margin(m) * math.sqrt(snr)) / _bits(m)
    else:
        breaks = folded_breakpoints(snr, m) if cfg.mode is BerMode.OFFSET_FOLDED else ()
        ber = integrate(
            lambda e: ber_integrand(e, snr, m, sigma_total, cfg.mode), m, sigma_total, cfg, breaks
        )
    return BerPoint(snr_linear, min(max(ber, 0.0), 1.0), cfg.mode.value)


def ber_floor(m: int, sigma_total: float, cfg: BerModelConfig = DEFAULT_CONFIG) -> float:
    """High-SNR limit of :func:`ber_mpsk`.

    With the folded reading this is ``P(|eps| > pi/m) / log2(m)``.  The
    as-printed reading has no floor, so 0 is returned for it.
    """
    if not (sigma_total >= 0 and math.isfinite(sigma_total)):
        raise ValueError(f"sigma_total must be finite and >= 0, got {sigma_total!r}")
    if sigma_total == 0 or cfg.mode is BerMode.AS_PRINTED:
        return 0.0
    return erfc(2.0 * math.sqrt(2.0) * math.pi / (m * m * sigma_total)) / _bits(m)


def required_snr(
    target_ber: float,
    m: int,
    sigma_total: float,
    cfg: BerModelConfig = DEFAULT_CONFIG,
    rtol: float = 1e-6,
    max_iter: int = 80,
) -> float:
    """SNR in dB at which the analytical BER equals ``target_ber``.

    Bisection in dB over [-10, 60].  Returns ``-inf`` when the target is the
    zero-SNR BER itself.
    """
    target_ber = float(target_ber)
    if not 0.0 < target_ber < 1.0:
        raise ValueError(f"target_ber must lie in (0, 1), got {target_ber!r}")
    floor = ber_floor(m, sigma_total, cfg)
    if target_ber <= floor:
        raise BelowFloorError(f"target BER {target_ber:.3e} is at or below the floor {floor:.3e}")

    def ber_at(db):
        return ber_mpsk(snr_db_to_linear(db), m, sigma_total, cfg).ber

    if abs(target_ber - ber_mpsk(0.0, m, sigma_total, cfg).ber) <= rtol * target_ber:
        return -math.inf
    lo, hi = SNR_LOW_DB, SNR_HIGH_DB
    if target_ber >= ber_at(lo):
        raise AboveMaxError(f"target BER {target_ber:.3e} is not reached even at {lo} dB")
    if target_ber < ber_at(hi):
        raise BelowFloorError(f"target BER {target_ber:.3e} is not reached below {hi} dB")
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        ber = ber_at(mid)
        if abs(ber - target_ber) <= rtol * target_ber:
            break
        if ber > target_ber:
            lo = mid
        else:
            hi = mid
    return mid


def ber_curve(
    snr_grid_db: Sequence[float],
    m: int,
    budget: NoiseBudget,
    cfg: BerModelConfig = DEFAULT_CONFIG,
) -> BerCurve:
    grid = tuple(float(x) for x in snr_grid_db)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("SNR grid must be strictly increasing")
    sigma = budget.sigma_total
    points = []
    for i, db in enumerate(grid):
        try:
            points.append(ber_mpsk(snr_db_to_linear(db), m, sigma, cfg))
        except Exception as exc:
            exc.grid_index = i
            exc.args = (f"grid index {i} ({db} dB): {exc}",) + exc.args[1:]
            raise
    return BerCurve(grid, tuple(points))
