"""Symbol-level Monte Carlo of a differentially detected m-PSK link.

Each symbol carries a Gray-mapped data index ``d_k`` encoded as a phase
step, ``theta_k = theta_{k-1} + 2*pi*d_k/m``.  The carrier phase is a
Wiener walk plus the EEPN phase, AWGN is added, and the receiver slices
``arg(r_k * conj(r_{k-1}))`` to the nearest multiple of ``2*pi/m``.

SNR convention: the complex AWGN sample has total variance
``1 / (2 * snr)`` for unit symbol energy, i.e. ``E_s/N_0 = 2 * snr``.  This
is the scaling under which the analytic erfc(G*sqrt(SNR)) expression is the
high-SNR asymptote of differential detection.

Randomness is drawn per block of ``BLOCK_SYMBOLS`` symbols; block ``b``
uses ``PCG64(SeedSequence(seed, spawn_key=(b,)))``.  Blocks are simulated
in their own phase frame and stitched in block order, so results do not
depend on how many workers ran the blocks.
"""

from __future__ import annotations

import enum
import logging
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import LaserParams, LinkParams, ModulationSpec, NoiseBudget, noise_budget

log = logging.getLogger(__name__)

BLOCK_SYMBOLS = 1 << 20
Z95 = 1.959963984540054


class EepnProcess(str, enum.Enum):
    INCREMENT_MATCHED = "increment_matched"
    IID = "iid"


@dataclass(frozen=True)
class McConfig:
    n_symbols: int = 10_000_000
    seed: int = 0
    eepn_process: EepnProcess = EepnProcess.INCREMENT_MATCHED
    n_workers: int = field(default_factory=lambda: os.cpu_count() or 1)

    def __post_init__(self):
        object.__setattr__(self, "eepn_process", EepnProcess(self.eepn_process))
        n = self.n_symbols
        if isinstance(n, bool) or int(n) != n or n < 2:
            raise ValueError(f"n_symbols must be an integer >= 2, got {n!r}")
        object.__setattr__(self, "n_symbols", int(n))
        if n < 10_000:
            warnings.warn(f"n_symbols={n} < 1e4: confidence intervals are unreliable", stacklevel=3)
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))
        if int(self.n_workers) != self.n_workers or self.n_workers < 1:
            raise ValueError(f"n_workers must be a positive integer, got {self.n_workers!r}")
        object.__setattr__(self, "n_workers", int(self.n_workers))


@dataclass(frozen=True)
class McResult:
    bit_errors: int
    bits_total: int
    symbol_errors: int
    symbols_total: int
    ber_hat: float
    ci95_low: float
    ci95_high: float
    #: empirical variance of the differential carrier-phase error (no AWGN)
    phase_diff_var: float


def wilson_interval(errors: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return 0.0, 1.0
    p = errors / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials))
    low = 0.0 if errors == 0 else max(0.0, centre - half)
    high = 1.0 if errors == trials else min(1.0, centre + half)
    return low, high


def _bits_per_symbol(m: int) -> int:
    return ModulationSpec(m, 1.0).bits_per_symbol


def gray_encode(index: int, m: int) -> tuple[int, ...]:
    """Binary-reflected Gray code of ``index`` as a bit tuple, MSB first."""
    k = _bits_per_symbol(m)
    if int(index) != index or not 0 <= index < m:
        raise ValueError(f"index must lie in [0, {m}), got {index!r}")
    g = int(index) ^ (int(index) >> 1)
    return tuple((g >> (k - 1 - i)) & 1 for i in range(k))


def gray_decode(bits, m: int) -> int:
    k = _bits_per_symbol(m)
    bits = tuple(int(b) for b in bits)
    if len(bits) != k or any(b not in (0, 1) for b in bits):
        raise ValueError(f"expected {k} bits, got {bits!r}")
    g = 0
    for b in bits:
        g = (g << 1) | b
    index, shift = g, g >> 1
    while shift:
        index ^= shift
        shift >>= 1
    return index


def _gray(x: np.ndarray) -> np.ndarray:
    return x ^ (x >> 1)


@dataclass
class _Block:
    bit_errors: int
    symbol_errors: int
    n_diff: int
    inc_sum: float
    inc_sumsq: float
    first_r: complex
    first_data: int
    first_walk: float
    first_iid: float
    last_r: complex
    last_iid: float
    carry: float


def _run_block(block: int, count: int, m: int, snr: float, walk_std: float, iid_std: float, seed: int) -> _Block:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))
    step = 2.0 * np.pi / m
    data = rng.integers(0, m, size=count)
    walk = np.cumsum(rng.standard_normal(count) * walk_std)
    iid = rng.standard_normal(count) * iid_std if iid_std > 0 else np.zeros(count)
    noise = rng.standard_normal((count, 2)) * (0.5 / math.sqrt(snr))

    psi = (np.cumsum(data) % m) * step + walk
    r = np.exp(1j * (psi + iid))
    r.real += noise[:, 0]
    r.imag += noise[:, 1]

    detected = np.rint(np.angle(r[1:] * np.conj(r[:-1])) / step).astype(np.int64) % m
    sent = data[1:]
    bit_errors = int(np.bitwise_count(_gray(detected) ^ _gray(sent)).sum())
    symbol_errors = int(np.count_nonzero(detected != sent))

    inc = np.diff(walk) + np.diff(iid)
    return _Block(
        bit_errors=bit_errors,
        symbol_errors=symbol_errors,
        n_diff=count - 1,
        inc_sum=float(inc.sum()),
        inc_sumsq=float(np.dot(inc, inc)),
        first_r=complex(r[0]),
        first_data=int(data[0]),
        first_walk=float(walk[0]),
        first_iid=float(iid[0]),
        last_r=complex(r[-1]),
        last_iid=float(iid[-1]),
        carry=float(psi[-1]),
    )


def _run_blocks(jobs):
    return [_run_block(*job) for job in jobs]


def _split_contiguous(items, parts):
    size, extra = divmod(len(items), parts)
    out, start = [], 0
    for i in range(parts):
        stop = start + size + (i < extra)
        if stop > start:
            out.append(items[start:stop])
        start = stop
    return out


def _boundary(prev: _Block, cur: _Block, m: int):
    """Detection of the first symbol of ``cur`` against the last of ``prev``."""
    step = 2.0 * np.pi / m
    z = cur.first_r * prev.last_r.conjugate() * complex(math.cos(prev.carry), math.sin(prev.carry))
    detected = int(np.rint(math.atan2(z.imag, z.real) / step)) % m
    diff = (detected ^ (detected >> 1)) ^ (cur.first_data ^ (cur.first_data >> 1))
    inc = cur.first_walk + cur.first_iid - prev.last_iid
    return diff.bit_count(), int(detected != cur.first_data), inc


def simulate(
    link: LinkParams,
    lasers: LaserParams,
    mod: ModulationSpec,
    budget: NoiseBudget | None,
    snr_linear: float,
    mc: McConfig,
) -> McResult:
    """Run the differential receiver Monte Carlo and count bit errors."""
    expected = noise_budget(link, lasers, mod)
    if budget is None:
        budget = expected
    elif not all(
        math.isclose(getattr(budget, f), getattr(expected, f), rel_tol=1e-12, abs_tol=1e-300)
        for f in ("var_tx", "var_lo", "var_eepn", "var_cross", "var_total")
    ):
        raise ValueError("noise budget is inconsistent with the link/laser/modulation parameters")
    snr_linear = float(snr_linear)
    if not (snr_linear > 0 and math.isfinite(snr_linear)):
        raise ValueError(f"snr_linear must be positive and finite, got {snr_linear!r}")

    m = mod.level
    if mc.eepn_process is EepnProcess.INCREMENT_MATCHED:
        walk_std, iid_std = math.sqrt(budget.var_total), 0.0
    else:
        if lasers.rho != 0:
            raise ValueError("the iid EEPN process cannot carry a nonzero rho correlation")
        walk_std, iid_std = math.sqrt(budget.var_tx + budget.var_lo), math.sqrt(budget.var_eepn)

    n_blocks = -(-mc.n_symbols // BLOCK_SYMBOLS)
    jobs = []
    for b in range(n_blocks):
        count = min(BLOCK_SYMBOLS, mc.n_symbols - b * BLOCK_SYMBOLS)
        jobs.append((b, count, m, snr_linear, walk_std, iid_std, mc.seed))

    workers = min(mc.n_workers, n_blocks)
    log.info("mc: %d symbols in %d blocks on %d worker(s)", mc.n_symbols, n_blocks, workers)
    if workers == 1:
        blocks = _run_blocks(jobs)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = [blk for part in pool.map(_run_blocks, _split_contiguous(jobs, workers)) for blk in part]

    bit_errors = sum(b.bit_errors for b in blocks)
    symbol_errors = sum(b.symbol_errors for b in blocks)
    n_diff = sum(b.n_diff for b in blocks)
    inc_sum = sum(b.inc_sum for b in blocks)
    inc_sumsq = sum(b.inc_sumsq for b in blocks)
    for prev, cur in zip(blocks, blocks[1:]):
        be, se, inc = _boundary(prev, cur, m)
        bit_errors += be
        symbol_errors += se
        n_diff += 1
        inc_sum += inc
        inc_sumsq += inc * inc

    bits_total = n_diff * mod.bits_per_symbol
    low, high = wilson_interval(bit_errors, bits_total)
    mean = inc_sum / n_diff
    return McResult(
        bit_errors=bit_errors,
        bits_total=bits_total,
        symbol_errors=symbol_errors,
        symbols_total=n_diff,
        ber_hat=bit_errors / bits_total,
        ci95_low=low,
        ci95_high=high,
        phase_diff_var=inc_sumsq / n_diff - mean * mean,
    )
