"""JSON scenario files and the figure presets."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema

from .ber import BerModelConfig
from .core import LaserParams, LinkParams, ModulationSpec
from .montecarlo import McConfig

SCHEMA_VERSION = 1
DEFAULT_GRID = {"from": 0.0, "to": 20.0, "step": 0.5}

PRESET_NAMES = ("fig1a", "fig1b", "fig2a", "fig2b")


class ScenarioError(ValueError):
    """Scenario file failed to parse or validate."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


@dataclass(frozen=True)
class Scenario:
    link: LinkParams
    lasers: LaserParams
    mod: ModulationSpec
    model: BerModelConfig = BerModelConfig()
    snr_grid_db: tuple[float, ...] = ()
    mc: McConfig | None = None
    name: str = ""


def schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("scenario.schema.json").read_text())


def grid_from_range(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive dB grid; values rounded to 10 decimals to keep the CSV stable."""
    if step <= 0:
        raise ValueError(f"SNR step must be > 0, got {step}")
    if stop < start:
        return ()
    n = int(round((stop - start) / step))
    if start + n * step > stop + 1e-9 * step:
        n -= 1
    return tuple(round(start + i * step, 10) for i in range(n + 1))


def _field_name(error: jsonschema.ValidationError) -> str:
    path = list(error.absolute_path)
    if error.validator == "additionalProperties":
        extra = sorted(set(error.instance) - set(error.schema.get("properties", {})))
        path += extra[:1]
    if error.validator == "required":
        path.append(error.message.split("'")[1])
    return ".".join(str(p) for p in path) or "<root>"


def from_dict(doc: dict) -> Scenario:
    validator = jsonschema.Draft202012Validator(schema())
    error = jsonschema.exceptions.best_match(validator.iter_errors(doc))
    if error is not None:
        name = _field_name(error)
        raise ScenarioError(f"{name}: {error.message}", field=name)

    link, lasers, mod = doc["link"], doc["lasers"], doc["mod"]
    section = "link"
    try:
        link_p = LinkParams.from_engineering(
            link.get("wavelength_nm", 1550.0), link["dispersion_ps_per_nm_km"], link["length_km"]
        )
        section = "lasers"
        lasers_p = LaserParams(
            lasers["tx_linewidth_khz"] * 1e3, lasers["lo_linewidth_khz"] * 1e3, lasers.get("rho", 0.0)
        )
        section = "mod"
        mod_p = ModulationSpec(mod["level"], mod["symbol_rate_gbaud"] * 1e9)
        section = "model"
        model = BerModelConfig(**doc.get("model", {}))
        section = "mc"
        mc = McConfig(**doc["mc"]) if "mc" in doc else None
        section = "snr_grid_db"
        grid = doc.get("snr_grid_db", DEFAULT_GRID)
        if isinstance(grid, dict):
            grid = grid_from_range(grid["from"], grid["to"], grid["step"])
        grid = tuple(float(x) for x in grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("grid must be strictly increasing")
    except ValueError as exc:
        raise ScenarioError(f"{section}: {exc}", field=section) from exc
    return Scenario(link_p, lasers_p, mod_p, model, grid, mc, doc.get("name", ""))


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return from_dict(doc)


def preset_path(name: str):
    res = resources.files(__package__).joinpath("presets", f"{name}.json")
    if not res.is_file():
        raise ScenarioError(f"unknown preset {name!r}", field="preset")
    return res


def load_preset(name: str) -> Scenario:
    return from_dict(json.loads(preset_path(name).read_text()))


def _with_lasers(sc: Scenario, tx_hz: float, lo_hz: float) -> Scenario:
    return dataclasses.replace(sc, lasers=LaserParams(tx_hz, lo_hz, sc.lasers.rho))


def _with_mod(sc: Scenario, level: int | None = None, rate: float | None = None) -> Scenario:
    mod = ModulationSpec(level or sc.mod.level, rate or sc.mod.symbol_rate)
    return dataclasses.replace(sc, mod=mod)


def expand_preset(name: str, base: Scenario | None = None) -> list[tuple[str, Scenario]]:
    """Members of a figure sweep as ``(label, scenario)`` pairs.

    fig1a  Tx share of a 200 kHz total in {0, 1/4, 1/2, 3/4, 1}
    fig1b  Tx = LO in {0.1, 1, 2, 5, 10} MHz
    fig2a  m in {4, 8, 16} at 100 kHz
    fig2b  symbol rate in {14, 28, 56} GBd at 5 MHz
    """
    if name not in PRESET_NAMES:
        raise ScenarioError(f"unknown preset {name!r}; expected one of {', '.join(PRESET_NAMES)}", field="preset")
    base = base or load_preset(name)
    if name == "fig1a":
        total = 200e3
        return [
            (f"tx={f * total / 1e3:g}kHz/lo={(1 - f) * total / 1e3:g}kHz", _with_lasers(base, f * total, (1 - f) * total))
            for f in (0.0, 0.25, 0.5, 0.75, 1.0)
        ]
    if name == "fig1b":
        return [(f"tx=lo={lw / 1e6:g}MHz", _with_lasers(base, lw, lw)) for lw in (0.1e6, 1e6, 2e6, 5e6, 10e6)]
    if name == "fig2a":
        return [(f"m={m}", _with_mod(base, level=m)) for m in (4, 8, 16)]
    return [(f"rs={r:g}GBd", _with_mod(base, rate=r * 1e9)) for r in (14, 28, 56)]
