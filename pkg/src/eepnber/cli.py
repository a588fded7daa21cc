"""Command-line front end: CSV on stdout, summaries on stderr.

Exit codes: 0 ok, 2 validation, 3 quadrature non-convergence, 4 target BER
below the phase-noise floor.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import math
import sys
from pathlib import Path

from . import ber as ber_mod
from .ber import AboveMaxError, BelowFloorError, BerMode, QuadratureError
from .core import noise_budget, snr_db_to_linear
from .montecarlo import McConfig, simulate
from .scenario import (
    DEFAULT_GRID,
    PRESET_NAMES,
    Scenario,
    ScenarioError,
    expand_preset,
    grid_from_range,
    load_preset,
    load_scenario,
)

EXIT_OK, EXIT_VALIDATION, EXIT_QUADRATURE, EXIT_BELOW_FLOOR = 0, 2, 3, 4


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


class _CsvOut:
    def __init__(self, stream, header):
        self._w = csv.writer(stream, lineterminator="\n")
        self._w.writerow(header)

    def row(self, *values):
        self._w.writerow([fmt(v) for v in values])


def _source_options(p: argparse.ArgumentParser):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--scenario", metavar="PATH", help="JSON scenario file")
    src.add_argument("--preset", metavar="NAME", help="bundled scenario, e.g. fig2a or fig2a_d16psk")


def _model_options(p: argparse.ArgumentParser):
    p.add_argument("--mode", choices=["as-printed", "offset-folded"], help="BER integral reading")


def _grid_options(p: argparse.ArgumentParser):
    p.add_argument("--snr-from", type=float, metavar="DB")
    p.add_argument("--snr-to", type=float, metavar="DB")
    p.add_argument("--snr-step", type=float, metavar="DB")


def _mc_options(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, help="64-bit RNG seed")
    p.add_argument("--symbols", type=int, help="symbols per SNR point")
    p.add_argument("--workers", type=int, help="worker processes")


def _gnuplot_option(p: argparse.ArgumentParser):
    p.add_argument("--gnuplot", metavar="PATH", help="also write a gnuplot script for the emitted CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eepn-ber",
        description="BER vs SNR of differential m-PSK links with equalization-enhanced phase noise.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="progress logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("budget", help="phase-noise variance decomposition")
    _source_options(p)

    p = sub.add_parser("curve", help="analytical BER curve")
    _source_options(p)
    _model_options(p)
    _grid_options(p)
    _gnuplot_option(p)

    p = sub.add_parser("floor", help="BER floor (SNR -> infinity)")
    _source_options(p)
    _model_options(p)

    p = sub.add_parser("required-snr", help="SNR in dB reaching a target BER")
    _source_options(p)
    _model_options(p)
    p.add_argument("--target", type=float, required=True, metavar="BER")

    p = sub.add_parser("mc", help="analytical curve plus Monte Carlo columns")
    _source_options(p)
    _model_options(p)
    _grid_options(p)
    _mc_options(p)
    _gnuplot_option(p)

    p = sub.add_parser("preset", help="one labelled curve per member of a figure sweep")
    p.add_argument("name", choices=PRESET_NAMES)
    _model_options(p)
    _grid_options(p)
    _gnuplot_option(p)
    return parser


def _scenario(args) -> Scenario:
    if getattr(args, "scenario", None):
        sc = load_scenario(args.scenario)
    elif getattr(args, "preset", None):
        sc = load_preset(args.preset)
    else:
        raise ScenarioError("one of --scenario or --preset is required")
    return _apply_overrides(sc, args)


def _apply_overrides(sc: Scenario, args) -> Scenario:
    changes = {}
    if getattr(args, "mode", None):
        changes["model"] = dataclasses.replace(sc.model, mode=BerMode(args.mode.replace("-", "_")))
    if any(getattr(args, k, None) is not None for k in ("snr_from", "snr_to", "snr_step")):
        start = args.snr_from if args.snr_from is not None else DEFAULT_GRID["from"]
        stop = args.snr_to if args.snr_to is not None else DEFAULT_GRID["to"]
        step = args.snr_step if args.snr_step is not None else DEFAULT_GRID["step"]
        try:
            changes["snr_grid_db"] = grid_from_range(start, stop, step)
        except ValueError as exc:
            raise ScenarioError(str(exc), field="snr_step") from exc
    mc_flags = {
        "seed": getattr(args, "seed", None),
        "n_symbols": getattr(args, "symbols", None),
        "n_workers": getattr(args, "workers", None),
    }
    if any(v is not None for v in mc_flags.values()):
        try:
            changes["mc"] = dataclasses.replace(sc.mc or McConfig(), **{k: v for k, v in mc_flags.items() if v is not None})
        except ValueError as exc:
            raise ScenarioError(f"mc: {exc}", field="mc") from exc
    return dataclasses.replace(sc, **changes) if changes else sc


def _summary(sc: Scenario, err):
    b = noise_budget(sc.link, sc.lasers, sc.mod)
    print(
        f"# {sc.name or 'scenario'}: m={sc.mod.level}, Rs={sc.mod.symbol_rate / 1e9:g} GBd, "
        f"L={sc.link.length / 1e3:g} km, tx={sc.lasers.tx_linewidth:g} Hz, lo={sc.lasers.lo_linewidth:g} Hz, "
        f"var_eepn={b.var_eepn:.4e}, var_total={b.var_total:.4e} rad^2, mode={sc.model.mode.value}",
        file=err,
    )
    return b


def gnuplot_script(labels, columns=("snr_db", "ber_analytic")) -> str:
    """Script for ``gnuplot -c script.gp data.csv``."""
    lines = [
        "# usage: gnuplot -persist -c this_script.gp data.csv",
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set logscale y",
        "set format y '10^{%L}'",
        "set xlabel 'SNR (dB)'",
        "set ylabel 'BER'",
        "set grid",
    ]
    if labels:
        x, y = 2, 3
        plots = [f"ARG1 using {x}:(strcol(1) eq '{lab}' ? ${y} : NaN) with lines title '{lab}'" for lab in labels]
    else:
        plots = [f"ARG1 using 1:{i + 2} with linespoints title '{c}'" for i, c in enumerate(columns[1:])]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def _write_gnuplot(args, labels=(), columns=("snr_db", "ber_analytic")):
    if getattr(args, "gnuplot", None):
        Path(args.gnuplot).write_text(gnuplot_script(labels, columns))


def cmd_budget(args, out, err):
    sc = _scenario(args)
    b = _summary(sc, err)
    w = _CsvOut(out, ["var_tx", "var_lo", "var_eepn", "var_cross", "var_total", "sigma_total"])
    w.row(b.var_tx, b.var_lo, b.var_eepn, b.var_cross, b.var_total, b.sigma_total)


def cmd_curve(args, out, err):
    sc = _scenario(args)
    b = _summary(sc, err)
    curve = ber_mod.ber_curve(sc.snr_grid_db, sc.mod.level, b, sc.model)
    w = _CsvOut(out, ["snr_db", "ber_analytic"])
    for db, p in zip(curve.snr_db, curve.points):
        w.row(db, p.ber)
    _write_gnuplot(args)


def cmd_floor(args, out, err):
    sc = _scenario(args)
    b = _summary(sc, err)
    w = _CsvOut(out, ["ber_floor"])
    w.row(ber_mod.ber_floor(sc.mod.level, b.sigma_total, sc.model))


def cmd_required_snr(args, out, err):
    sc = _scenario(args)
    b = _summary(sc, err)
    db = ber_mod.required_snr(args.target, sc.mod.level, b.sigma_total, sc.model)
    w = _CsvOut(out, ["target_ber", "required_snr_db"])
    w.row(args.target, "-inf" if db == -math.inf else db)


def cmd_mc(args, out, err):
    sc = _scenario(args)
    b = _summary(sc, err)
    mc = sc.mc or McConfig()
    curve = ber_mod.ber_curve(sc.snr_grid_db, sc.mod.level, b, sc.model)
    cols = ["snr_db", "ber_analytic", "ber_mc", "ci_low", "ci_high"]
    w = _CsvOut(out, cols)
    for db, p in zip(curve.snr_db, curve.points):
        r = simulate(sc.link, sc.lasers, sc.mod, b, snr_db_to_linear(db), mc)
        print(f"# mc {db:g} dB: {r.bit_errors}/{r.bits_total} bit errors", file=err)
        w.row(db, p.ber, r.ber_hat, r.ci95_low, r.ci95_high)
    _write_gnuplot(args, columns=cols[:3])


def cmd_preset(args, out, err):
    base = _apply_overrides(load_preset(args.name), args)
    members = expand_preset(args.name, base)
    w = _CsvOut(out, ["label", "snr_db", "ber_analytic", "ber_floor"])
    for label, sc in members:
        b = noise_budget(sc.link, sc.lasers, sc.mod)
        floor = ber_mod.ber_floor(sc.mod.level, b.sigma_total, sc.model)
        print(f"# {args.name} {label}: var_total={b.var_total:.4e} rad^2, floor={floor:.3e}", file=err)
        curve = ber_mod.ber_curve(sc.snr_grid_db, sc.mod.level, b, sc.model)
        for db, p in zip(curve.snr_db, curve.points):
            w.row(label, db, p.ber, floor)
    _write_gnuplot(args, labels=[label for label, _ in members])


COMMANDS = {
    "budget": cmd_budget,
    "curve": cmd_curve,
    "floor": cmd_floor,
    "required-snr": cmd_required_snr,
    "mc": cmd_mc,
    "preset": cmd_preset,
}


def _fail(err, kind: str, code: int, exc: BaseException) -> int:
    record = {"error": kind, "exit_code": code, "message": str(exc)}
    if getattr(exc, "field", None):
        record["field"] = exc.field
    if getattr(exc, "grid_index", None) is not None:
        record["grid_index"] = exc.grid_index
    print(json.dumps(record, sort_keys=True), file=err)
    return code


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=err, format="# %(message)s")
    try:
        COMMANDS[args.command](args, out, err)
    except BelowFloorError as exc:
        return _fail(err, "below_floor", EXIT_BELOW_FLOOR, exc)
    except QuadratureError as exc:
        return _fail(err, "non_convergence", EXIT_QUADRATURE, exc)
    except AboveMaxError as exc:
        return _fail(err, "above_max", EXIT_VALIDATION, exc)
    except ValueError as exc:
        return _fail(err, "validation", EXIT_VALIDATION, exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
