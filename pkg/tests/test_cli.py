import csv
import io
import json
import subprocess
import sys

import pytest

from eepnber import ber
from eepnber.cli import build_parser, fmt, gnuplot_script, main

SUBCOMMANDS = ["budget", "curve", "floor", "required-snr", "mc", "preset"]


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def error_record(err):
    lines = [ln for ln in err.splitlines() if ln.startswith("{")]
    assert len(lines) == 1
    return json.loads(lines[0])


def test_budget_on_preset():
    code, out, err = run("budget", "--preset", "fig2a")
    assert code == 0
    header, values = rows(out)
    assert header == ["var_tx", "var_lo", "var_eepn", "var_cross", "var_total", "sigma_total"]
    assert float(values[4]) == pytest.approx(1.1727798520647998e-3, rel=1e-12)
    assert float(values[3]) == 0.0
    assert err.startswith("# ")


def test_curve_and_floor(tmp_path):
    code, out, _ = run("curve", "--preset", "fig1b", "--snr-from", "10", "--snr-to", "12", "--snr-step", "1")
    assert code == 0
    table = rows(out)
    assert table[0] == ["snr_db", "ber_analytic"]
    assert [r[0] for r in table[1:]] == ["10", "11", "12"]
    bers = [float(r[1]) for r in table[1:]]
    assert bers[0] > bers[1] > bers[2]

    code, out, _ = run("floor", "--preset", "fig1b")
    assert code == 0
    assert float(rows(out)[1][0]) == pytest.approx(5.9062141121094222e-4, rel=1e-12)

    code, out, _ = run("floor", "--preset", "fig1b", "--mode", "as-printed")
    assert float(rows(out)[1][0]) == 0.0


def test_empty_grid_gives_header_only():
    code, out, _ = run("curve", "--preset", "fig2a", "--snr-from", "10", "--snr-to", "5")
    assert code == 0
    assert out == "snr_db,ber_analytic\n"


def test_required_snr_round_trip():
    code, out, _ = run("required-snr", "--preset", "fig2a", "--target", "1e-3")
    assert code == 0
    db = float(rows(out)[1][1])
    _, out, _ = run("curve", "--preset", "fig2a", "--snr-from", str(db), "--snr-to", str(db))
    assert float(rows(out)[1][1]) == pytest.approx(1e-3, rel=1e-3)


def test_preset_fig2b_ordering():
    code, out, _ = run("preset", "fig2b", "--snr-from", "10", "--snr-to", "20", "--snr-step", "5")
    assert code == 0
    table = rows(out)
    assert table[0] == ["label", "snr_db", "ber_analytic", "ber_floor"]
    by_label = {}
    for label, _, value, _ in table[1:]:
        by_label.setdefault(label, []).append(float(value))
    assert list(by_label) == ["rs=14GBd", "rs=28GBd", "rs=56GBd"]
    for a, b, c in zip(*by_label.values()):
        assert a < b < c


def test_below_floor_exit_code():
    code, out, err = run("required-snr", "--preset", "fig1b", "--target", "1e-4")
    assert code == 4
    assert out == ""
    rec = error_record(err)
    assert rec["error"] == "below_floor" and rec["exit_code"] == 4


def test_above_max_exit_code():
    code, _, err = run("required-snr", "--preset", "fig2a", "--target", "0.4")
    assert code == 2
    assert error_record(err)["error"] == "above_max"


def test_non_convergence_exit_code(monkeypatch):
    monkeypatch.setattr(ber, "REFINE_RTOL", 0.0)
    monkeypatch.setattr(ber, "REFINE_ATOL", 0.0)
    code, _, err = run("curve", "--preset", "fig1b", "--snr-from", "12", "--snr-to", "12")
    assert code == 3
    rec = error_record(err)
    assert rec["error"] == "non_convergence"
    assert rec["grid_index"] == 0


def test_validation_exit_code_names_field(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({
        "link": {"dispersion_ps_per_nm_km": 16, "length_km": 2000},
        "lasers": {"tx_linewidth_khz": 100, "lo_linewidth_khz": -100},
        "mod": {"level": 4, "symbol_rate_gbaud": 28},
    }))
    code, out, err = run("budget", "--scenario", str(path))
    assert code == 2 and out == ""
    rec = error_record(err)
    assert rec["error"] == "validation"
    assert rec["field"] == "lasers.lo_linewidth_khz"


def test_missing_source_and_bad_overrides():
    code, _, err = run("budget")
    assert code == 2 and error_record(err)["error"] == "validation"
    code, _, err = run("curve", "--preset", "fig2a", "--snr-step", "0")
    assert code == 2 and error_record(err)["field"] == "snr_step"
    code, _, err = run("mc", "--preset", "fig2a", "--workers", "0")
    assert code == 2 and error_record(err)["field"] == "mc"


@pytest.mark.parametrize("argv", [["--frobnicate"], ["curve", "--preset", "fig2a", "--nope"], ["preset", "fig7"], []])
def test_argument_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


@pytest.mark.parametrize("command", SUBCOMMANDS)
def test_help(command, capsys):
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args([command, "--help"])
    assert info.value.code == 0
    assert "usage" in capsys.readouterr().out


def test_mc_rerun_is_byte_identical():
    argv = ["mc", "--preset", "fig1b", "--snr-from", "8", "--snr-to", "10", "--snr-step", "2",
            "--symbols", "100000", "--seed", "11", "--workers", "1"]
    first = run(*argv)
    second = run(*argv)
    assert first == second
    table = rows(first[1])
    assert table[0] == ["snr_db", "ber_analytic", "ber_mc", "ci_low", "ci_high"]
    for _, analytic, mc, low, high in table[1:]:
        assert float(low) <= float(mc) <= float(high)
        assert float(mc) == pytest.approx(float(analytic), rel=0.25)


def test_formatting_round_trips():
    for x in (0.1, 1 / 3, 1.1727798520647998e-3, 5e-324, 1e300):
        assert float(fmt(x)) == x
    assert fmt(3) == "3" and fmt("a") == "a"


def test_gnuplot_script(tmp_path):
    path = tmp_path / "plot.gp"
    code, _, _ = run("preset", "fig2a", "--snr-from", "0", "--snr-to", "1", "--gnuplot", str(path))
    assert code == 0
    text = path.read_text()
    assert "set logscale y" in text
    assert text.count("strcol(1) eq") == 3
    plain = gnuplot_script((), ("snr_db", "ber_analytic", "ber_mc"))
    assert "using 1:2" in plain and "using 1:3" in plain


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "eepnber.cli", "floor", "--preset", "fig1b"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "ber_floor"
