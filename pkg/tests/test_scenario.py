import json

import pytest

from eepnber.ber import BerMode
from eepnber.core import noise_budget
from eepnber.montecarlo import McConfig
from eepnber.scenario import (
    PRESET_NAMES,
    ScenarioError,
    expand_preset,
    from_dict,
    grid_from_range,
    load_preset,
    load_scenario,
)

MINIMAL = {
    "link": {"dispersion_ps_per_nm_km": 16, "length_km": 2000},
    "lasers": {"tx_linewidth_khz": 100, "lo_linewidth_khz": 100},
    "mod": {"level": 4, "symbol_rate_gbaud": 28},
}


def _doc(**sections):
    doc = json.loads(json.dumps(MINIMAL))
    for key, value in sections.items():
        if isinstance(value, dict) and key in doc:
            doc[key].update(value)
        else:
            doc[key] = value
    return doc


def test_minimal_document_gets_defaults():
    sc = from_dict(MINIMAL)
    assert sc.link.wavelength == pytest.approx(1550e-9)
    assert sc.lasers.rho == 0.0
    assert sc.model.mode is BerMode.OFFSET_FOLDED
    assert sc.snr_grid_db[0] == 0.0 and sc.snr_grid_db[-1] == 20.0 and len(sc.snr_grid_db) == 41
    assert sc.mc is None


def test_full_document(tmp_path):
    doc = _doc(
        name="x",
        schema_version=1,
        model={"mode": "as_printed", "quadrature_points": 2001},
        snr_grid_db=[0, 5, 10],
        mc={"n_symbols": 10000, "seed": 7, "n_workers": 1},
    )
    path = tmp_path / "s.json"
    path.write_text(json.dumps(doc))
    sc = load_scenario(path)
    assert sc.name == "x"
    assert sc.model.mode is BerMode.AS_PRINTED and sc.model.quadrature_points == 2001
    assert sc.snr_grid_db == (0.0, 5.0, 10.0)
    assert sc.mc == McConfig(n_symbols=10000, seed=7, n_workers=1)


@pytest.mark.parametrize(
    "doc, field",
    [
        (_doc(lasers={"lo_linewidth_khz": -5}), "lasers.lo_linewidth_khz"),
        (_doc(lasers={"rho": 2}), "lasers.rho"),
        (_doc(mod={"level": 6}), "mod"),
        (_doc(mod={"level": 2}), "mod.level"),
        (_doc(link={"fiber": "smf"}), "link.fiber"),
        (_doc(extra=1), "extra"),
        ({k: v for k, v in MINIMAL.items() if k != "lasers"}, "lasers"),
        (_doc(model={"quadrature_points": 1000}), "model"),
        (_doc(snr_grid_db=[0, 5, 5]), "snr_grid_db"),
        (_doc(mc={"seed": -1}), "mc.seed"),
        (_doc(schema_version=2), "schema_version"),
    ],
)
def test_invalid_documents_name_the_field(doc, field):
    with pytest.raises(ScenarioError) as info:
        from_dict(doc)
    assert info.value.field == field
    assert field.split(".")[-1] in str(info.value)


def test_negative_linewidth_message():
    with pytest.raises(ScenarioError, match="lo_linewidth"):
        from_dict(_doc(lasers={"lo_linewidth_khz": -1}))


def test_parse_error_reports_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "link": {\n    "length_km": 2000,\n  }\n}\n')
    with pytest.raises(ScenarioError, match=r"line 4, column 3"):
        load_scenario(path)
    with pytest.raises(ScenarioError, match="cannot read"):
        load_scenario(tmp_path / "missing.json")


@pytest.mark.parametrize(
    "args, expected",
    [
        ((0, 20, 0.5), 41),
        ((0, 1, 0.3), 4),
        ((0, 0, 1), 1),
        ((5, 0, 1), 0),
        ((-10, 60, 10), 8),
    ],
)
def test_grid_from_range(args, expected):
    grid = grid_from_range(*args)
    assert len(grid) == expected
    if grid:
        assert grid[0] == args[0] and grid[-1] <= args[1]


def test_grid_rejects_step():
    with pytest.raises(ValueError):
        grid_from_range(0, 1, 0)


@pytest.mark.parametrize("name", PRESET_NAMES + ("fig2a_d16psk",))
def test_presets_load(name):
    sc = load_preset(name)
    assert sc.link.length == 2e6
    assert sc.link.dispersion_coeff == pytest.approx(16e-6)


def test_d16psk_preset_eepn():
    sc = load_preset("fig2a_d16psk")
    b = noise_budget(sc.link, sc.lasers, sc.mod)
    assert sc.mod.level == 16
    assert b.var_eepn == pytest.approx(1.128e-3, rel=1e-3)


def test_unknown_preset():
    with pytest.raises(ScenarioError):
        load_preset("fig9")
    with pytest.raises(ScenarioError):
        expand_preset("fig9")


def test_preset_sweeps():
    fig1a = expand_preset("fig1a")
    assert [(s.lasers.tx_linewidth, s.lasers.lo_linewidth) for _, s in fig1a] == [
        (0.0, 200e3), (50e3, 150e3), (100e3, 100e3), (150e3, 50e3), (200e3, 0.0)
    ]
    assert [s.lasers.tx_linewidth for _, s in expand_preset("fig1b")] == [0.1e6, 1e6, 2e6, 5e6, 10e6]
    assert [s.mod.level for _, s in expand_preset("fig2a")] == [4, 8, 16]
    assert [s.mod.symbol_rate for _, s in expand_preset("fig2b")] == [14e9, 28e9, 56e9]
    labels = [label for label, _ in expand_preset("fig2b")]
    assert labels == ["rs=14GBd", "rs=28GBd", "rs=56GBd"]


def test_fig1a_total_shifts_towards_lo():
    totals = [noise_budget(s.link, s.lasers, s.mod).var_total for _, s in expand_preset("fig1a")]
    # moving linewidth from the LO to the transmitter removes EEPN
    assert all(a > b for a, b in zip(totals, totals[1:]))
