import json
from pathlib import Path

import numpy as np
import pytest

from polent.errors import ConfigError
from polent.harness import cli
from polent.harness.config import parse_config
from polent.harness.results import COLUMNS, ResultTable, Row, variance_row
from polent.harness.scenarios import run_scenario, run_sweep

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

BASE = """\
schema_version: 1
scenario: entangle_sq_basis
source_a: {v_sq_db: -4.2, v_asq_db: 19.7, theta_sq_deg: 4.5}
source_b: {v_sq_db: -4.0, v_asq_db: 19.6, theta_sq_deg: 4.5}
beam_splitter: {t: 0.5}
"""


def _run(*argv):
    return cli.main([str(a) for a in argv])


def _table(path):
    return ResultTable.from_json(Path(path).read_text())


# configuration

def test_base_config_parses():
    cfg = parse_config(BASE)
    a, b = cfg.sources
    assert a.v_sq == pytest.approx(10 ** -0.42)
    assert cfg.splitter.t == 0.5
    assert cfg.stem == "entangle_sq_basis"


def test_unknown_key_reports_line():
    text = BASE + "beam_spliter: {t: 0.5}\n"
    with pytest.raises(ConfigError) as info:
        parse_config(text, "cfg.yaml")
    assert "cfg.yaml:6" in str(info.value)
    assert "beam_spliter" in str(info.value)


def test_nested_unknown_key_reports_line():
    text = BASE.replace("beam_splitter: {t: 0.5}", "beam_splitter:\n  t: 0.5\n  phase: 1.0")
    with pytest.raises(ConfigError) as info:
        parse_config(text, "cfg.yaml")
    assert "cfg.yaml:7: beam_splitter.phase" in str(info.value)


@pytest.mark.parametrize("source", [
    "{v_sq: 0.38, v_sq_db: -4.2, v_asq_db: 19.7}",
    "{v_asq_db: 19.7}",
])
def test_linear_and_db_are_exclusive(source):
    text = BASE.replace("{v_sq_db: -4.2, v_asq_db: 19.7, theta_sq_deg: 4.5}", source)
    with pytest.raises(ConfigError):
        parse_config(text)


@pytest.mark.parametrize("edit", [
    ("schema_version: 1", "schema_version: 2"),
    ("scenario: entangle_sq_basis", "scenario: teleport"),
    ("{t: 0.5}", "{t: 1.5}"),
])
def test_invalid_values_rejected(edit):
    with pytest.raises(ConfigError):
        parse_config(BASE.replace(*edit))


def test_sweep_scenario_needs_sweep_section():
    with pytest.raises(ConfigError):
        parse_config(BASE.replace("entangle_sq_basis", "sweep"))


def test_config_hash_is_stable():
    assert parse_config(BASE).config_hash() == parse_config(BASE + "\n# comment\n").config_hash()
    assert parse_config(BASE).config_hash() != parse_config(BASE.replace("0.5}", "0.52}")).config_hash()


def test_cli_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text(BASE + "extra: 1\n")
    assert _run("run", bad, "--outdir", tmp_path) == cli.EXIT_CONFIG
    assert f"{bad}:6" in capsys.readouterr().err


def test_cli_missing_file(tmp_path):
    assert _run("run", tmp_path / "nope.yaml") == cli.EXIT_CONFIG


# results encoding

def test_row_rejects_unknown_provenance():
    with pytest.raises(ValueError):
        Row("x", 1.0, provenance="guess")


def test_csv_layout():
    table = ResultTable({"scenario": "demo"}, [variance_row("v", 0.5), Row("flag", 1.0)])
    lines = table.to_csv().splitlines()
    assert lines[0] == "# scenario=demo"
    assert lines[1] == ",".join(COLUMNS)
    assert lines[2].startswith("v,,0.5,-3.01029995663981")
    assert lines[3] == "flag,,1.0,,derived,"


def test_json_round_trip():
    table = ResultTable({"k": 1}, [variance_row("v", 0.1 + 0.2, axis_value=0.25)])
    back = ResultTable.from_json(table.to_json())
    assert back.rows == table.rows and back.metadata == table.metadata


# scenarios

def test_sq_basis_scenario(tmp_path):
    assert _run("run", CONFIGS / "entangle_sq_basis.yaml", "--outdir", tmp_path) == cli.EXIT_OK
    table = _table(tmp_path / "entangle_sq_basis.json")
    row = table.get("sum correlation (sq)")
    assert row.linear == pytest.approx(0.389148, abs=1e-6)
    assert row.db == pytest.approx(-4.10, abs=0.005)
    assert row.provenance == "paper-reproduction"
    assert table.get("inferred |T-R|").linear == pytest.approx(0.042, abs=0.003)
    assert table.get("output variance C(sq)").db == pytest.approx(16.658, abs=1e-3)


def test_asymmetric_splitter_scenario(tmp_path):
    assert _run("run", CONFIGS / "entangle_sq_basis_asym.yaml", "--outdir", tmp_path) == cli.EXIT_OK
    table = _table(tmp_path / "entangle_sq_basis_asym.json")
    assert table.get("difference correlation (asq)").linear == pytest.approx(0.55, abs=0.002)
    assert table.get("product root (sq basis)").linear == pytest.approx(0.463, abs=1e-3)


def test_opt_basis_scenario(tmp_path):
    assert _run("run", CONFIGS / "entangle_opt_basis.yaml", "--outdir", tmp_path) == cli.EXIT_OK
    table = _table(tmp_path / "entangle_opt_basis.json")
    assert table.get("opt correlation (k)").linear == pytest.approx(0.380189, abs=1e-6)
    assert table.get("opt correlation (l)").linear == pytest.approx(0.398107, abs=1e-6)
    assert table.get("gain k").linear == pytest.approx(table.get("cancelling gain (T/R)^(1/4)").linear, rel=1e-7)


def test_witness_scenario(tmp_path):
    assert _run("run", CONFIGS / "witnesses.yaml", "--outdir", tmp_path) == cli.EXIT_OK
    table = _table(tmp_path / "witnesses.json")
    assert round(table.get("product root (0.39, 0.55)").linear, 2) == 0.46
    assert round(table.get("product root (0.44, 0.46)").linear, 2) == 0.45


def test_characterize_scenario(tmp_path):
    assert _run("run", CONFIGS / "characterize_squeezing.yaml", "--outdir", tmp_path) == cli.EXIT_OK
    table = _table(tmp_path / "characterize_squeezing.json")
    assert table.get("inferred input A(sq)").db == pytest.approx(-4.2, abs=1e-9)
    assert table.get("blocked-arm output A(sq)").linear == pytest.approx(0.690, abs=1e-3)


def test_reruns_are_byte_identical(tmp_path):
    for d in ("one", "two"):
        assert _run("run", CONFIGS / "entangle_sq_basis.yaml", "--outdir", tmp_path / d) == 0
    for name in ("entangle_sq_basis.csv", "entangle_sq_basis.json"):
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()


# sweeps

def test_sum_correlation_flat_in_t():
    cfg = parse_config(BASE)
    table = run_sweep(cfg, "t", np.linspace(0.3, 0.7, 9))
    values = [y for _, y in table.series()["sum correlation (sq)"]]
    assert np.allclose(values, 0.389148, atol=1e-6)


def test_angle_error_sweep_crosses_band():
    cfg = parse_config((CONFIGS / "sweep_angle_error.yaml").read_text())
    table = run_scenario(cfg)
    pts = table.series()["product root (opt basis)"]
    xs, ys = np.array(pts).T
    assert np.all(np.diff(ys) > 0)
    inside = xs[(ys >= 0.44) & (ys <= 0.46)]
    assert inside.size and inside[0] <= 1.5


def test_gain_sweep_minimum_near_cancelling_gain():
    cfg = parse_config(BASE.replace("{t: 0.5}", "{t: 0.521}"))
    grid = np.linspace(0.9, 1.15, 26)
    table = run_sweep(cfg, "gain", grid)
    xs, ys = np.array(table.series()["opt correlation (k)"]).T
    assert xs[np.argmin(ys)] == pytest.approx((0.521 / 0.479) ** 0.25, abs=0.01)


def test_sweep_workers_preserve_order(tmp_path):
    cfg = CONFIGS / "entangle_sq_basis.yaml"
    assert _run("sweep", cfg, "--axis", "t", "--grid", "0.4:0.6:5", "--outdir", tmp_path / "a") == 0
    assert _run("sweep", cfg, "--axis", "t", "--grid", "0.4:0.6:5", "--workers", 3,
                "--outdir", tmp_path / "b") == 0
    name = "entangle_sq_basis_sweep_t.csv"
    assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert (tmp_path / "a" / "entangle_sq_basis_sweep_t_plots").is_dir()


@pytest.mark.parametrize("text, expected", [("0.5,0.6", [0.5, 0.6]), ("0:1:3", [0.0, 0.5, 1.0])])
def test_parse_grid(text, expected):
    assert cli.parse_grid(text) == expected


@pytest.mark.parametrize("text", ["", "a,b", "0:1"])
def test_parse_grid_rejects(text):
    with pytest.raises(ConfigError):
        cli.parse_grid(text)


def test_sweep_rejects_bad_value(tmp_path):
    rc = _run("sweep", CONFIGS / "entangle_sq_basis.yaml", "--axis", "t", "--grid", "1.5", "--outdir", tmp_path)
    assert rc == cli.EXIT_MODEL


# oracle, plots, verify

def test_oracle_passes(tmp_path):
    assert _run("oracle", CONFIGS / "entangle_sq_basis.yaml", "--outdir", tmp_path) == cli.EXIT_OK
    table = _table(tmp_path / "entangle_sq_basis_oracle.json")
    residuals = [r.linear for r in table.rows if r.quantity.startswith("commutator")]
    assert max(residuals) <= 1e-12


def test_emit_plots(tmp_path):
    assert _run("run", CONFIGS / "sweep_angle_error.yaml", "--outdir", tmp_path) == 0
    out = tmp_path / "plots"
    assert _run("emit-plots", tmp_path / "sweep.json", out) == 0
    dat = out / "sweep__product_root_opt_basis.dat"
    lines = dat.read_text().splitlines()
    assert lines[0] == "# angle_error product root (opt basis)"
    assert len(lines) == 10


def test_emit_plots_bad_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert _run("emit-plots", bad, tmp_path) == cli.EXIT_CONFIG


def test_verify_exit_code(monkeypatch, capsys):
    import polent.verify as verify

    ok = verify.CriterionResult(1, "a", True, "", 0.0)
    bad = verify.CriterionResult(2, "b", False, "", 0.0)
    monkeypatch.setattr(verify, "run_all", lambda: [ok])
    assert _run("verify") == cli.EXIT_OK
    monkeypatch.setattr(verify, "run_all", lambda: [ok, bad])
    assert _run("verify") == cli.EXIT_ACCEPTANCE
    out = capsys.readouterr().out
    assert "[FAIL] 2. b" in out and "1/2 acceptance criteria passed" in out
