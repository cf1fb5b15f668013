"""Experiment sweeps, CSV determinism, and the command-line driver."""

import json

import numpy as np
import pytest

from hybeam.cli import main, read_config_file
from hybeam.errors import ConfigError
from hybeam.experiments import (
    CSV_COLUMNS,
    ExperimentConfig,
    ResultRow,
    dbm_to_watts,
    format_value,
    parse_bits,
    rows_to_csv,
    run_quant_bound,
    run_scenario1,
    run_scenario2,
)

FAST = dict(i_max=2, k_max=10)


def decomp_cfg(**kw):
    base = dict(
        scenario="decomp", sweep="n_rf", sweep_values=(2, 4), n_tx=8, n_rf=4,
        m_pilots=6, trials=3, seed=11, **FAST,
    )
    base.update(kw)
    return ExperimentConfig(**base)


# ---------------------------------------------------------------------------
# small helpers


def test_dbm_to_watts():
    assert dbm_to_watts(10.0) == pytest.approx(0.01)
    assert dbm_to_watts(30.0) == pytest.approx(1.0)
    assert dbm_to_watts(0.0) == pytest.approx(1e-3)


def test_parse_bits():
    assert parse_bits("3") == 3
    assert parse_bits(4) == 4
    assert parse_bits("inf") is None
    assert parse_bits("Infinite") is None
    assert parse_bits(None) is None
    with pytest.raises(ValueError):
        parse_bits("many")


def test_format_value():
    assert format_value(None) == "inf"
    assert format_value(3) == "3"
    assert format_value(0.1) == "0.1"
    assert format_value(1.0 / 3.0) == "0.333333333333"


def test_sigma_n_from_snr():
    cfg = decomp_cfg(p_dbm=10.0, snr_db=10.0)
    # P = 0.01 W at snr 10 gives sigma_n = sqrt(0.001)
    assert cfg.sigma_n == pytest.approx(np.sqrt(1e-3))


def test_rows_to_csv_schema_and_sorting():
    rows = [
        ResultRow("bits", 2, "m", "x", 1.0, 0.5, 3, 0),
        ResultRow("bits", None, "m", "x", 2.0, 0.0, 3, 0),
        ResultRow("bits", 1, "m", "x", 3.0, 0.0, 3, 0),
    ]
    text = rows_to_csv(rows)
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert [ln.split(",")[1] for ln in lines[1:]] == ["1", "2", "inf"]
    assert text.endswith("\n")
    assert lines[1].split(",")[4] == "3"  # %.12g drops the trailing zero


def test_config_validation():
    with pytest.raises(ConfigError):
        decomp_cfg(scenario="nope").validate()
    with pytest.raises(ConfigError):
        decomp_cfg(sweep="nope").validate()
    with pytest.raises(ConfigError):
        decomp_cfg(sweep_values=()).validate()
    with pytest.raises(ConfigError):
        decomp_cfg(trials=0).validate()
    with pytest.raises(ConfigError):
        decomp_cfg(m_pilots=1).validate()
    with pytest.raises(ConfigError):
        decomp_cfg(ue_angles_deg=(0.0, 10.0, 20.0)).validate()
    with pytest.raises(ConfigError):
        decomp_cfg(jobs=0).validate()


def test_scenario_runner_mismatch():
    with pytest.raises(ConfigError):
        run_scenario2(decomp_cfg())
    with pytest.raises(ConfigError):
        run_quant_bound(decomp_cfg())


def test_scenario1_rejects_oversized_n_rf():
    with pytest.raises(ConfigError):
        run_scenario1(decomp_cfg(sweep_values=(16,)))


# ---------------------------------------------------------------------------
# scenario runs


def test_scenario1_deterministic_and_archived():
    cfg = decomp_cfg()
    rows_a, archive_a, timings_a = run_scenario1(cfg)
    rows_b, archive_b, _ = run_scenario1(cfg)
    assert rows_to_csv(rows_a) == rows_to_csv(rows_b)
    assert archive_a == archive_b
    # summary statistics recompute from the per-trial archive
    for row in rows_a:
        trials = archive_a[format_value(row.sweep_value)]["decp_err"]
        assert len(trials) == cfg.trials
        assert row.mean == pytest.approx(np.mean(trials), rel=1e-12)
        assert row.std == pytest.approx(np.std(trials, ddof=1), rel=1e-12)
    assert len(timings_a) == len(cfg.sweep_values)


def test_scenario1_more_chains_reduce_error():
    cfg = decomp_cfg(sweep_values=(2, 8), trials=4)
    rows, _, _ = run_scenario1(cfg)
    by_value = {r.sweep_value: r.mean for r in rows}
    assert by_value[8] < by_value[2]


def test_scenario1_parallel_matches_serial():
    cfg = decomp_cfg(trials=2)
    rows_serial, archive_serial, _ = run_scenario1(cfg)
    rows_par, archive_par, _ = run_scenario1(decomp_cfg(trials=2, jobs=2))
    assert rows_to_csv(rows_serial) == rows_to_csv(rows_par)
    assert archive_serial == archive_par


def test_scenario2_single_user_rows():
    cfg = ExperimentConfig(
        scenario="aeb", sweep="aod", sweep_values=(0.0, 40.0), n_tx=8, n_rf=4,
        m_pilots=4, trials=2, seed=3, **FAST,
    )
    rows, archive, _ = run_scenario2(cfg)
    methods = {(r.method, r.metric) for r in rows}
    assert methods == {("digital", "aeb"), ("hybrid", "aeb")}
    digital = [r for r in rows if r.method == "digital"]
    assert all(r.trials == 1 and r.std == 0.0 for r in digital)
    hybrid = [r for r in rows if r.method == "hybrid"]
    assert all(r.trials == 2 for r in hybrid)
    for r in hybrid:
        vals = archive[format_value(r.sweep_value)]["hybrid/aeb"]
        assert r.mean == pytest.approx(np.mean(vals), rel=1e-12)


def test_scenario2_two_user_designs():
    cfg = ExperimentConfig(
        scenario="aeb", sweep="bits", sweep_values=("2",), n_tx=8, n_rf=4,
        m_pilots=8, trials=2, seed=5, ue_angles_deg=(0.0, 60.0), **FAST,
    )
    rows, archive, _ = run_scenario2(cfg)
    methods = {r.method for r in rows}
    assert methods == {
        "digital-design-ue1", "digital-design-ue2", "digital-design-both",
        "hybrid-design-ue1", "hybrid-design-ue2", "hybrid-design-both",
    }
    metrics = {r.metric for r in rows}
    assert metrics == {"aeb_ue1", "aeb_ue2"}
    # a design aimed at one user serves that user better than the other's design
    val = {(r.method, r.metric): r.mean for r in rows}
    assert val[("digital-design-ue1", "aeb_ue1")] < val[("digital-design-ue2", "aeb_ue1")]
    assert val[("digital-design-ue2", "aeb_ue2")] < val[("digital-design-ue1", "aeb_ue2")]


def test_quant_bound_rows_and_reports():
    cfg = ExperimentConfig(
        scenario="quantbound", sweep="bits", sweep_values=("1", "3", "inf"),
        n_tx=8, n_rf=4, m_pilots=6, trials=2, seed=7, **FAST,
    )
    rows, archive, timings, reports = run_quant_bound(cfg)
    assert {r.metric for r in rows} == {"true_error", "quantized_error", "decp_ub"}
    assert [rep["B"] for rep in reports] == ["1", "3", "inf"]
    for rep in reports:
        assert rep["decp_ub"] == pytest.approx(
            rep["true_error"] + rep["C"] * rep["factor"], rel=1e-12
        )
    assert reports[-1]["factor"] == 0.0
    for value in ("1", "3", "inf"):
        assert len(archive[value]["quantized_error"]) == 2


# ---------------------------------------------------------------------------
# CLI


def run_cli(args):
    return main([str(a) for a in args])


def test_cli_decomp_sweep_writes_outputs(tmp_path):
    out = tmp_path / "runs"
    code = run_cli([
        "decomp-sweep", "--out", out, "--name", "demo", "--sweep", "n_rf",
        "--sweep-values", "2,4", "--n-tx", "8", "--m-pilots", "6",
        "--trials", "2", "--seed", "1", "--i-max", "2", "--k-max", "10",
    ])
    assert code == 0
    csv_text = (out / "demo.csv").read_text()
    assert csv_text.splitlines()[0] == ",".join(CSV_COLUMNS)
    trials = json.loads((out / "demo_trials.json").read_text())
    assert set(trials) == {"2", "4"}
    assert (out / "demo_timing.json").exists()


def test_cli_byte_identical_reruns(tmp_path):
    args = [
        "decomp-sweep", "--out", None, "--name", "r", "--sweep", "bits",
        "--sweep-values", "1,inf", "--n-tx", "8", "--n-rf", "4",
        "--m-pilots", "6", "--trials", "2", "--seed", "9",
        "--i-max", "2", "--k-max", "10",
    ]
    texts = []
    for d in ("a", "b"):
        args[2] = tmp_path / d
        assert run_cli(args) == 0
        texts.append((tmp_path / d / "r.csv").read_bytes())
    assert texts[0] == texts[1]


def test_cli_config_file_with_flag_override(tmp_path):
    cfgfile = tmp_path / "exp.cfg"
    cfgfile.write_text(
        "# comment line\n"
        "sweep = n_rf\n"
        "sweep_values = 2,4\n"
        "n_tx = 8  # inline comment\n"
        "m_pilots = 6\n"
        "trials = 3\n"
        "i_max = 2\n"
        "k_max = 10\n"
    )
    out = tmp_path / "o"
    assert run_cli(["decomp-sweep", "--config", cfgfile, "--out", out,
                    "--trials", "2"]) == 0
    csv_lines = (out / "run.csv").read_text().splitlines()
    assert all(ln.split(",")[6] == "2" for ln in csv_lines[1:])  # flag wins


def test_cli_rejects_unknown_config_key(tmp_path):
    cfgfile = tmp_path / "bad.cfg"
    cfgfile.write_text("sweep_values = 2\nantennas = 8\n")
    with pytest.raises(ConfigError):
        read_config_file(cfgfile)
    out = tmp_path / "o"
    assert run_cli(["decomp-sweep", "--config", cfgfile, "--out", out]) == 2


def test_cli_missing_sweep_values_is_config_error(tmp_path):
    assert run_cli(["decomp-sweep", "--out", tmp_path / "o"]) == 2


def test_cli_bad_value_is_config_error(tmp_path):
    assert run_cli([
        "decomp-sweep", "--out", tmp_path / "o", "--sweep-values", "2",
        "--trials", "lots",
    ]) == 2


def test_cli_quant_bound_writes_reports(tmp_path):
    out = tmp_path / "q"
    assert run_cli([
        "quant-bound", "--out", out, "--name", "qb",
        "--sweep-values", "1,2,inf", "--n-tx", "8", "--n-rf", "4",
        "--m-pilots", "6", "--trials", "2", "--i-max", "2", "--k-max", "10",
    ]) == 0
    lines = (out / "qb_bound_reports.csv").read_text().splitlines()
    assert lines[0] == "B,factor,C,true_error,decp_ub"
    assert len(lines) == 4


def test_cli_design_dump(tmp_path):
    out = tmp_path / "d"
    assert run_cli([
        "design", "--out", out, "--name", "one", "--n-tx", "8", "--n-rf", "4",
        "--m-pilots", "4", "--bits", "3", "--trials", "1",
        "--i-max", "2", "--k-max", "10",
    ]) == 0
    result = json.loads((out / "one_design.json").read_text())
    assert set(result) >= {"config", "f_opt", "f_rf", "f_bb", "decp_err",
                           "aeb_digital", "aeb_hybrid", "diagnostics"}
    f_rf = np.array(result["f_rf"]["real"]) + 1j * np.array(result["f_rf"]["imag"])
    assert f_rf.shape == (8, 4)
    np.testing.assert_allclose(np.abs(f_rf), 1.0 / np.sqrt(8), atol=1e-12)
    assert result["aeb_hybrid"] > 0.0 and result["aeb_digital"] > 0.0
