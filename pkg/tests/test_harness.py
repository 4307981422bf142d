"""
Simulation harness and command line - Test Suite.

 Group 1 - Trial seeds
 Group 2 - Run configuration parsing and errors, environment read once
 Group 3 - Trial records: determinism across worker counts, failures recorded
 Group 4 - Sweeps: EE against the budget, the QoS targets and static power, per algorithm
 Group 5 - Comparisons and oracle certification
 Group 6 - Command line: exit codes and outputs
 Group 7 - Cross-solver agreement at four antennas and selection ratios
"""

import json

import pytest

from harness.cli import EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, main
from harness.controller import (
    SimulationController,
    apply_sweep,
    solve_order,
    splitmix64,
    trial_channel,
    trial_seed,
)
from swipt.errors import ConfigError
from util.config_manager import ConfigurationManager, parse_run_config
from util.trace_formatter import format_records

SMALL = {
    "params": {"n_tx": 2, "n_rx": 2},
    "qos": {"r_min": 1.0, "e_min": 0.05, "p_max": 5.0},
    "trials": 3,
    "master_seed": 7,
    "algorithms": ["moo_lc", "jeapa"],
    "selection": "fixed_full",
}


def _config(**changes):
    body = json.loads(json.dumps(SMALL))
    body.update(changes)
    return parse_run_config(json.dumps(body))


def _write_config(tmp_path, **changes):
    body = json.loads(json.dumps(SMALL))
    body.update(changes)
    path = tmp_path / "run.json"
    path.write_text(json.dumps(body, indent=2))
    return str(path)


# ── Group 1 ──────────────────────────────────────────────────────────────────

def test_splitmix64_reference_value():
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def test_trial_seeds_are_stable_and_distinct():
    seeds = [trial_seed(7, t) for t in range(100)]
    assert seeds == [trial_seed(7, t) for t in range(100)]
    assert len(set(seeds)) == 100
    assert trial_seed(8, 0) != trial_seed(7, 0)
    assert all(0 <= s < 2 ** 64 for s in seeds)


def test_trial_channel_depends_only_on_seed_and_index():
    config = _config()
    first = trial_channel(config, 2).entries
    again = trial_channel(config.with_seed(7), 2).entries
    assert (first == again).all()
    assert not (first == trial_channel(config, 1).entries).all()


# ── Group 2 ──────────────────────────────────────────────────────────────────

def test_unknown_field_reports_line_and_field():
    text = '{\n  "trials": 2,\n  "bogus": 1\n}'
    with pytest.raises(ConfigError) as info:
        parse_run_config(text)
    assert info.value.field == "bogus"
    assert info.value.line == 3


def test_invalid_json_reports_line():
    with pytest.raises(ConfigError) as info:
        parse_run_config('{\n  "trials": 2,\n  oops\n}')
    assert info.value.line == 3


def test_nested_field_path():
    with pytest.raises(ConfigError) as info:
        parse_run_config('{"params": {"n_tx": 0}}')
    assert info.value.field == "params.n_tx"


@pytest.mark.parametrize("values", [[5, 5], [10, 2], []])
def test_sweep_values_must_increase(values):
    with pytest.raises(ConfigError):
        _config(sweep={"variable": "p_max", "values": values})


def test_amplifier_figure_given_once():
    with pytest.raises(ConfigError):
        _config(params={"zeta": 2.0, "drain_efficiency": 0.5})


def test_apply_sweep_targets():
    config = _config(sweep={"variable": "p_sta", "values": [1.0, 2.0]})
    params, qos, limit = apply_sweep(config, 2.0)
    assert params.p_sta == 2.0 and qos == config.qos and limit is None
    config = _config(sweep={"variable": "n_active", "values": [1, 2]})
    assert apply_sweep(config, 1.0)[2] == 1
    config = _config(sweep={"variable": "e_min", "values": [0.1]})
    assert apply_sweep(config, 0.1)[1].e_min == 0.1


def test_environment_is_read_once(monkeypatch, tmp_path):
    monkeypatch.setenv("SWIPT_WORKERS", "3")
    manager = ConfigurationManager.from_env_file(str(tmp_path / "absent.env"))
    monkeypatch.setenv("SWIPT_WORKERS", "5")
    assert manager.get_environment().workers == 3
    assert not hasattr(manager, "update_environment")


# ── Group 3 ──────────────────────────────────────────────────────────────────

def test_records_identical_across_worker_counts():
    config = _config()
    serial = SimulationController(config, workers=1).run()
    parallel = SimulationController(config, workers=2).run()
    text = format_records(serial, exclude=("runtime_ms",))
    assert text == format_records(parallel, exclude=("runtime_ms",))
    assert text.splitlines()[0].split(",")[:3] == ["trial", "algorithm", "selection"]
    assert "runtime_ms" not in text.splitlines()[0]
    assert [r.trial for r in serial] == [0, 0, 1, 1, 2, 2]


def test_infeasible_trials_are_recorded():
    config = _config(qos={"r_min": 80.0, "e_min": 0.0, "p_max": 1.0}, trials=1)
    records = SimulationController(config).run()
    assert len(records) == 2
    assert all(not r.feasible and r.ee_rounded is None for r in records)


def test_out_of_range_antenna_sweep_is_config_error():
    config = _config(sweep={"variable": "n_active", "values": [1, 3]}, trials=1)
    with pytest.raises(ConfigError):
        SimulationController(config).run()


# ── Group 4 ──────────────────────────────────────────────────────────────────

ALGORITHMS = ["dm_cvx", "jeapa", "moo_lc"]


def _sweep_ee(variable, values, algorithm, **changes):
    config = _config(algorithms=[algorithm], trials=2, sweep={"variable": variable, "values": values},
                     **changes)
    records = SimulationController(config).run()
    by_trial = {}
    for r in records:
        assert r.sweep_value == values[len(by_trial.get(r.trial, []))]
        by_trial.setdefault(r.trial, []).append(float("-inf") if r.ee_relaxed is None else r.ee_relaxed)
    return by_trial.values()


def _non_decreasing(series):
    return all(b >= a * (1 - 1e-9) for a, b in zip(series, series[1:]))


def test_solve_order_grows_the_feasible_set():
    assert solve_order(_config(sweep={"variable": "p_max", "values": [2.0, 5.0, 10.0]})) == [0, 1, 2]
    assert solve_order(_config(sweep={"variable": "e_min", "values": [0.0, 0.1, 0.3]})) == [2, 1, 0]
    assert solve_order(_config(sweep={"variable": "n_active", "values": [1, 2]})) == [0, 1]
    assert solve_order(_config()) == [0]


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_ee_non_decreasing_in_budget(algorithm):
    for series in _sweep_ee("p_max", [2.0, 5.0, 10.0], algorithm):
        assert _non_decreasing(series)


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_ee_non_decreasing_in_budget_at_four_antennas(algorithm):
    for series in _sweep_ee("p_max", [10.0, 20.0, 40.0], algorithm,
                            params={"n_tx": 4, "n_rx": 4}, qos={"r_min": 1.0, "e_min": 0.1, "p_max": 20.0}):
        assert _non_decreasing(series)


@pytest.mark.parametrize("algorithm", ALGORITHMS)
@pytest.mark.parametrize("variable,values", [
    ("r_min", [0.5, 1.0, 2.0]),
    ("e_min", [0.0, 0.1, 0.3]),
    ("p_sta", [2.0, 5.0, 10.0]),
])
def test_ee_non_increasing_in_targets_and_static_power(variable, values, algorithm):
    for series in _sweep_ee(variable, values, algorithm):
        assert _non_decreasing(series[::-1])


# ── Group 5 ──────────────────────────────────────────────────────────────────

def test_compare_needs_two_schemes():
    with pytest.raises(ConfigError):
        SimulationController(_config(algorithms=["jeapa"])).compare()


def test_harvesting_never_loses_to_no_harvest_without_energy_target():
    config = _config(algorithms=["dm_cvx", "moo_lc"], trials=2,
                     qos={"r_min": 1.0, "e_min": 0.0, "p_max": 5.0})
    comparisons = SimulationController(config).compare()
    schemes = {c.scheme for c in comparisons}
    assert {"dm_cvx/fixed_full", "moo_lc/fixed_full", "no_eh/fixed_full", "min_power/fixed_full"} <= schemes
    for trial in (0, 1):
        rows = {c.scheme: c for c in comparisons if c.trial == trial}
        no_eh = rows["no_eh/fixed_full"].ee_relaxed
        assert rows["dm_cvx/fixed_full"].ee_relaxed >= no_eh * (1 - 1e-4)
        assert rows["dm_cvx/fixed_full"].reference == "dm_cvx/fixed_full"
        assert rows["dm_cvx/fixed_full"].delta_rounded == 0.0


def test_oracle_check_passes_for_dinkelbach():
    config = _config(algorithms=["dm_cvx", "moo_lc"], trials=2,
                     oracle_check={"enabled": True, "power_grid_steps": 40})
    records = SimulationController(config).oracle_check()
    assert len(records) == 4
    assert all(r.passed for r in records)
    assert all(r.oracle_ee is not None for r in records)


@pytest.mark.parametrize("n", [2, 3])
def test_oracle_check_has_no_violations_for_bounded_solvers(n):
    config = _config(params={"n_tx": n, "n_rx": n}, algorithms=["dm_cvx", "jeapa"], trials=2,
                     oracle_check={"enabled": True, "power_grid_steps": 20})
    records = SimulationController(config).oracle_check()
    assert len(records) == 4
    assert [r for r in records if not r.passed] == []
    assert all(r.relaxed_ee >= r.rounded_ee - 1e-6 for r in records if r.rounded_ee is not None)



# ── Group 6 ──────────────────────────────────────────────────────────────────

def test_cli_run_writes_csv(tmp_path):
    out = tmp_path / "records.csv"
    assert main(["run", "--config", _write_config(tmp_path), "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 6
    assert "runtime_ms" not in lines[0]


def test_cli_timings_column(tmp_path):
    out = tmp_path / "records.csv"
    config = _write_config(tmp_path, trials=1)
    assert main(["run", "--config", config, "--out", str(out), "--timings"]) == EXIT_OK
    assert out.read_text().splitlines()[0].endswith("runtime_ms")


def test_cli_seed_override_changes_records(tmp_path):
    config = _write_config(tmp_path, trials=1, algorithms=["moo_lc"])
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["run", "--config", config, "--out", str(first)])
    main(["run", "--config", config, "--seed", "99", "--out", str(second)])
    assert first.read_text() != second.read_text()


def test_cli_config_error_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"trials": 0}')
    assert main(["run", "--config", str(path)]) == EXIT_CONFIG
    assert "error" in capsys.readouterr().err


def test_cli_missing_config_file(tmp_path):
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG


def test_cli_trace_header(tmp_path):
    out = tmp_path / "trace.csv"
    assert main(["trace", "--config", _write_config(tmp_path), "--algo", "jeapa",
                 "--trial", "1", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "round,ee,rate,energy,power,max_dual,event"
    assert lines[1].startswith("0,")
    assert lines[-1].endswith(",rounding")


def test_cli_trace_trial_out_of_range(tmp_path):
    assert main(["trace", "--config", _write_config(tmp_path), "--trial", "3"]) == EXIT_CONFIG


def test_cli_run_honours_oracle_check(tmp_path, capsys):
    out = tmp_path / "records.csv"
    config = _write_config(tmp_path, trials=2, algorithms=["dm_cvx"],
                           oracle_check={"enabled": True, "power_grid_steps": 20})
    assert main(["run", "--config", config, "--out", str(out)]) == EXIT_OK
    assert "oracle check: 2 checks, 0 violations" in capsys.readouterr().err
    assert len(out.read_text().splitlines()) == 1 + 2


def test_cli_run_skips_oracle_check_by_default(tmp_path, capsys):
    out = tmp_path / "records.csv"
    assert main(["run", "--config", _write_config(tmp_path, trials=1), "--out", str(out)]) == EXIT_OK
    assert "oracle check" not in capsys.readouterr().err


def test_cli_trace_prints_statistics(tmp_path, capsys):
    assert main(["trace", "--config", _write_config(tmp_path), "--algo", "moo_lc"]) == EXIT_OK
    captured = capsys.readouterr()
    assert captured.out.splitlines()[0] == "phase,ee,rate,energy,power,event"
    stats = dict(item.split("=") for item in captured.err.strip().splitlines()[-1].split(", "))
    assert set(stats) == {"iterations", "relaxed_ee", "rounded_ee", "rounding_drop"}
    assert int(stats["iterations"]) == 2


def test_cli_select_table(tmp_path):
    out = tmp_path / "select.csv"
    config = _write_config(tmp_path, algorithms=["moo_lc"])
    assert main(["select", "--config", config, "--strategy", "exhaustive", "--algo", "moo_lc",
                 "--trial", "2", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "N,antenna_set,ee,rate,energy,power,feasible"
    assert [line.split(",")[0] for line in lines[1:]] == ["1", "2"]


def test_cli_select_trial_out_of_range(tmp_path):
    assert main(["select", "--config", _write_config(tmp_path), "--trial", "3"]) == EXIT_CONFIG



def test_cli_oracle_check(tmp_path, capsys):
    config = _write_config(tmp_path, trials=2, algorithms=["dm_cvx"],
                           oracle_check={"enabled": True, "power_grid_steps": 40})
    assert main(["oracle-check", "--config", config]) == EXIT_OK
    assert "0 violations" in capsys.readouterr().out


def test_cli_solve_gains(tmp_path, capsys):
    config = _write_config(tmp_path)
    assert main(["solve", "--config", config, "--gains", "3,1.2", "--algo", "moo_lc"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["algorithm"] == "moo_lc"
    assert payload["feasible"] is True


def test_cli_solve_bad_gains(tmp_path):
    assert main(["solve", "--config", _write_config(tmp_path), "--gains", "3,x"]) == EXIT_CONFIG


def test_cli_solve_infeasible(tmp_path):
    config = _write_config(tmp_path, qos={"r_min": 80.0, "e_min": 0.0, "p_max": 1.0})
    assert main(["solve", "--config", config, "--gains", "3,1.2", "--algo", "jeapa"]) == EXIT_FAILURE


def test_cli_report(tmp_path):
    records, pdf = tmp_path / "records.csv", tmp_path / "summary.pdf"
    config = _write_config(tmp_path, trials=1)
    assert main(["run", "--config", config, "--out", str(records)]) == EXIT_OK
    assert main(["report", "--csv", str(records), "--out", str(pdf)]) == EXIT_OK
    assert pdf.read_bytes().startswith(b"%PDF")


# ── Group 7 ──────────────────────────────────────────────────────────────────

def test_jeapa_within_one_percent_of_dinkelbach_at_four_antennas():
    config = _config(params={"n_tx": 4, "n_rx": 4}, qos={"r_min": 1.0, "e_min": 0.1, "p_max": 20.0},
                     algorithms=["dm_cvx", "jeapa"], trials=20)
    comparisons = SimulationController(config).compare()
    gaps = [c.relative_gap_relaxed for c in comparisons
            if c.scheme == "jeapa/fixed_full" and c.relative_gap_relaxed is not None]
    assert len(gaps) == 20
    assert sum(1 for g in gaps if g >= -0.01) >= 0.95 * len(gaps)


def test_frobenius_never_beats_exhaustive():
    config = _config(params={"n_tx": 4, "n_rx": 4}, algorithms=["moo_lc"], trials=4,
                     selections=["exhaustive", "frobenius"])
    records = SimulationController(config).run()
    best = {}
    for r in records:
        if r.ee_rounded is not None:
            best[(r.trial, r.selection)] = r.ee_rounded
    ratios = [best[(t, "frobenius")] / best[(t, "exhaustive")] for t in range(4)
              if (t, "frobenius") in best and (t, "exhaustive") in best]
    assert ratios
    assert all(0.0 < ratio <= 1.0 + 1e-12 for ratio in ratios)
