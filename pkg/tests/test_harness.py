"""Scenario presets, experiment runner, CLI, key=value config files."""
import numpy as np
import pytest

from aoibandit import (RunSpec, UnknownPolicy, UnknownScenario,
                       builtin_scenarios, run_experiment, run_simulation,
                       summarize, summarize_log)
from aoibandit.cli import format_kv_config, main, parse_kv_config
from aoibandit.runner import PolicyParams, resolve_scenario


# --- presets -----------------------------------------------------------------

def test_reference_scenarios_exist_with_expected_parameters():
    presets = builtin_scenarios()
    s1, s2 = presets["scenario1"], presets["scenario2"]
    assert s1.config.update_prob == [[0.1], [0.4], [0.7]]
    assert s2.config.update_prob == [[0.3], [0.4], [0.5]]
    assert s1.config.horizon == 600_000 and s2.config.horizon == 600_000
    assert (s1.config.num_clients, s1.config.num_ans,
            s1.config.num_servers) == (2, 3, 1)


def test_analytic_and_synthetic_presets():
    presets = builtin_scenarios()
    single = presets["single_an_analytic"]
    assert single.config.update_prob == [[0.5]]
    abrupt = presets["synthetic_abrupt"]
    assert abrupt.r_switch[0] == 10_000
    assert abrupt.r_switch[1] == [[0.1], [0.1], [0.8]]


def test_unknown_scenario_is_rejected():
    with pytest.raises(UnknownScenario):
        resolve_scenario("nope")


# --- runner --------------------------------------------------------------------

def short_run(policy, seed=0, **kwargs):
    cfg = builtin_scenarios()["scenario1"].config
    return run_simulation(cfg, policy, seed, horizon=500, **kwargs)


def test_run_is_deterministic_for_equal_inputs():
    a, b = short_run("abar"), short_run("abar")
    np.testing.assert_array_equal(a.rewards, b.rewards)
    np.testing.assert_array_equal(a.chosen, b.chosen)
    np.testing.assert_array_equal(a.mean_aoi, b.mean_aoi)


def test_oracle_run_has_identically_zero_regret():
    log = short_run("oracle")
    assert log.regret.sum() == 0.0


def test_unknown_policy_is_rejected():
    with pytest.raises(UnknownPolicy):
        short_run("thompson")


def test_run_summary_shape():
    s = summarize_log(short_run("random"))
    assert s.horizon == 500
    assert s.final_avg_aoi > 1.0
    assert len(s.regret_checkpoints) == 3


def test_experiment_writes_stable_directory_layout(tmp_path):
    spec = RunSpec(scenario="single_an_analytic", seeds=[0, 1], horizon=300,
                   out_dir=str(tmp_path), policies=["random", "oracle"])
    summaries = run_experiment(spec)
    assert len(summaries) == 4
    for pid in ("random", "oracle"):
        for seed in (0, 1):
            base = tmp_path / "single_an_analytic" / pid / f"seed{seed}"
            assert (base / "series.csv").exists()
            assert (base / "events.csv").exists()


def test_repeated_experiment_is_byte_identical(tmp_path):
    def run(out):
        run_experiment(RunSpec(scenario="scenario1", seeds=[3], horizon=400,
                               out_dir=str(out), policies=["abar"]))
        return (out / "scenario1" / "abar" / "seed3" / "series.csv").read_bytes()

    assert run(tmp_path / "x") == run(tmp_path / "y")


def test_experiment_requires_seeds_and_known_policies(tmp_path):
    with pytest.raises(ValueError):
        run_experiment(RunSpec(scenario="scenario1", seeds=[]))
    with pytest.raises(UnknownPolicy):
        run_experiment(RunSpec(scenario="scenario1", seeds=[0],
                               policies=["egreedy"]))


def test_summary_aggregation():
    logs = [summarize_log(short_run("random", seed=s)) for s in (0, 1, 2)]
    logs += [summarize_log(short_run("oracle", seed=0))]
    table = summarize(logs)
    assert table["random"]["n_runs"] == 3
    assert table["oracle"]["aoi_std"] == 0.0
    assert table["oracle"]["regret_mean"] == 0.0
    assert table["random"]["regret_mean"] > 0.0


def test_scripted_probability_switch_changes_the_best_arm():
    preset = builtin_scenarios()["synthetic_abrupt"]
    log = run_simulation(preset.config, "oracle", 0, horizon=12_000,
                         r_switch=preset.r_switch)
    before = log.chosen[8000:10_000].ravel()
    after = log.chosen[10_500:12_000].ravel()
    assert np.all(before == 0)
    assert np.all(after == 2)


# --- key=value config files -------------------------------------------------------

def test_parse_scalars_arrays_matrices_and_comments():
    text = """
    # run settings
    scenario = scenario2
    seeds = 5          # trailing comment
    horizon = 1000
    update_prob = 0.1,0.2;0.3,0.4
    seed_list = 1,2,3
    """
    got = parse_kv_config(text)
    assert got["scenario"] == "scenario2"
    assert got["seeds"] == 5
    assert got["update_prob"] == [[0.1, 0.2], [0.3, 0.4]]
    assert got["seed_list"] == [1, 2, 3]


def test_config_round_trip_is_exact():
    values = {"scenario": "scenario1", "seeds": 4, "delta_exp": 3.0,
              "update_prob": [[0.1], [0.4], [0.7]], "seed_list": [1, 2]}
    assert parse_kv_config(format_kv_config(values)) == values


def test_malformed_line_is_rejected():
    with pytest.raises(Exception):
        parse_kv_config("scenario scenario1\n")


# --- CLI -----------------------------------------------------------------------------

def test_cli_lists_policies_and_scenarios(capsys):
    assert main(["list-policies"]) == 0
    out = capsys.readouterr().out
    for pid in ("abar", "ducb", "swucb", "oracle", "random"):
        assert pid in out
    assert main(["list-scenarios"]) == 0
    assert "scenario1" in capsys.readouterr().out


def test_cli_simulate_prints_summary_table(tmp_path, capsys):
    rc = main(["simulate", "--scenario", "single_an_analytic",
               "--policy", "random", "--seeds", "2", "--horizon", "400",
               "--out", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "random" in out and "aoi" in out
    assert (tmp_path / "single_an_analytic" / "random" / "seed0"
            / "series.csv").exists()


def test_cli_reports_unknown_scenario(capsys):
    rc = main(["simulate", "--scenario", "missing", "--seeds", "1"])
    assert rc == 2
    assert "error" in capsys.readouterr().err


def test_cli_config_file_overrides_flags(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("scenario=single_an_analytic\nhorizon=300\n"
                   "policies=oracle\nout=%s\nseed_list=7\n" % (tmp_path / "r"))
    rc = main(["simulate", "--scenario", "scenario1", "--config", str(cfg)])
    assert rc == 0
    assert (tmp_path / "r" / "single_an_analytic" / "oracle" / "seed7"
            / "series.csv").exists()
