"""AoI/regret metrics, drift diagnostics, CSV export."""
import numpy as np
import pytest

from aoibandit import (ChangePoint, EmptyLog, MissingMuTable, NetworkConfig,
                       ResetEvent, RunLog, average_aoi, classify_changes,
                       classify_resets, cumulative_regret,
                       detectability_report, drift_tolerant_regret,
                       export_csv, pseudo_regret_slot, validate_config)
from aoibandit.metrics import detectability_threshold, epsilon_drift


def make_log(mean_aoi, regret=None, resets=None):
    T = len(mean_aoi)
    regret = np.zeros((T, 1, 1)) if regret is None else regret
    cfg = validate_config(NetworkConfig(1, 1, 1, max(T, 1),
                                        update_prob=[[0.5]]))
    return RunLog(policy="random", seed=0, config=cfg,
                  mean_aoi=np.asarray(mean_aoi, dtype=float),
                  rewards=np.zeros((T, 1, 1)), regret=regret,
                  chosen=np.zeros((T, 1, 1), dtype=np.int16),
                  resets=resets or [])


# --- averages and regret ---------------------------------------------------------

def test_average_aoi_of_constant_series():
    assert average_aoi(make_log([1.0] * 10)) == 1.0


def test_average_aoi_is_arithmetic_mean():
    assert average_aoi(make_log([1.0, 2.0, 3.0, 4.0])) == 2.5


def test_average_aoi_rejects_empty_log():
    with pytest.raises(EmptyLog):
        average_aoi(make_log([]))


def test_slot_regret_for_suboptimal_arm():
    # expected rewards (2.3, 3.2, 4.1); picking arm 0 loses 1.8
    r = [[0.1], [0.4], [0.7]]
    val = pseudo_regret_slot([[5]], [[3], [3], [3]], r, 0, 0, chosen=0)
    assert val == pytest.approx(1.8)


def test_slot_regret_zero_for_best_arm_and_missing_request():
    r = [[0.1], [0.4], [0.7]]
    assert pseudo_regret_slot([[5]], [[3], [3], [3]], r, 0, 0, 2) == 0.0
    assert pseudo_regret_slot([[5]], [[3], [3], [3]], r, 0, 0, -1) == 0.0


def test_slot_regret_zero_with_single_arm():
    assert pseudo_regret_slot([[9]], [[4]], [[0.3]], 0, 0, 0) == 0.0


def test_cumulative_regret_running_sum():
    reg = np.array([1.8, 0.0, 0.5]).reshape(3, 1, 1)
    np.testing.assert_allclose(cumulative_regret(make_log([1, 1, 1], reg)),
                               [1.8, 1.8, 2.3])


def test_cumulative_regret_is_nondecreasing():
    rng = np.random.default_rng(2)
    reg = rng.random((50, 1, 1))
    cum = cumulative_regret(make_log([1.0] * 50, reg))
    assert np.all(np.diff(cum) >= 0)


# --- drift diagnostics -------------------------------------------------------------

def test_drift_is_cumulative_max_deviation_from_epoch_start():
    mu = np.array([[0.5], [0.6], [0.55], [0.9], [0.7]])
    np.testing.assert_allclose(epsilon_drift(mu),
                               [0.0, 0.1, 0.1, 0.4, 0.4])


def test_drift_restarts_at_epoch_boundaries():
    mu = np.array([[0.5], [0.9], [0.9], [0.9]])
    np.testing.assert_allclose(epsilon_drift(mu, epoch_starts=(2,)),
                               [0.0, 0.4, 0.0, 0.0])


def test_stationary_tolerant_regret_equals_plain_regret():
    mu = np.tile([0.2, 0.8], (20, 1))
    chosen = np.zeros(20, dtype=int)     # always the bad arm, gap 0.6
    assert drift_tolerant_regret(mu, chosen, c=1.0) == pytest.approx(12.0)


def test_huge_allowance_clamps_tolerant_regret_to_zero():
    # drift allowance can excuse any regret except at the epoch start (eps = 0)
    mu = np.array([[0.1, 0.9], [0.9, 0.1], [0.1, 0.9]])
    chosen = np.array([1, 1, 0])
    assert drift_tolerant_regret(mu, chosen, c=1e6) == 0.0


def test_tolerant_regret_matches_hand_summation():
    mu = np.array([[0.5, 0.5],
                   [0.5, 0.6],
                   [0.5, 0.7],
                   [0.5, 0.7],
                   [0.5, 0.7]])
    chosen = np.array([0, 0, 0, -1, 0])
    # eps(t) = (0, .1, .2, .2, .2); reg(t) = (0, .1, .2, -, .2); c = 1
    # slot sums: 0, max(.1-.1,0)=0, 0, skipped, 0
    assert drift_tolerant_regret(mu, chosen, c=1.0) == pytest.approx(0.0)
    # c = 0 recovers the plain sum 0 + .1 + .2 + .2 = 0.5
    assert drift_tolerant_regret(mu, chosen, c=0.0) == pytest.approx(0.5)


def test_tolerant_regret_requires_mu_table():
    with pytest.raises(MissingMuTable):
        drift_tolerant_regret(None, np.zeros(3, dtype=int), 1.0)


def test_constant_table_has_no_change_points():
    assert classify_changes(np.tile([0.3, 0.7], (100, 1)), b=0.1) == []


def test_single_step_change_is_located_with_its_arm():
    mu = np.tile([0.2, 0.5], (1000, 1))
    mu[500:, 0] = 0.8
    points = classify_changes(mu, b=0.1)
    assert len(points) == 1
    cp = points[0]
    assert cp.slot == 499 and cp.arms == (0,)
    assert cp.min_jump == pytest.approx(0.6)


def test_slow_ramp_is_gradual_not_a_change_point():
    mu = np.linspace(0.0, 1.0, 101).reshape(-1, 1)
    assert classify_changes(mu, b=0.1) == []


def test_resets_near_changes_are_abrupt_others_gradual():
    resets = [ResetEvent(510, 0, 0, 510), ResetEvent(900, 0, 0, 390)]
    out = classify_resets(resets, change_slots=[499], window=50)
    assert [ev.kind for ev in out] == ["abrupt", "gradual"]


def test_detectability_threshold_reference_value():
    thr = detectability_threshold(2000, 3, 32, b=1e-3, u_m=8)
    assert thr == pytest.approx(1.192 + 0.576 + 1.193 + 0.001, abs=0.01)


def test_report_flags_small_jumps_as_undetectable():
    cp = ChangePoint(slot=1000, arms=(0,), jumps=(0.6,), min_jump=0.6)
    rep = detectability_report([cp], [], horizon=2000, num_arms=3,
                               monitor_n=32, b=1e-3, u_values=[8])[0]
    assert rep["jump_detectable"] is False
    assert rep["detection_delay"] == "undetected"


def test_report_measures_delay_of_following_reset():
    cp = ChangePoint(slot=1000, arms=(1,), jumps=(3.0,), min_jump=3.0)
    resets = [ResetEvent(1040, 0, 0, 1040, kind="abrupt")]
    rep = detectability_report([cp], resets, horizon=2000, num_arms=3,
                               monitor_n=2, b=1e-3, u_values=[1])[0]
    assert rep["detection_delay"] == 40
    assert rep["delay_within_bound"] is True
    assert rep["spacing_ok"] is True


# --- CSV export -----------------------------------------------------------------------

def test_series_file_has_header_plus_one_row_per_slot(tmp_path):
    log = make_log([1.0, 2.0, 1.5])
    export_csv(log, tmp_path)
    lines = (tmp_path / "series.csv").read_text().splitlines()
    assert lines[0] == "t,mean_aoi,cum_regret,resets_so_far"
    assert len(lines) == 4
    assert lines[1].startswith("1,1.0,")


def test_events_file_header_only_without_resets(tmp_path):
    export_csv(make_log([1.0]), tmp_path)
    assert (tmp_path / "events.csv").read_text() == "slot,pair_j,pair_p,kind\n"


def test_reset_counter_steps_at_reset_slots(tmp_path):
    log = make_log([1.0] * 4, resets=[ResetEvent(1, 0, 0, 2)])
    export_csv(log, tmp_path)
    lines = (tmp_path / "series.csv").read_text().splitlines()[1:]
    assert [ln.rsplit(",", 1)[1] for ln in lines] == ["0", "1", "1", "1"]
    events = (tmp_path / "events.csv").read_text().splitlines()
    assert events[1] == "1,0,0,reset"


def test_reexport_is_byte_identical(tmp_path):
    rng = np.random.default_rng(7)
    log = make_log(rng.random(20) + 1.0, rng.random((20, 1, 1)))
    export_csv(log, tmp_path / "a")
    export_csv(log, tmp_path / "b")
    for name in ("series.csv", "events.csv"):
        assert (tmp_path / "a" / name).read_bytes() == \
               (tmp_path / "b" / name).read_bytes()
