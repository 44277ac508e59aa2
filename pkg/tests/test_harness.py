import json
import math

import numpy as np
import pytest

from vinerow.config import from_dict, load_config
from vinerow.errors import TraceError
from vinerow.geometry import Pose2D
from vinerow.harness import (CSV_COLUMNS, TrialResult, csv_text, parse_trace,
                             read_csv, replay, run_batch, run_trials,
                             score_visits, summarize)
from vinerow.navigator import Visit
from vinerow.simulator import VineyardWorld


def test_aliengo_ten_trials(tmp_path):
    s = run_batch("aliengo", 10, seed=0, out_dir=tmp_path)
    rows = read_csv(s.csv_path)
    assert len(rows) == 50
    assert s.samples == sum(r["visited"] == "1" for r in rows)
    assert tuple(rows[0]) == CSV_COLUMNS
    assert (tmp_path / "errors.svg").read_text().lstrip().startswith("<?xml")
    assert len(list((tmp_path / "traces").glob("trial_*.ndjson"))) == 10


def test_summary_matches_csv(tmp_path):
    s = run_batch("hyqreal", 8, seed=3, out_dir=tmp_path)
    errs = [float(r["error_m"]) for r in read_csv(s.csv_path) if r["visited"] == "1"]
    assert abs(np.mean(errs) - s.mean_error) <= 1e-9
    assert abs(np.std(errs) - s.std_error) <= 1e-9
    doc = json.loads((tmp_path / "summary.json").read_text())
    assert doc["mean_error_m"] == s.mean_error
    assert doc["samples"] == len(errs)


def test_zero_noise_single_trial(tmp_path):
    s = run_batch("ideal", 1, seed=0, out_dir=tmp_path)
    assert s.samples == 5 and s.mean_error < 0.01
    assert s.exit_code == 0


def test_csv_is_reproducible(tmp_path):
    a = run_batch("hyqreal", 5, seed=42, out_dir=tmp_path / "a")
    b = run_batch("hyqreal", 5, seed=42, out_dir=tmp_path / "b")
    assert a.csv_path.read_bytes() == b.csv_path.read_bytes()
    c = run_batch("hyqreal", 5, seed=43, out_dir=tmp_path / "c")
    assert c.csv_path.read_bytes() != a.csv_path.read_bytes()


def test_parallel_matches_serial():
    cfg = load_config("hyqreal")
    serial = run_trials(cfg, 4, seed=5)
    parallel = run_trials(cfg, 4, seed=5, jobs=2)
    assert csv_text(serial) == csv_text(parallel)


def test_unfinished_trials_give_nonzero_exit(tmp_path):
    cfg = from_dict({"sim": {"max_time": 2.0}})
    s = run_batch(cfg, 2, seed=0, out_dir=tmp_path)
    assert not s.all_row_done and s.exit_code == 1


def test_failed_trial_is_recorded(tmp_path, monkeypatch):
    import vinerow.harness as h

    def boom(*a, **k):
        raise RuntimeError("simulated crash")
    monkeypatch.setattr(h, "simulate", boom)
    s = run_batch("ideal", 2, seed=0, out_dir=tmp_path)
    assert s.failures == 2 and s.exit_code == 1
    assert "simulated crash" in (tmp_path / "traces" / "trial_0000.error.txt").read_text()


def test_score_visits_matches_and_flags_spurious():
    cfg = load_config("ideal")
    world = VineyardWorld.rows(3, 0.8)
    visits = [
        Visit(0, Pose2D(0.0, 1.02), Pose2D(0.0, 1.0), 0.02, target_position=(0.01, 0.0)),
        Visit(7, Pose2D(0.0, 1.0), Pose2D(0.0, 1.0), 0.0, target_position=(0.02, 0.01)),
        Visit(8, Pose2D(5.0, 1.0), Pose2D(5.0, 1.0), 0.0, target_position=(5.0, 0.0)),
        Visit(2, Pose2D(1.6, -0.97), Pose2D(1.6, -1.0), 0.0, target_position=(1.6, 0.0)),
    ]
    errors, spurious = score_visits(world, visits, cfg)
    assert spurious == 2
    assert errors == {0: pytest.approx(0.02), 2: pytest.approx(0.03)}


def test_csv_lists_skipped_trunks():
    r = TrialResult(0, errors={1: 0.25}, trunk_count=3)
    assert csv_text([r]) == "trial_id,trunk_id,error_m,visited\n0,0,,0\n0,1,0.25,1\n0,2,,0\n"
    s = summarize([r])
    assert s.visit_rate == pytest.approx(1 / 3) and s.mean_error == 0.25


def test_summary_of_no_visits():
    s = summarize([TrialResult(0, trunk_count=3)])
    assert math.isnan(s.mean_error) and s.visit_rate == 0.0


# -- replay

def test_replay_empty(tmp_path):
    p = tmp_path / "t.ndjson"
    p.write_text("")
    assert replay(p) == []


def test_replay_single_line(tmp_path):
    p = tmp_path / "t.ndjson"
    p.write_text(json.dumps({"t": 0.0, "state": "RowFit", "x": 0, "y": 1, "yaw": 0,
                             "target": None}) + "\n")
    (line,) = replay(p)
    assert "RowFit" in line and "target=-" in line


def test_replay_three_trunk_run(tmp_path):
    cfg = from_dict({"world": {"trunks": 3},
                     "sensor": {"position_noise_sigma": 0.0, "false_positive_rate": 0.0,
                                "miss_rate": 0.0}})
    run_batch(cfg, 1, seed=0, out_dir=tmp_path)
    lines = replay(tmp_path / "traces" / "trial_0000.ndjson")
    states = [line.split()[1] for line in lines]
    pairs = sum(1 for a, b in zip(states, states[1:]) if (a, b) == ("Approach", "TaskPause"))
    assert pairs == 3
    assert states[-1] == "RowDone"


def test_replay_reports_bad_line(tmp_path):
    p = tmp_path / "t.ndjson"
    good = json.dumps({"t": 0.0, "state": "RowFit", "x": 0, "y": 1, "yaw": 0, "target": None})
    p.write_text(good + "\n{not json\n")
    with pytest.raises(TraceError) as info:
        replay(p)
    assert info.value.line == 2 and "line 2" in str(info.value)
    with pytest.raises(TraceError) as info:
        parse_trace(['{"t": 1}'])
    assert "missing" in str(info.value)
    with pytest.raises(TraceError):
        replay(tmp_path / "nope.ndjson")
