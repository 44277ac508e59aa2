"""Monte-Carlo trial batches, scoring against ground truth, and trace replay."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from .config import TrialConfig, load_config
from .errors import TraceError
from .geometry import distance, offset_waypoint, side_of_line, trunk_frame
from .simulator import (RobotModel, VineyardWorld, jittered_start, simulate)

log = logging.getLogger(__name__)

CSV_COLUMNS = ("trial_id", "trunk_id", "error_m", "visited")
OUT_ENV = "VINEROW_OUT"


@dataclass
class TrialResult:
    trial_id: int
    errors: Dict[int, float] = field(default_factory=dict)
    trunk_count: int = 0
    spurious: int = 0
    row_done: bool = False
    sim_time: float = 0.0
    wall_time: float = 0.0
    failure: Optional[str] = None
    events: List[dict] = field(default_factory=list)

    @property
    def visited(self) -> int:
        return len(self.errors)

    @property
    def skipped(self) -> int:
        return self.trunk_count - self.visited


@dataclass
class BatchSummary:
    mean_error: float
    std_error: float
    visit_rate: float
    csv_path: Optional[Path]
    trials: int = 0
    samples: int = 0
    all_row_done: bool = True
    failures: int = 0
    spurious_visits: int = 0
    results: List[TrialResult] = field(default_factory=list, repr=False)

    @property
    def exit_code(self) -> int:
        return 0 if self.all_row_done and self.failures == 0 else 1


def build_world(cfg: TrialConfig, rng=None) -> VineyardWorld:
    w = cfg.world
    return VineyardWorld.rows(w.trunks, w.trunk_spacing, w.rows, w.row_spacing,
                              lateral_jitter=w.lateral_jitter, rng=rng)


def ideal_waypoint(world: VineyardWorld, trunk_index: int, achieved, cfg: TrialConfig):
    """Ground-truth waypoint for a trunk, on the side the robot actually used."""
    trunk = world.trunks[trunk_index]
    row = world.row_of[trunk_index]
    row_origin = world.trunks[world.row_trunks(row)[0]]
    side = "left" if side_of_line(achieved, row_origin, world.direction) >= 0 else "right"
    frame = trunk_frame(trunk, world.direction)
    return offset_waypoint(frame, cfg.navigator.offset_d, side, cfg.navigator.along_row_offset)


def score_visits(world: VineyardWorld, visits, cfg: TrialConfig, row: int = 0):
    """Match visits to target-row trunks; returns ({trunk: error}, spurious count).

    A visit belongs to the nearest trunk of the target row if its cluster lies
    within half a trunk spacing of it and the trunk is not yet claimed.
    """
    targets = world.row_trunks(row)
    radius = world.trunk_spacing / 2.0
    errors: Dict[int, float] = {}
    spurious = 0
    for v in visits:
        k = min(targets, key=lambda i: (distance(world.trunks[i], v.target_position), i))
        if distance(world.trunks[k], v.target_position) > radius or k in errors:
            spurious += 1
            continue
        errors[k] = distance(v.achieved, ideal_waypoint(world, k, v.achieved, cfg))
    return errors, spurious


def run_trial(cfg: TrialConfig, trial_id: int, seed_seq: np.random.SeedSequence) -> TrialResult:
    start = time.perf_counter()
    result = TrialResult(trial_id)
    try:
        world_rng, start_rng, sensor_rng = (np.random.default_rng(s) for s in seed_seq.spawn(3))
        world = build_world(cfg, world_rng)
        result.trunk_count = len(world.row_trunks(0))
        rc = cfg.robot
        robot = RobotModel(jittered_start(rc.start, rc.start_jitter, start_rng),
                           rc.max_speed, rc.footprint_length, rc.max_yaw_rate)
        run = simulate(world, robot, cfg.sensor, cfg.navigator, cfg.row, cfg.filter,
                       rng=sensor_rng, dt=cfg.sim.dt, max_time=cfg.sim.max_time)
        result.errors, result.spurious = score_visits(world, run.navigator.visits, cfg)
        result.row_done = run.row_done
        result.sim_time = run.sim_time
        result.events = run.navigator.events
    except Exception:
        result.failure = traceback.format_exc()
        log.error("trial %d failed:\n%s", trial_id, result.failure)
    result.wall_time = time.perf_counter() - start
    return result


def run_trials(cfg: TrialConfig, trials: int, seed: int, jobs: int = 1) -> List[TrialResult]:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    children = np.random.SeedSequence(seed).spawn(trials)
    if jobs <= 1:
        results = [run_trial(cfg, i, s) for i, s in enumerate(children)]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_trial, [cfg] * trials, range(trials), children))
    return sorted(results, key=lambda r: r.trial_id)


def csv_text(results: Sequence[TrialResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in results:
        for trunk in range(r.trunk_count):
            if trunk in r.errors:
                writer.writerow((r.trial_id, trunk, repr(r.errors[trunk]), 1))
            else:
                writer.writerow((r.trial_id, trunk, "", 0))
    return buf.getvalue()


def read_csv(path) -> List[dict]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def summarize(results: Sequence[TrialResult], csv_path=None) -> BatchSummary:
    errs = np.array([e for r in results for _, e in sorted(r.errors.items())], dtype=float)
    total = sum(r.trunk_count for r in results)
    return BatchSummary(
        mean_error=float(errs.mean()) if errs.size else math.nan,
        std_error=float(errs.std()) if errs.size else math.nan,
        visit_rate=(errs.size / total) if total else 0.0,
        csv_path=csv_path,
        trials=len(results),
        samples=int(errs.size),
        all_row_done=all(r.row_done for r in results),
        failures=sum(r.failure is not None for r in results),
        spurious_visits=sum(r.spurious for r in results),
        results=list(results),
    )


def write_histogram(path, errors, title="Waypoint error") -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "vinerow"
    fig, ax = plt.subplots(figsize=(6, 4))
    errs = np.asarray(errors, dtype=float) * 100.0
    if errs.size:
        ax.hist(errs, bins=min(30, max(5, errs.size // 3)), edgecolor="black", alpha=0.7)
        ax.axvline(errs.mean(), color="tab:red", linestyle="--",
                   label=f"mean {errs.mean():.1f} cm")
        ax.legend()
    ax.set_xlabel("Distance from desired position (cm)")
    ax.set_ylabel("Count")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def write_outputs(out_dir, cfg: TrialConfig, summary: BatchSummary, seed: int) -> None:
    out = Path(out_dir)
    (out / "traces").mkdir(parents=True, exist_ok=True)
    csv_path = out / "trials.csv"
    csv_path.write_text(csv_text(summary.results))
    summary.csv_path = csv_path
    for r in summary.results:
        with open(out / "traces" / f"trial_{r.trial_id:04d}.ndjson", "w") as f:
            for e in r.events:
                f.write(json.dumps(e, sort_keys=True) + "\n")
        if r.failure:
            (out / "traces" / f"trial_{r.trial_id:04d}.error.txt").write_text(r.failure)
    errs = [e for r in summary.results for _, e in sorted(r.errors.items())]
    write_histogram(out / "errors.svg", errs, title=f"Waypoint error ({cfg.name})")
    doc = {
        "config": cfg.name,
        "seed": seed,
        "trials": summary.trials,
        "samples": summary.samples,
        "mean_error_m": summary.mean_error,
        "std_error_m": summary.std_error,
        "visit_rate": summary.visit_rate,
        "spurious_visits": summary.spurious_visits,
        "all_row_done": summary.all_row_done,
        "failures": summary.failures,
        "csv": csv_path.name,
        "reference": asdict(cfg.reference),
    }
    (out / "summary.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def default_out_dir() -> Path:
    return Path(os.environ.get(OUT_ENV, "vinerow-out"))


def run_batch(config, trials: int, seed: int, out_dir=None, jobs: int = 1) -> BatchSummary:
    """Run ``trials`` seeded simulations and write CSV, summary and histogram.

    ``config`` is a path, a bundled profile name or a :class:`TrialConfig`.
    """
    cfg = config if isinstance(config, TrialConfig) else load_config(config)
    results = run_trials(cfg, trials, seed, jobs)
    summary = summarize(results)
    write_outputs(out_dir if out_dir is not None else default_out_dir(), cfg, summary, seed)
    return summary


# -- traces -----------------------------------------------------------------

_EVENT_KEYS = ("t", "state", "x", "y", "yaw", "target")


def parse_trace(lines) -> List[dict]:
    events = []
    for n, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            event = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceError(f"line {n}: invalid JSON ({exc.msg})", line=n) from None
        if not isinstance(event, dict):
            raise TraceError(f"line {n}: expected an object", line=n)
        missing = [k for k in _EVENT_KEYS if k not in event]
        if missing:
            raise TraceError(f"line {n}: missing {', '.join(missing)}", line=n)
        events.append(event)
    return events


def format_event(e: dict) -> str:
    target = "-" if e["target"] is None else str(e["target"])
    return (f"{e['t']:8.2f}s  {e['state']:<13} target={target:<4} "
            f"pose=({e['x']:.3f}, {e['y']:.3f}, {e['yaw']:+.3f})")


def replay(trace_path) -> List[str]:
    """Human-readable timeline, one line per transition."""
    try:
        with open(trace_path) as f:
            events = parse_trace(f)
    except OSError as exc:
        raise TraceError(f"cannot read trace {trace_path}: {exc.strerror}") from None
    return [format_event(e) for e in events]
