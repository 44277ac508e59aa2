"""Row-following state machine.

    InitialSearch -> RowFit -> Approach -> TaskPause -> Approach -> ... -> RowDone

The navigator consumes one :class:`Snapshot` per tick (confirmed clusters,
robot pose, elapsed time) and returns the next state together with a
holonomic body-frame velocity command.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import List, Literal, Optional, Sequence, Tuple, Union

from .detection_filter import DetectionCluster
from .errors import InvalidParameter, NoRowFound, RowLost
from .geometry import (Pose2D, Side, Vec2, distance, normalize_angle,
                       offset_waypoint, side_of_line, trunk_frame)
from .row_estimation import (RowConfig, RowEstimate, enumerate_lines,
                             refresh_row, select_initial_row)


# -- states ----------------------------------------------------------------

@dataclass(frozen=True)
class InitialSearch:
    name = "InitialSearch"


@dataclass(frozen=True)
class RowFit:
    name = "RowFit"


@dataclass(frozen=True)
class Approach:
    waypoint: Pose2D
    target_cluster_id: int
    # set once the robot is inside the arrival radius; arrival is declared on
    # the following tick, after one fine-positioning command
    settling: bool = False
    name = "Approach"


@dataclass(frozen=True)
class TaskPause:
    remaining: float
    target_cluster_id: Optional[int] = None
    name = "TaskPause"

    @property
    def waiting(self) -> bool:
        """Pause finished and no target yet: looking for more trunks."""
        return self.target_cluster_id is None


@dataclass(frozen=True)
class RowDone:
    name = "RowDone"


NavState = Union[InitialSearch, RowFit, Approach, TaskPause, RowDone]


@dataclass(frozen=True)
class MotionCommand:
    """Desired body-frame velocity: forward, left (m/s) and yaw rate (rad/s)."""

    vx: float = 0.0
    vy: float = 0.0
    vyaw: float = 0.0

    @property
    def is_stop(self) -> bool:
        return self.vx == 0.0 and self.vy == 0.0 and self.vyaw == 0.0


STOP = MotionCommand()


@dataclass(frozen=True)
class NavConfig:
    offset_d: float = 1.0
    arrival_tolerance: float = 0.05
    search_timeout: float = 10.0
    pause_duration: float = 5.0
    side_policy: Literal["auto", "left", "right"] = "auto"
    along_row_offset: float = 0.0
    search_speed: float = 0.1
    max_speed: float = 0.5
    max_yaw_rate: float = 1.0
    yaw_gain: float = 1.0
    # next targets must lie this close to the tracked row line
    target_gate: float = 0.30
    # heading sweep while searching for the row; amplitude 0 disables it
    scan_amplitude: float = 0.35
    scan_period: float = 8.0

    def __post_init__(self):
        for name in ("offset_d", "arrival_tolerance", "search_timeout",
                     "pause_duration", "search_speed", "max_speed",
                     "max_yaw_rate", "yaw_gain", "target_gate", "scan_period"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidParameter(f"{name} must be positive, got {value!r}")
        if not (self.scan_amplitude >= 0 and math.isfinite(self.scan_amplitude)):
            raise InvalidParameter(f"scan_amplitude must be >= 0, got {self.scan_amplitude!r}")
        if self.side_policy not in ("auto", "left", "right"):
            raise InvalidParameter(f"unknown side_policy {self.side_policy!r}")


@dataclass(frozen=True)
class Snapshot:
    clusters: Tuple[DetectionCluster, ...]
    robot: Pose2D
    dt: float
    time: float = 0.0


@dataclass(frozen=True)
class Visit:
    cluster_id: int
    achieved: Pose2D
    waypoint: Pose2D
    error: float
    time: float = 0.0
    target_position: Tuple[float, float] = (0.0, 0.0)


@dataclass
class VisitLog:
    entries: List[Visit] = field(default_factory=list)

    def append(self, visit: Visit) -> None:
        if visit.cluster_id in self.ids:
            raise InvalidParameter(f"cluster {visit.cluster_id} already visited")
        self.entries.append(visit)

    @property
    def ids(self) -> List[int]:
        return [v.cluster_id for v in self.entries]

    @property
    def errors(self) -> List[float]:
        return [v.error for v in self.entries]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


# -- waypoint placement ----------------------------------------------------

def side_for_robot(position, row_dir: Vec2, robot) -> Side:
    """Half-plane (relative to ``row_dir``) that currently contains the robot."""
    return "left" if side_of_line(robot, position, row_dir) >= 0.0 else "right"


def waypoint_for(cluster: DetectionCluster, row: RowEstimate, config: NavConfig,
                 robot: Pose2D, side: Optional[Side] = None) -> Pose2D:
    """Waypoint at lateral offset ``config.offset_d`` from the trunk."""
    if side is None:
        if config.side_policy == "auto":
            side = side_for_robot(cluster.position, row.direction, robot)
        else:
            side = config.side_policy
    frame = trunk_frame(cluster.position, row.direction)
    return offset_waypoint(frame, config.offset_d, side, config.along_row_offset)


def _clamp(v: float, limit: float) -> float:
    return max(-limit, min(limit, v))


class Navigator:
    """Stateful driver for the navigation state machine.

    All memory that is not part of the discrete state (tracked row, visited
    trunks, chosen side, confirmation timer) lives here. ``step`` is
    deterministic: the same snapshot sequence gives the same trace.
    """

    def __init__(self, config: NavConfig = NavConfig(),
                 row_config: RowConfig = RowConfig()):
        self.config = config
        self.row_config = row_config
        self.state: NavState = InitialSearch()
        self.row: Optional[RowEstimate] = None
        self.visits = VisitLog()
        self.events: List[dict] = []
        self.time = 0.0
        self._visited = set()
        self._known_ids = set()
        self._since_new = 0.0
        self._failed_fit_ids: Optional[frozenset] = None
        # world-frame normal pointing from the row towards the robot's side
        self._side_normal: Optional[Vec2] = None
        # (start time, start yaw) of the current heading sweep
        self._scan_origin: Optional[Tuple[float, float]] = None

    # -- bookkeeping

    def _update_timer(self, snapshot: Snapshot) -> None:
        ids = {c.id for c in snapshot.clusters}
        if ids - self._known_ids:
            self._since_new = 0.0
        else:
            self._since_new += snapshot.dt
        self._known_ids |= ids

    def _log(self, new: NavState, robot: Pose2D) -> None:
        old = self.state
        target = getattr(new, "target_cluster_id", None)
        old_target = getattr(old, "target_cluster_id", None)
        changed = (type(new) is not type(old)
                   or (isinstance(new, Approach) and target != old_target))
        if changed or not self.events:
            self.events.append({
                "t": round(self.time, 9),
                "state": new.name,
                "x": robot.x,
                "y": robot.y,
                "yaw": robot.yaw,
                "target": target,
            })

    def _side(self, cluster: DetectionCluster, robot: Pose2D) -> Side:
        d = self.row.direction
        if self._side_normal is None:
            if self.config.side_policy == "auto":
                side = side_for_robot(cluster.position, d, robot)
            else:
                side = self.config.side_policy
            n = d.perpendicular()
            self._side_normal = n if side == "left" else -n
        return "left" if d.perpendicular().dot(self._side_normal) >= 0 else "right"

    def _waypoint(self, cluster, robot) -> Pose2D:
        return waypoint_for(cluster, self.row, self.config, robot,
                            side=self._side(cluster, robot))

    def _candidates(self, clusters: Sequence[DetectionCluster]) -> List[DetectionCluster]:
        gate = self.config.target_gate
        return [c for c in clusters
                if c.id not in self._visited
                and self.row.line.perpendicular_distance(c.position) <= gate]

    def _next_target(self, snapshot: Snapshot) -> NavState:
        pool = self._candidates(snapshot.clusters)
        if not pool:
            return TaskPause(0.0, None)
        target = min(pool, key=lambda c: (distance(c.position, snapshot.robot), c.id))
        return Approach(self._waypoint(target, snapshot.robot), target.id)

    def _refresh(self, clusters) -> None:
        try:
            self.row = refresh_row(self.row, clusters, self.row_config)
        except RowLost:
            pass

    def _drive_to(self, goal: Pose2D, robot: Pose2D, dt: float) -> MotionCommand:
        ex, ey = goal.x - robot.x, goal.y - robot.y
        vx, vy = ex / dt, ey / dt
        speed = math.hypot(vx, vy)
        if speed > self.config.max_speed:
            k = self.config.max_speed / speed
            vx, vy = vx * k, vy * k
        c, s = math.cos(robot.yaw), math.sin(robot.yaw)
        yaw_err = normalize_angle(goal.yaw - robot.yaw)
        return MotionCommand(c * vx + s * vy, -s * vx + c * vy,
                             _clamp(self.config.yaw_gain * yaw_err, self.config.max_yaw_rate))

    def _scan(self, robot: Pose2D) -> MotionCommand:
        cfg = self.config
        if self._scan_origin is None:
            self._scan_origin = (self.time, robot.yaw)
        t0, yaw0 = self._scan_origin
        phase = 2.0 * math.pi * (self.time - t0) / cfg.scan_period
        goal = yaw0 + cfg.scan_amplitude * math.sin(phase)
        w = _clamp(cfg.yaw_gain * normalize_angle(goal - robot.yaw), cfg.max_yaw_rate)
        return MotionCommand(cfg.search_speed, 0.0, w)

    def _creep(self, robot: Pose2D) -> MotionCommand:
        if self.row is None:
            return self._scan(robot)
        # move along the row in the direction the robot is facing
        d = self.row.direction
        if d.dot(robot.heading) < 0:
            d = -d
        lx, ly = robot.to_local(robot.x + d.dx, robot.y + d.dy)
        v = self.config.search_speed
        return MotionCommand(v * lx, v * ly, 0.0)

    # -- transition function

    def step(self, snapshot: Snapshot) -> Tuple[NavState, MotionCommand]:
        if not snapshot.dt > 0:
            raise InvalidParameter("dt must be positive")
        self.time = snapshot.time
        self._update_timer(snapshot)
        new, cmd = self._transition(self.state, snapshot)
        self._log(new, snapshot.robot)
        self.state = new
        return new, cmd

    def _transition(self, state: NavState, snap: Snapshot) -> Tuple[NavState, MotionCommand]:
        cfg = self.config
        robot = snap.robot
        clusters = snap.clusters

        if isinstance(state, RowDone):
            return state, STOP

        if isinstance(state, InitialSearch):
            ids = frozenset(c.id for c in clusters)
            if len(clusters) >= self.row_config.min_line_size and ids != self._failed_fit_ids:
                return RowFit(), STOP
            if self._since_new >= cfg.search_timeout:
                return RowDone(), STOP
            return state, self._creep(robot)

        if isinstance(state, RowFit):
            try:
                candidates = enumerate_lines(clusters, self.row_config)
                self.row = select_initial_row(candidates, clusters, robot)
            except NoRowFound:
                self._failed_fit_ids = frozenset(c.id for c in clusters)
                return InitialSearch(), STOP
            self._failed_fit_ids = None
            by_id = {c.id: c for c in clusters}
            anchor = by_id[self.row.anchor_id]
            if anchor.id not in self._visited:
                return Approach(self._waypoint(anchor, robot), anchor.id), STOP
            return self._next_target(snap), STOP

        if isinstance(state, Approach):
            target = next((c for c in clusters if c.id == state.target_cluster_id), None)
            if target is None or target.id in self._visited:
                return RowFit(), STOP
            wp = self._waypoint(target, robot)
            gap = distance(wp, robot)
            if gap <= cfg.arrival_tolerance and (state.settling or gap == 0.0):
                self._visited.add(target.id)
                self.visits.append(Visit(target.id, robot, wp, gap, snap.time, target.position))
                return TaskPause(cfg.pause_duration, target.id), STOP
            settling = gap <= cfg.arrival_tolerance
            return Approach(wp, target.id, settling), self._drive_to(wp, robot, snap.dt)

        if isinstance(state, TaskPause):
            self._refresh(clusters)
            if not state.waiting:
                remaining = state.remaining - snap.dt
                if remaining > 1e-9:
                    return TaskPause(remaining, state.target_cluster_id), STOP
            nxt = self._next_target(snap)
            if isinstance(nxt, Approach):
                return nxt, STOP
            if self._since_new >= cfg.search_timeout:
                return RowDone(), STOP
            return nxt, self._creep(robot)

        raise TypeError(f"unknown navigation state {state!r}")

    # -- output

    def event_lines(self) -> List[str]:
        return [json.dumps(e, sort_keys=True) for e in self.events]

    def write_events(self, path) -> None:
        with open(path, "w") as f:
            for line in self.event_lines():
                f.write(line + "\n")


def step(navigator: Navigator, snapshot: Snapshot) -> Tuple[NavState, MotionCommand]:
    """Advance ``navigator`` by one tick."""
    return navigator.step(snapshot)
