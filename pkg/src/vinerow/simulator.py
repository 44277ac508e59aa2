"""Deterministic 2D vineyard world with a synthetic trunk detector.

Detections are produced directly in world coordinates (ground truth plus
Gaussian noise, random misses and uniform false positives inside the
camera's field of view), so navigation can be exercised without images.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .detection_filter import Detection, FilterConfig, FilterState
from .errors import InvalidParameter
from .geometry import Pose2D, Vec2
from .navigator import MotionCommand, NavConfig, Navigator, RowDone, Snapshot
from .row_estimation import RowConfig

DT = 0.1
MIN_TRUNK_SEPARATION = 0.3


@dataclass(frozen=True)
class VineyardWorld:
    """Ground-truth trunk positions.

    Row 0 runs along ``direction`` through ``origin``; further rows are
    placed ``row_spacing`` apart on its right-hand side.
    """

    trunks: Tuple[Tuple[float, float], ...]
    row_of: Tuple[int, ...]
    row_spacing: float = 2.0
    trunk_spacing: float = 0.8
    direction: Vec2 = Vec2(1.0, 0.0)
    origin: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        pts = np.asarray(self.trunks, dtype=float).reshape(-1, 2)
        if len(self.row_of) != len(pts):
            raise InvalidParameter("row_of must label every trunk")
        if len(pts) > 1:
            diff = pts[:, None, :] - pts[None, :, :]
            d = np.hypot(diff[..., 0], diff[..., 1])
            np.fill_diagonal(d, np.inf)
            if d.min() < MIN_TRUNK_SEPARATION:
                raise InvalidParameter(
                    f"trunks closer than {MIN_TRUNK_SEPARATION} m ({d.min():.3f} m)")

    @classmethod
    def rows(cls, trunks_per_row: int, trunk_spacing: float = 0.8, n_rows: int = 1,
             row_spacing: float = 2.0, origin=(0.0, 0.0), heading: float = 0.0,
             lateral_jitter: float = 0.0, rng: Optional[np.random.Generator] = None):
        if trunks_per_row < 1 or n_rows < 1:
            raise InvalidParameter("need at least one trunk and one row")
        d = Vec2.from_angle(heading)
        right = -d.perpendicular()
        pts, rows = [], []
        for r in range(n_rows):
            for k in range(trunks_per_row):
                off = 0.0
                if lateral_jitter > 0:
                    off = float(rng.uniform(-lateral_jitter, lateral_jitter))
                along = k * trunk_spacing
                across = r * row_spacing + off
                pts.append((origin[0] + d.dx * along + right.dx * across,
                            origin[1] + d.dy * along + right.dy * across))
                rows.append(r)
        return cls(tuple(pts), tuple(rows), row_spacing, trunk_spacing, d,
                   (float(origin[0]), float(origin[1])))

    def row_trunks(self, row: int = 0) -> List[int]:
        return [i for i, r in enumerate(self.row_of) if r == row]

    def __len__(self):
        return len(self.trunks)


@dataclass(frozen=True)
class SensorModel:
    fov_half_angle: float = 0.60
    max_range: float = 4.0
    position_noise_sigma: float = 0.05
    false_positive_rate: float = 0.05
    miss_rate: float = 0.10
    seed: int = 0

    def __post_init__(self):
        for name in ("false_positive_rate", "miss_rate"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise InvalidParameter(f"{name} must be in [0, 1], got {p!r}")
        if self.position_noise_sigma < 0:
            raise InvalidParameter("position_noise_sigma must be >= 0")
        if not (self.max_range > 0 and self.fov_half_angle > 0):
            raise InvalidParameter("max_range and fov_half_angle must be positive")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


@dataclass(frozen=True)
class RobotModel:
    pose: Pose2D = Pose2D(0.0, 0.0, 0.0)
    max_speed: float = 0.5
    footprint_length: float = 0.61
    max_yaw_rate: float = 1.0

    def __post_init__(self):
        if self.max_speed < 0 or self.max_yaw_rate < 0:
            raise InvalidParameter("speed limits must be >= 0")

    @property
    def camera_pose(self) -> Pose2D:
        """Camera sits at the front of the body, looking forward."""
        x, y = self.pose.to_world(self.footprint_length / 2.0, 0.0)
        return Pose2D(x, y, self.pose.yaw)


HYQREAL = RobotModel(footprint_length=1.30)
ALIENGO = RobotModel(footprint_length=0.61)


def visible(camera: Pose2D, point, model: SensorModel) -> bool:
    lx, ly = camera.to_local(*point)
    r = math.hypot(lx, ly)
    return 0.0 < r <= model.max_range and abs(math.atan2(ly, lx)) <= model.fov_half_angle


def sense(world: VineyardWorld, robot: RobotModel, model: SensorModel,
          rng: np.random.Generator, frame_id: int = 0) -> List[Detection]:
    """One frame of detections; deterministic given the generator state."""
    cam = robot.camera_pose
    out = []
    sigma = model.position_noise_sigma
    for tx, ty in world.trunks:
        if not visible(cam, (tx, ty), model):
            continue
        if rng.random() < model.miss_rate:
            continue
        nx, ny = rng.normal(0.0, sigma, 2) if sigma > 0 else (0.0, 0.0)
        out.append(Detection((tx + float(nx), ty + float(ny)), frame_id))
    if rng.random() < model.false_positive_rate:
        # area-uniform inside the sensing sector
        r = model.max_range * math.sqrt(rng.random())
        b = rng.uniform(-model.fov_half_angle, model.fov_half_angle)
        out.append(Detection(cam.to_world(r * math.cos(b), r * math.sin(b)), frame_id))
    return out


def clamp_command(robot: RobotModel, command: MotionCommand) -> MotionCommand:
    vx, vy = command.vx, command.vy
    speed = math.hypot(vx, vy)
    if speed > robot.max_speed:
        k = robot.max_speed / speed
        vx, vy = vx * k, vy * k
    w = max(-robot.max_yaw_rate, min(robot.max_yaw_rate, command.vyaw))
    return MotionCommand(vx, vy, w)


def integrate(robot: RobotModel, command: MotionCommand, dt: float) -> RobotModel:
    """Advance the pose under a constant body-frame twist for ``dt`` seconds.

    The twist is integrated in closed form (circular arc), so splitting a
    step into pieces gives the same end pose.
    """
    if not dt > 0:
        raise InvalidParameter("dt must be positive")
    cmd = clamp_command(robot, command)
    p = robot.pose
    th0 = p.yaw
    w = cmd.vyaw
    if abs(w * dt) < 1e-12:
        thm = th0 + 0.5 * w * dt
        c, s = math.cos(thm) * dt, math.sin(thm) * dt
    else:
        th1 = th0 + w * dt
        c = (math.sin(th1) - math.sin(th0)) / w
        s = (math.cos(th0) - math.cos(th1)) / w
    x = p.x + c * cmd.vx - s * cmd.vy
    y = p.y + s * cmd.vx + c * cmd.vy
    return replace(robot, pose=Pose2D(x, y, th0 + w * dt))


@dataclass
class TrialRun:
    """Everything a finished simulation leaves behind."""

    world: VineyardWorld
    navigator: Navigator
    filter: FilterState
    robot: RobotModel
    sim_time: float
    frames: int
    poses: List[Pose2D] = field(default_factory=list)

    @property
    def row_done(self) -> bool:
        return isinstance(self.navigator.state, RowDone)


def simulate(world: VineyardWorld, robot: RobotModel, sensor: SensorModel,
             nav_config: NavConfig = NavConfig(), row_config: RowConfig = RowConfig(),
             filter_config: FilterConfig = FilterConfig(),
             rng: Optional[np.random.Generator] = None,
             dt: float = DT, max_time: float = 300.0,
             record_path: bool = False) -> TrialRun:
    """Run sense -> filter -> navigate -> integrate until the row is done."""
    if rng is None:
        rng = sensor.rng()
    nav = Navigator(nav_config, row_config)
    filt = FilterState(filter_config)
    poses = []
    frame = 0
    t = 0.0
    while t <= max_time:
        for det in sense(world, robot, sensor, rng, frame):
            filt.ingest(det)
        snap = Snapshot(tuple(filt.confirmed()), robot.pose, dt, t)
        state, cmd = nav.step(snap)
        if record_path:
            poses.append(robot.pose)
        if isinstance(state, RowDone):
            break
        robot = integrate(robot, cmd, dt)
        frame += 1
        t = frame * dt
    return TrialRun(world, nav, filt, robot, t, frame, poses)


def jittered_start(start: Sequence[float], jitter: Sequence[float],
                   rng: np.random.Generator) -> Pose2D:
    x, y, yaw = (float(v) for v in start)
    jx, jy, jyaw = (float(v) for v in jitter)
    if jx or jy or jyaw:
        dx, dy, dyaw = rng.uniform(-1.0, 1.0, 3)
        x, y, yaw = x + jx * dx, y + jy * dy, yaw + jyaw * dyaw
    return Pose2D(x, y, yaw)
