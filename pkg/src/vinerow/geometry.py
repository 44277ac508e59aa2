"""Planar poses and the trunk-centred frame used to place waypoints.

All angles are radians, counter-clockwise positive, x forward / y left.
Headings are kept in the half-open interval (-pi, pi].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Tuple

from .errors import ContractViolation, InvalidParameter

Side = Literal["left", "right"]

UNIT_TOLERANCE = 1e-9


def normalize_angle(angle: float) -> float:
    """Wrap ``angle`` into (-pi, pi].

    Parameters
    ----------
    angle : float
        Angle in radians.

    Returns
    -------
    float
        Equivalent angle in (-pi, pi]; -pi itself maps to +pi.
    """
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


def _check_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise InvalidParameter(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class Vec2:
    dx: float
    dy: float

    @classmethod
    def unit(cls, dx: float, dy: float) -> "Vec2":
        """Normalized copy of (dx, dy); zero vectors are rejected."""
        n = math.hypot(dx, dy)
        if n == 0.0 or not math.isfinite(n):
            raise InvalidParameter(f"cannot normalize vector ({dx}, {dy})")
        return cls(dx / n, dy / n)

    @classmethod
    def from_angle(cls, angle: float) -> "Vec2":
        return cls(math.cos(angle), math.sin(angle))

    @property
    def norm(self) -> float:
        return math.hypot(self.dx, self.dy)

    @property
    def angle(self) -> float:
        return math.atan2(self.dy, self.dx)

    def dot(self, other: "Vec2") -> float:
        return self.dx * other.dx + self.dy * other.dy

    def cross(self, other: "Vec2") -> float:
        """z-component of the 3D cross product; > 0 if ``other`` is to the left."""
        return self.dx * other.dy - self.dy * other.dx

    def perpendicular(self) -> "Vec2":
        """Rotate by +90 degrees (points to the left of this vector)."""
        return Vec2(-self.dy, self.dx)

    def __neg__(self) -> "Vec2":
        return Vec2(-self.dx, -self.dy)

    def __mul__(self, k: float) -> "Vec2":
        return Vec2(self.dx * k, self.dy * k)

    __rmul__ = __mul__


@dataclass(frozen=True)
class Pose2D:
    x: float
    y: float
    yaw: float = 0.0

    def __post_init__(self) -> None:
        _check_finite(x=self.x, y=self.y, yaw=self.yaw)
        object.__setattr__(self, "yaw", normalize_angle(self.yaw))

    @property
    def position(self) -> Tuple[float, float]:
        return (self.x, self.y)

    @property
    def heading(self) -> Vec2:
        return Vec2.from_angle(self.yaw)

    def to_local(self, x: float, y: float) -> Tuple[float, float]:
        """Express the world point (x, y) in this pose's frame."""
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        ex, ey = x - self.x, y - self.y
        return (c * ex + s * ey, -s * ex + c * ey)

    def to_world(self, x: float, y: float) -> Tuple[float, float]:
        """Express the local point (x, y) in the world frame."""
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        return (self.x + c * x - s * y, self.y + s * x + c * y)


def _xy(p) -> Tuple[float, float]:
    if isinstance(p, Pose2D):
        return p.x, p.y
    x, y = p
    return float(x), float(y)


def distance(a, b) -> float:
    """Euclidean distance between two positions (poses or (x, y) pairs)."""
    ax, ay = _xy(a)
    bx, by = _xy(b)
    return math.hypot(bx - ax, by - ay)


def trunk_frame(trunk, row_dir: Vec2) -> Pose2D:
    """Frame centred on a trunk with its x-axis along the row direction."""
    if abs(row_dir.norm - 1.0) > UNIT_TOLERANCE:
        raise ContractViolation(
            f"row direction must be a unit vector, got norm {row_dir.norm!r}")
    x, y = _xy(trunk)
    return Pose2D(x, y, math.atan2(row_dir.dy, row_dir.dx))


def offset_waypoint(frame: Pose2D, d: float, side: Side,
                    along: float = 0.0) -> Pose2D:
    """Waypoint abeam of the trunk at lateral distance ``d``.

    The returned pose keeps the frame's heading, so the robot faces along
    the row with the trunk on its flank. ``along`` shifts the waypoint
    along the row (positive = frame +x) without changing the lateral
    distance.

    Parameters
    ----------
    frame : Pose2D
        Trunk-centred frame from :func:`trunk_frame`.
    d : float
        Lateral offset in meters, must be > 0.
    side : {"left", "right"}
        Half-plane relative to the frame's heading.
    along : float, optional
        Along-row offset in meters.

    Returns
    -------
    Pose2D
    """
    if not (d > 0.0) or not math.isfinite(d):
        raise InvalidParameter(f"offset d must be positive, got {d!r}")
    if side == "left":
        lateral = d
    elif side == "right":
        lateral = -d
    else:
        raise InvalidParameter(f"side must be 'left' or 'right', got {side!r}")
    x, y = frame.to_world(along, lateral)
    return Pose2D(x, y, frame.yaw)


def side_of_line(point, origin, direction: Vec2) -> float:
    """Signed perpendicular offset of ``point`` from the line; > 0 means left."""
    px, py = _xy(point)
    ox, oy = _xy(origin)
    return direction.cross(Vec2(px - ox, py - oy)) / direction.norm
