import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vinerow.errors import ContractViolation, InvalidParameter
from vinerow.geometry import (Pose2D, Vec2, distance, normalize_angle,
                              offset_waypoint, side_of_line, trunk_frame)

from oracles import rotation

coords = st.floats(-50, 50, allow_nan=False)
angles = st.floats(-10, 10, allow_nan=False)
offsets = st.floats(0.01, 5.0)


@pytest.mark.parametrize("angle, expected", [
    (0.0, 0.0),
    (math.pi, math.pi),
    (-math.pi, math.pi),
    (3 * math.pi, math.pi),
    (2 * math.pi + 0.5, 0.5),
    (-math.pi / 2, -math.pi / 2),
])
def test_normalize_angle(angle, expected):
    assert normalize_angle(angle) == pytest.approx(expected, abs=1e-12)


@given(angles)
def test_pose_yaw_is_normalized(a):
    yaw = Pose2D(0, 0, a).yaw
    assert -math.pi < yaw <= math.pi
    assert math.cos(yaw) == pytest.approx(math.cos(a), abs=1e-9)
    assert math.sin(yaw) == pytest.approx(math.sin(a), abs=1e-9)


def test_pose_rejects_non_finite():
    with pytest.raises(InvalidParameter):
        Pose2D(float("nan"), 0.0)
    with pytest.raises(InvalidParameter):
        Pose2D(0.0, float("inf"))


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_unit_vector_norm(dx, dy):
    if math.hypot(dx, dy) < 1e-6:
        return
    assert abs(Vec2.unit(dx, dy).norm - 1.0) <= 1e-12


def test_unit_of_zero_vector():
    with pytest.raises(InvalidParameter):
        Vec2.unit(0.0, 0.0)


# -- trunk_frame

@pytest.mark.parametrize("trunk, row_dir, yaw", [
    ((0, 0), Vec2(1, 0), 0.0),
    ((2, 3), Vec2(0, 1), math.pi / 2),
    ((1, 1), Vec2(-1, 0), math.pi),
])
def test_trunk_frame(trunk, row_dir, yaw):
    f = trunk_frame(trunk, row_dir)
    assert (f.x, f.y) == trunk
    assert f.yaw == pytest.approx(yaw, abs=1e-15)


def test_trunk_frame_rejects_non_unit():
    with pytest.raises(ContractViolation):
        trunk_frame((0, 0), Vec2(2.0, 0.0))
    # within tolerance is accepted
    trunk_frame((0, 0), Vec2(1.0 + 1e-10, 0.0))


def test_trunk_frame_accepts_pose():
    f = trunk_frame(Pose2D(4, 5, 1.0), Vec2(0, -1))
    assert (f.x, f.y, f.yaw) == (4, 5, pytest.approx(-math.pi / 2))


# -- offset_waypoint

def test_offset_axis_aligned():
    f = Pose2D(0, 0, 0)
    left = offset_waypoint(f, 1.0, "left")
    right = offset_waypoint(f, 1.0, "right")
    assert (left.x, left.y, left.yaw) == (0, 1, 0)
    assert (right.x, right.y, right.yaw) == (0, -1, 0)


def test_offset_rotated_frame_matches_rotation_matrix():
    expected = rotation(math.pi / 2) @ np.array([0.0, 0.8]) + np.array([5.0, 5.0])
    wp = offset_waypoint(Pose2D(5, 5, math.pi / 2), 0.8, "left")
    assert wp.x == pytest.approx(4.2, abs=1e-12)
    assert wp.y == pytest.approx(5.0, abs=1e-12)
    assert (wp.x, wp.y) == pytest.approx(tuple(expected), abs=1e-12)
    assert wp.yaw == pytest.approx(math.pi / 2)


@pytest.mark.parametrize("d", [0.0, -1.0, float("nan")])
def test_offset_rejects_nonpositive(d):
    with pytest.raises(InvalidParameter):
        offset_waypoint(Pose2D(0, 0, 0), d, "left")


def test_offset_rejects_bad_side():
    with pytest.raises(InvalidParameter):
        offset_waypoint(Pose2D(0, 0, 0), 1.0, "up")


def test_along_row_offset():
    wp = offset_waypoint(Pose2D(1, 1, math.pi / 2), 1.0, "right", along=0.35)
    assert (wp.x, wp.y) == pytest.approx((2.0, 1.35))


@given(coords, coords, angles, offsets, st.sampled_from(["left", "right"]))
def test_offset_distance_and_perpendicularity(x, y, a, d, side):
    u = Vec2.from_angle(a)
    wp = offset_waypoint(trunk_frame((x, y), u), d, side)
    assert abs(distance(wp, (x, y)) - d) <= 1e-9
    assert abs(u.dot(Vec2(wp.x - x, wp.y - y))) <= 1e-9
    assert wp.yaw == pytest.approx(normalize_angle(a), abs=1e-12)


@given(coords, coords, angles, offsets)
def test_left_right_are_reflections(x, y, a, d):
    f = trunk_frame((x, y), Vec2.from_angle(a))
    left = offset_waypoint(f, d, "left")
    right = offset_waypoint(f, d, "right")
    assert ((left.x + right.x) / 2, (left.y + right.y) / 2) == pytest.approx((x, y), abs=1e-9)
    assert side_of_line(left, (x, y), f.heading) > 0 > side_of_line(right, (x, y), f.heading)


@given(coords, coords, angles, angles, offsets, st.sampled_from(["left", "right"]))
def test_rotation_equivariance(x, y, a, theta, d, side):
    R = rotation(theta)
    wp = offset_waypoint(trunk_frame((x, y), Vec2.from_angle(a)), d, side)
    rx, ry = R @ np.array([x, y])
    rwp = offset_waypoint(trunk_frame((rx, ry), Vec2.from_angle(a + theta)), d, side)
    expected = R @ np.array([wp.x, wp.y])
    assert (rwp.x, rwp.y) == pytest.approx(tuple(expected), abs=1e-9)


# -- distance

@pytest.mark.parametrize("a, b, expected", [
    ((0, 0), (3, 4), 5.0),
    ((1, 1), (1, 1), 0.0),
    ((0, 0), (0.8, 0), 0.8),
])
def test_distance(a, b, expected):
    assert distance(a, b) == expected
    assert distance(b, a) == expected


def test_local_world_roundtrip():
    p = Pose2D(1.0, -2.0, 0.7)
    assert p.to_world(*p.to_local(3.0, 4.0)) == pytest.approx((3.0, 4.0))
