"""Row-line candidates from confirmed trunk clusters.

Collinearity is judged by perpendicular distance in meters: the
displacement determinant ``det[p_j - p_i, p_k - p_i]`` divided by
``|p_j - p_i|``. Lines are enumerated by seeding with every cluster pair,
absorbing all clusters close to the seed line and pruning until the
total-least-squares fit keeps every member within ``epsilon``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .detection_filter import DetectionCluster
from .errors import DegeneratePair, InvalidParameter, NoRowFound, RowLost
from .geometry import Pose2D, Vec2, distance

# Floating-point slack when checking fitted lines, so that exactly collinear
# rows still pass at epsilon = 0 after rotation.
FIT_SLACK = 1e-9


@dataclass(frozen=True)
class RowConfig:
    epsilon: float = 0.10
    min_line_size: int = 3

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise InvalidParameter("epsilon must be >= 0")
        if self.min_line_size < 2:
            raise InvalidParameter("min_line_size must be >= 2")


@dataclass(frozen=True)
class LineCandidate:
    """Collinear clusters ordered by their projection onto ``direction``.

    ``origin`` is the centroid of the members and lies on the fitted line.
    """

    member_ids: Tuple[int, ...]
    direction: Vec2
    length: float
    rms_perp_error: float
    origin: Tuple[float, float] = (0.0, 0.0)

    def perpendicular_distance(self, point) -> float:
        px, py = point
        ox, oy = self.origin
        return abs(self.direction.cross(Vec2(px - ox, py - oy)))

    def projection(self, point) -> float:
        px, py = point
        ox, oy = self.origin
        return self.direction.dot(Vec2(px - ox, py - oy))


@dataclass(frozen=True)
class RowEstimate:
    line: LineCandidate
    anchor_id: int

    def __post_init__(self):
        if self.anchor_id not in self.line.member_ids:
            raise InvalidParameter("anchor must be a member of the line")

    @property
    def direction(self) -> Vec2:
        return self.line.direction


def determinant(p_i, p_j) -> float:
    """Literal 2x2 determinant of two absolute positions, det[[Xi, Xj], [Yi, Yj]]."""
    return p_i[0] * p_j[1] - p_j[0] * p_i[1]


def perpendicular_distance(p_i, p_j, p_k) -> float:
    """Distance from ``p_k`` to the infinite line through ``p_i`` and ``p_j``."""
    ux, uy = p_j[0] - p_i[0], p_j[1] - p_i[1]
    base = math.hypot(ux, uy)
    if base == 0.0:
        raise DegeneratePair(f"points {tuple(p_i)} and {tuple(p_j)} coincide")
    vx, vy = p_k[0] - p_i[0], p_k[1] - p_i[1]
    return abs(ux * vy - uy * vx) / base


def collinear(p_i, p_j, p_k, epsilon: float) -> bool:
    return perpendicular_distance(p_i, p_j, p_k) <= epsilon


def canonical_direction(dx: float, dy: float) -> Vec2:
    """Unit vector with a fixed sign convention: dx > 0, or dx == 0 and dy > 0."""
    if dx < 0.0 or (dx == 0.0 and dy < 0.0):
        dx, dy = -dx, -dy
    return Vec2.unit(dx, dy)


def fit_line(points) -> Tuple[Tuple[float, float], Vec2]:
    """Total-least-squares line: centroid and principal axis (canonical sign)."""
    pts = np.asarray(points, dtype=float)
    centroid = pts.mean(axis=0)
    centered = pts - centroid
    scatter = centered.T @ centered
    _, vecs = np.linalg.eigh(scatter)
    axis = vecs[:, -1]
    return (float(centroid[0]), float(centroid[1])), canonical_direction(
        float(axis[0]), float(axis[1]))


def _candidate(members: Sequence[DetectionCluster], origin, direction: Vec2) -> LineCandidate:
    ox, oy = origin

    def proj(c):
        return direction.dx * (c.x - ox) + direction.dy * (c.y - oy)

    ordered = sorted(members, key=lambda c: (proj(c), c.id))
    perp = [direction.cross(Vec2(c.x - ox, c.y - oy)) for c in ordered]
    rms = math.sqrt(sum(e * e for e in perp) / len(perp))
    return LineCandidate(
        member_ids=tuple(c.id for c in ordered),
        direction=direction,
        length=distance(ordered[0].position, ordered[-1].position),
        rms_perp_error=rms,
        origin=(ox, oy),
    )


def fit_candidate(members: Sequence[DetectionCluster],
                  reference: Optional[Vec2] = None) -> LineCandidate:
    """Fit a line through ``members``; if ``reference`` is given keep its sign."""
    origin, direction = fit_line([c.position for c in members])
    if reference is not None and direction.dot(reference) < 0:
        direction = -direction
    return _candidate(members, origin, direction)


def _prune_to_fit(members: List[DetectionCluster], epsilon: float,
                  min_size: int) -> Optional[LineCandidate]:
    members = list(members)
    while len(members) >= min_size:
        cand = fit_candidate(members)
        dists = [cand.perpendicular_distance(c.position) for c in members]
        worst = max(range(len(members)), key=lambda i: (dists[i], -members[i].id))
        if dists[worst] <= epsilon + FIT_SLACK:
            return cand
        del members[worst]
    return None


def enumerate_lines(clusters: Sequence[DetectionCluster],
                    config: RowConfig = RowConfig()) -> List[LineCandidate]:
    """All maximal collinear cluster subsets of at least ``min_line_size`` members.

    Sorted by length, then member ids.
    """
    clusters = sorted(clusters, key=lambda c: c.id)
    if len(clusters) < config.min_line_size:
        return []
    eps = config.epsilon
    found = {}
    for a, b in itertools.combinations(clusters, 2):
        if a.position == b.position:
            continue
        near = [c for c in clusters
                if perpendicular_distance(a.position, b.position, c.position)
                <= eps + FIT_SLACK]
        if len(near) < config.min_line_size:
            continue
        key = frozenset(c.id for c in near)
        if key in found:
            continue
        found[key] = _prune_to_fit(near, eps, config.min_line_size)

    by_members = {}
    for cand in found.values():
        if cand is not None:
            by_members.setdefault(frozenset(cand.member_ids), cand)
    sets = list(by_members)
    maximal = [by_members[s] for s in sets if not any(s < t for t in sets)]
    maximal.sort(key=lambda c: (c.length, c.member_ids))
    return maximal


def closest_cluster(clusters: Iterable[DetectionCluster], robot) -> DetectionCluster:
    return min(clusters, key=lambda c: (distance(c.position, robot), c.id))


def select_initial_row(candidates: Sequence[LineCandidate],
                       clusters: Sequence[DetectionCluster],
                       robot: Pose2D) -> RowEstimate:
    """Pick the starting row through the trunk nearest the robot.

    Among candidates containing that trunk, those where it is an end point
    are preferred; the shortest such line wins, since a row is expected to
    be shorter than a diagonal spanning two rows.
    """
    if not candidates:
        raise NoRowFound("no line candidates")
    if not clusters:
        raise NoRowFound("no clusters")
    gp = closest_cluster(clusters, robot)
    through = [c for c in candidates if gp.id in c.member_ids]
    if not through:
        raise NoRowFound(f"no candidate line contains closest trunk {gp.id}")
    at_end = [c for c in through if gp.id in (c.member_ids[0], c.member_ids[-1])]
    pool = at_end or through
    anchor_dist = distance(gp.position, robot)
    best = min(pool, key=lambda c: (c.length, anchor_dist, c.member_ids))
    return RowEstimate(best, gp.id)


def refresh_row(estimate: RowEstimate, clusters: Sequence[DetectionCluster],
                config: RowConfig = RowConfig()) -> RowEstimate:
    """Refit the row through every cluster within epsilon of the current line.

    The direction keeps its sign; the anchor is kept while it remains a
    member, otherwise the first member becomes the anchor.
    """
    line = estimate.line
    members = [c for c in sorted(clusters, key=lambda c: c.id)
               if line.perpendicular_distance(c.position) <= config.epsilon + FIT_SLACK]
    if len(members) < 2:
        raise RowLost(f"only {len(members)} cluster(s) left near the row")
    cand = fit_candidate(members, reference=line.direction)
    anchor = estimate.anchor_id if estimate.anchor_id in cand.member_ids else cand.member_ids[0]
    return RowEstimate(cand, anchor)
