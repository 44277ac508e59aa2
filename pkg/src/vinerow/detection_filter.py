"""Rolling-average clustering of per-frame trunk detections.

Every detection either joins the first existing cluster whose square
membership box (half-width ``merge_radius``) contains it, updating that
cluster's position as an incremental mean, or starts a new cluster.
Clusters that have been observed more than ``confirm_threshold`` times
are considered confirmed trunks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, Tuple

from .errors import InvalidParameter


@dataclass(frozen=True)
class Detection:
    position: Tuple[float, float]
    source_frame_id: int = 0

    def __post_init__(self):
        x, y = self.position
        if not (math.isfinite(x) and math.isfinite(y)):
            raise InvalidParameter(f"non-finite detection {self.position!r}")
        object.__setattr__(self, "position", (float(x), float(y)))


@dataclass(frozen=True)
class DetectionCluster:
    id: int
    position: Tuple[float, float]
    count: int = 1

    @property
    def x(self) -> float:
        return self.position[0]

    @property
    def y(self) -> float:
        return self.position[1]


@dataclass(frozen=True)
class FilterConfig:
    merge_radius: float = 0.40
    confirm_threshold: int = 2

    def __post_init__(self):
        if not self.merge_radius > 0:
            raise InvalidParameter("merge_radius must be > 0")
        if self.confirm_threshold < 1:
            raise InvalidParameter("confirm_threshold must be >= 1")


def rolling_average(mean: float, count: int, sample: float) -> float:
    """One step of the incremental mean: (mean * count + sample) / (count + 1)."""
    return (mean * count + sample) / (count + 1.0)


def in_box(cluster: DetectionCluster, point: Tuple[float, float],
           half_width: float) -> bool:
    cx, cy = cluster.position
    px, py = point
    return (cx - half_width <= px <= cx + half_width
            and cy - half_width <= py <= cy + half_width)


@dataclass
class FilterState:
    """Clusters in ascending id (creation) order plus the id counter.

    A state has a single writer; copy it with :meth:`copy` before handing it
    to a second one.
    """

    config: FilterConfig = field(default_factory=FilterConfig)
    clusters: List[DetectionCluster] = field(default_factory=list)
    next_id: int = 0
    last_frame_id: int = -1

    def copy(self) -> "FilterState":
        return FilterState(self.config, list(self.clusters), self.next_id,
                           self.last_frame_id)

    def ingest(self, detection: Detection) -> DetectionCluster:
        """Fold one detection in; returns the cluster that changed."""
        if not isinstance(detection, Detection):
            detection = Detection(tuple(detection))
        px, py = detection.position
        self.last_frame_id = max(self.last_frame_id, detection.source_frame_id)
        r = self.config.merge_radius
        for i, c in enumerate(self.clusters):
            if in_box(c, (px, py), r):
                a = c.count
                updated = replace(
                    c,
                    position=(rolling_average(c.x, a, px), rolling_average(c.y, a, py)),
                    count=a + 1,
                )
                self.clusters[i] = updated
                return updated
        created = DetectionCluster(self.next_id, (px, py), 1)
        self.next_id += 1
        self.clusters.append(created)
        return created

    def confirmed(self) -> List[DetectionCluster]:
        k = self.config.confirm_threshold
        return [c for c in self.clusters if c.count > k]

    def get(self, cluster_id: int) -> DetectionCluster:
        for c in self.clusters:
            if c.id == cluster_id:
                return c
        raise KeyError(cluster_id)

    @property
    def total_count(self) -> int:
        return sum(c.count for c in self.clusters)


def ingest(detection: Detection, state: FilterState) -> FilterState:
    """Functional form of :meth:`FilterState.ingest`; ``state`` is left untouched."""
    new = state.copy()
    new.ingest(detection)
    return new


def confirmed(state: FilterState) -> List[DetectionCluster]:
    return state.confirmed()
