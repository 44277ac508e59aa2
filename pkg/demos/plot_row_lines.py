"""
Finding the row in a cloud of trunks
====================================

Two parallel rows and a stray point. Every set of at least three trunks that
lies within 10 cm of a common line is a candidate row; the robot picks the
shortest one through the trunk nearest to it.
"""

from vinerow.detection_filter import DetectionCluster
from vinerow.geometry import Pose2D
from vinerow.row_estimation import enumerate_lines, select_initial_row

points = [(0.0, 0.0), (0.8, 0.02), (1.6, -0.01), (2.4, 0.0),
          (0.0, 2.0), (0.8, 2.03), (1.6, 2.0),
          (1.1, 1.0)]
clusters = [DetectionCluster(i, p, 3) for i, p in enumerate(points)]

candidates = enumerate_lines(clusters)
for c in candidates:
    print(f"members {c.member_ids}  length {c.length:.2f} m  "
          f"angle {c.direction.angle:+.4f} rad  rms {c.rms_perp_error * 100:.1f} cm")

robot = Pose2D(-1.5, 2.6, 0.0)
row = select_initial_row(candidates, clusters, robot)
print(f"robot at ({robot.x}, {robot.y}) follows row {row.line.member_ids}, "
      f"starting from trunk {row.anchor_id}")
