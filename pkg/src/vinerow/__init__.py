"""Waypoint generation for navigating along vineyard rows.

Trunk detections are clustered with a rolling average, confirmed clusters
are grouped into row lines, and waypoints are placed at a lateral offset
from each trunk. A small 2D simulator and trial harness exercise the whole
loop.
"""

from .detection_filter import (Detection, DetectionCluster, FilterConfig,
                               FilterState, confirmed, ingest)
from .depth_projection import (CameraIntrinsics, DepthImage, Point3D, project,
                               read_pfm, reliable_depth, write_pfm)
from .errors import (BehindCamera, ConfigError, ContractViolation,
                     DegeneratePair, InvalidParameter, NoRowFound,
                     NoValidDepth, RowLost, TraceError, VinerowError)
from .geometry import Pose2D, Vec2, distance, offset_waypoint, trunk_frame
from .navigator import (Approach, InitialSearch, MotionCommand, NavConfig,
                        Navigator, RowDone, RowFit, Snapshot, TaskPause,
                        VisitLog, waypoint_for)
from .row_estimation import (LineCandidate, RowConfig, RowEstimate, collinear,
                             enumerate_lines, refresh_row, select_initial_row)
from .simulator import (RobotModel, SensorModel, VineyardWorld, integrate,
                        sense, simulate)

__version__ = "0.1.0"
