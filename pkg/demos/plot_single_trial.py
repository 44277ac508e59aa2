"""
One simulated pass along a row
==============================

A robot starts two metres before a row of five trunks, finds the row, and
steps from trunk to trunk, pausing at each for the pruning task. The figure
shows its path and the ideal waypoints one metre from the row.
"""

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from vinerow.geometry import Pose2D
from vinerow.simulator import RobotModel, SensorModel, VineyardWorld, simulate

world = VineyardWorld.rows(5, 0.8)
sensor = SensorModel(position_noise_sigma=0.03, false_positive_rate=0.05, miss_rate=0.1)
run = simulate(world, RobotModel(Pose2D(-2.0, 1.0, 0.0)), sensor,
               rng=np.random.default_rng(3), record_path=True)

for e in run.navigator.events:
    print(f"{e['t']:6.1f}s  {e['state']:<13} cluster {e['target']}")
for v in run.navigator.visits:
    print(f"cluster {v.cluster_id}: error {v.error * 100:.2f} cm vs the estimated waypoint")

path = np.array([(p.x, p.y) for p in run.poses])
trunks = np.array(world.trunks)
fig, ax = plt.subplots(figsize=(7, 3))
ax.plot(path[:, 0], path[:, 1], lw=1, label="robot path")
ax.scatter(trunks[:, 0], trunks[:, 1], c="saddlebrown", label="trunks")
ax.scatter(trunks[:, 0], trunks[:, 1] + 1.0, marker="x", c="k", label="ideal waypoints")
ax.set_aspect("equal")
ax.legend(loc="lower right", fontsize="small")
fig.savefig("single_trial.svg")
print("wrote single_trial.svg")
