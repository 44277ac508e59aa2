"""
Merging noisy trunk detections
==============================

Each frame gives a handful of noisy trunk positions. Detections that land in
the box around an existing cluster update its rolling average; the rest start
new clusters. Only clusters seen more than twice are trusted.
"""

import numpy as np

from vinerow.detection_filter import Detection, FilterState

rng = np.random.default_rng(0)
trunks = np.array([[0.0, 0.0], [0.8, 0.0], [1.6, 0.0]])

state = FilterState()
for frame in range(6):
    for t in trunks:
        # drop one detection in five
        if rng.random() < 0.2:
            continue
        state.ingest(Detection(tuple(t + rng.normal(0, 0.03, 2)), frame))
    # a stray false positive now and then
    if frame == 2:
        state.ingest(Detection((0.4, 1.5), frame))

for c in state.clusters:
    print(f"cluster {c.id}: ({c.position[0]:+.3f}, {c.position[1]:+.3f})  seen {c.count}x")

# the stray point never reaches the confirmation threshold
print("confirmed:", [c.id for c in state.confirmed()])
