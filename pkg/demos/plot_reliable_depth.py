"""
Depth at a pixel with holes in the depth map
============================================

Stereo depth maps have holes. Reading depth at a detected pixel averages
the valid values in a small window and widens the window until something
valid is found. The point is then back-projected with the pinhole model.
"""

import numpy as np

from vinerow.depth_projection import (CameraIntrinsics, DepthImage, project,
                                      reliable_depth, window_depth)

rng = np.random.default_rng(1)
k = CameraIntrinsics(fx=380.0, fy=380.0, cx=160.0, cy=120.0)

# a trunk 1.8 m away in front of a 4 m background, with 70% of pixels missing
data = np.full((240, 320), 4.0)
data[:, 150:175] = 1.8
data[rng.random(data.shape) < 0.7] = np.nan
img = DepthImage(data)

u, v = 162, 100
z, windows = window_depth(u, v, img)
p = reliable_depth(u, v, img, k)
print(f"pixel ({u}, {v}) valid: {not np.isnan(data[v, u])}")
print(f"depth {z:.3f} m after {windows} window(s)")
print(f"camera-frame point ({p.x:+.3f}, {p.y:+.3f}, {p.z:.3f}) m")
print("projected back to", tuple(round(c, 6) for c in project(p, k)))
