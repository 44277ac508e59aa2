"""Independent reference computations used by the tests.

None of these import the code paths they check.
"""

import itertools
import math

import numpy as np


def rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def point_line_distance(p, q, r):
    """Distance from r to line pq via the implicit form a*x + b*y + c = 0."""
    a = q[1] - p[1]
    b = p[0] - q[0]
    c = -(a * p[0] + b * p[1])
    return abs(a * r[0] + b * r[1] + c) / math.sqrt(a * a + b * b)


def projection_residual(p, q, r):
    """Distance from r to line pq as the norm of the rejection from the line."""
    u = np.subtract(q, p, dtype=float)
    u /= np.linalg.norm(u)
    v = np.subtract(r, p, dtype=float)
    return float(np.linalg.norm(v - v.dot(u) * u))


def tls_angle(xs, ys):
    """Closed-form orientation of the total-least-squares line."""
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    mx, my = xs.mean(), ys.mean()
    sxx = ((xs - mx) ** 2).sum()
    syy = ((ys - my) ** 2).sum()
    sxy = ((xs - mx) * (ys - my)).sum()
    return 0.5 * math.atan2(2.0 * sxy, sxx - syy)


def fits_within(points, eps):
    """True if every point is within eps of the TLS line through all of them."""
    xs, ys = zip(*points)
    th = tls_angle(xs, ys)
    mx, my = np.mean(xs), np.mean(ys)
    n = (-math.sin(th), math.cos(th))
    return all(abs((x - mx) * n[0] + (y - my) * n[1]) <= eps + 1e-9 for x, y in points)


def brute_force_lines(points, eps, min_size=3):
    """Every maximal subset (by index) whose TLS fit keeps all points within eps."""
    n = len(points)
    good = []
    for k in range(min_size, n + 1):
        for combo in itertools.combinations(range(n), k):
            if fits_within([points[i] for i in combo], eps):
                good.append(frozenset(combo))
    return {s for s in good if not any(s < t for t in good)}


def explicit_window_depth(image, x, y, n_pixels=2):
    """Grow clipped square windows by copying pixels one at a time."""
    h, w = image.shape
    i = 1
    while True:
        r = i * n_pixels
        rows = range(max(0, y - r), min(h - 1, y + r) + 1)
        cols = range(max(0, x - r), min(w - 1, x + r) + 1)
        window = np.array([[image[yy, xx] for xx in cols] for yy in rows])
        if np.count_nonzero(~np.isnan(window)):
            return float(np.nanmean(window))
        if len(rows) == h and len(cols) == w:
            return math.nan
        i += 1
