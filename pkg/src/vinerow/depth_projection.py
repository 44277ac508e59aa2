"""NaN-robust depth lookup and pinhole (back-)projection.

The depth at a pixel is the mean of the valid (non-NaN) values in a square
window centred on it. The window starts at half-width ``N_PIXELS`` and grows
by ``N_PIXELS`` per iteration, clipped to the image, until it holds at least
one valid value or covers the whole image.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Tuple

import numpy as np

from .errors import BehindCamera, InvalidParameter, NoValidDepth

N_PIXELS = 2


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise InvalidParameter("focal lengths must be positive")

    @classmethod
    def from_k(cls, k) -> "CameraIntrinsics":
        """From a row-major 3x3 camera matrix (9 values or nested)."""
        k = np.asarray(k, dtype=float).reshape(3, 3)
        return cls(fx=k[0, 0], fy=k[1, 1], cx=k[0, 2], cy=k[1, 2])


@dataclass(frozen=True)
class Point3D:
    x: float
    y: float
    z: float

    def __iter__(self):
        return iter((self.x, self.y, self.z))


class DepthImage:
    """Row-major depth grid in meters; NaN marks an invalid pixel."""

    def __init__(self, data):
        arr = np.array(data, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise InvalidParameter(f"depth image must be a non-empty 2D grid, got shape {arr.shape}")
        valid = arr[~np.isnan(arr)]
        if np.any(~np.isfinite(valid)) or np.any(valid <= 0):
            raise InvalidParameter("valid depth values must be finite and > 0")
        arr.setflags(write=False)
        self.data = arr

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @classmethod
    def from_zero_invalid(cls, data) -> "DepthImage":
        """For sensors that report 0 for missing depth."""
        arr = np.array(data, dtype=np.float64)
        arr[arr == 0] = np.nan
        return cls(arr)


def window_bounds(x: int, y: int, i: int, h: int, w: int) -> Tuple[int, int, int, int]:
    """Inclusive (min_y, max_y, min_x, max_x) of iteration ``i``, clipped."""
    r = i * N_PIXELS
    return (min(max(y - r, 0), h - 1), min(max(y + r, 0), h - 1),
            min(max(x - r, 0), w - 1), min(max(x + r, 0), w - 1))


def iter_windows(x: int, y: int, h: int, w: int) -> Iterator[Tuple[int, Tuple[int, int, int, int]]]:
    """Successive windows until one covers the whole image."""
    i = 1
    while True:
        b = window_bounds(x, y, i, h, w)
        yield i, b
        if b == (0, h - 1, 0, w - 1):
            return
        i += 1


def window_depth(x: int, y: int, depth: DepthImage) -> Tuple[float, int]:
    """Mean valid depth around (x, y) and the iteration that produced it."""
    h, w = depth.data.shape
    if not (0 <= x < w and 0 <= y < h):
        raise InvalidParameter(f"pixel ({x}, {y}) outside {w}x{h} image")
    for i, (y0, y1, x0, x1) in iter_windows(x, y, h, w):
        sub = depth.data[y0:y1 + 1, x0:x1 + 1]
        if not np.isnan(sub).all():
            return float(np.nanmean(sub)), i
    raise NoValidDepth("depth image has no valid pixels")


def reliable_depth(x: int, y: int, depth: DepthImage,
                   intrinsics: CameraIntrinsics) -> Point3D:
    """Back-project pixel (x, y) using the nearest valid depth window."""
    x, y = _as_pixel(x), _as_pixel(y)
    z, _ = window_depth(x, y, depth)
    return back_project(x, y, z, intrinsics)


def back_project(x: float, y: float, z: float, intrinsics: CameraIntrinsics) -> Point3D:
    return Point3D((x - intrinsics.cx) * z / intrinsics.fx,
                   (y - intrinsics.cy) * z / intrinsics.fy,
                   z)


def project(point: Point3D, intrinsics: CameraIntrinsics) -> Tuple[float, float]:
    if not point.z > 0:
        raise BehindCamera(f"point has non-positive depth {point.z!r}")
    return (point.x * intrinsics.fx / point.z + intrinsics.cx,
            point.y * intrinsics.fy / point.z + intrinsics.cy)


def _as_pixel(v) -> int:
    if isinstance(v, (int, np.integer)):
        return int(v)
    if float(v).is_integer():
        return int(v)
    raise InvalidParameter(f"pixel coordinates must be integers, got {v!r}")


# -- file formats ----------------------------------------------------------

def read_pfm(path) -> np.ndarray:
    """Read a single-channel PFM file into an (h, w) float array, top row first."""
    with open(path, "rb") as f:
        header = f.readline().decode("ascii").strip()
        if header == "PF":
            raise InvalidParameter("colour PFM files are not depth images")
        if header != "Pf":
            raise InvalidParameter(f"not a PFM file: header {header!r}")
        dims = f.readline().decode("ascii").split()
        # some writers put width and height on separate lines
        while len(dims) < 2:
            dims += f.readline().decode("ascii").split()
        width, height = int(dims[0]), int(dims[1])
        scale = float(f.readline().decode("ascii").strip())
        endian = "<" if scale < 0 else ">"
        data = np.fromfile(f, dtype=endian + "f4")
    if data.size != width * height:
        raise InvalidParameter(
            f"PFM payload has {data.size} values, expected {width * height}")
    # PFM stores rows bottom to top
    return np.flipud(data.reshape(height, width)).astype(np.float64)


def write_pfm(path, image) -> None:
    """Write an (h, w) array as little-endian single-channel PFM."""
    arr = np.asarray(image, dtype="<f4")
    if arr.ndim != 2:
        raise InvalidParameter("PFM writer expects a 2D array")
    h, w = arr.shape
    with open(path, "wb") as f:
        f.write(f"Pf\n{w} {h}\n-1.0\n".encode("ascii"))
        f.write(np.ascontiguousarray(np.flipud(arr)).tobytes())


def read_intrinsics(path) -> CameraIntrinsics:
    """Sidecar text file holding ``fx fy cx cy``; '#' starts a comment."""
    values = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0]
        values.extend(line.split())
    if len(values) != 4:
        raise InvalidParameter(f"{path}: expected 4 values (fx fy cx cy), got {len(values)}")
    try:
        fx, fy, cx, cy = (float(v) for v in values)
    except ValueError as exc:
        raise InvalidParameter(f"{path}: {exc}") from None
    return CameraIntrinsics(fx, fy, cx, cy)


def write_intrinsics(path, intrinsics: CameraIntrinsics) -> None:
    Path(path).write_text(
        f"{intrinsics.fx!r} {intrinsics.fy!r} {intrinsics.cx!r} {intrinsics.cy!r}\n")


def load_depth(image_path, intrinsics_path) -> Tuple[DepthImage, CameraIntrinsics]:
    return DepthImage(read_pfm(image_path)), read_intrinsics(intrinsics_path)
