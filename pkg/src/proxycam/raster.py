"""Raster primitives: frames, silhouette rasterization, compositing.

Frames are plain numpy arrays of shape (H, W, 3), dtype uint8, row-major.
Silhouettes are built from filled capsules (distance-to-segment fields) and
discs, with no antialiasing, so every rendering decision is a hard pixel
test and repeated renders are byte-identical.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError


def validate_frame(frame: np.ndarray, name: str = "frame") -> np.ndarray:
    frame = np.asarray(frame)
    if frame.ndim != 3 or frame.shape[2] != 3 or frame.dtype != np.uint8:
        raise ValidationError(
            f"{name} must be an (H, W, 3) uint8 array, got shape "
            f"{frame.shape} dtype {frame.dtype}"
        )
    return frame


def validate_mask(mask: np.ndarray, frame: np.ndarray, name: str = "mask") -> np.ndarray:
    mask = np.asarray(mask)
    if mask.shape != frame.shape[:2]:
        raise ValidationError(
            f"{name} shape {mask.shape} does not match frame {frame.shape[:2]}"
        )
    return mask.astype(bool, copy=False)


def _segment_distance(py, px, ay, ax, by, bx):
    """Distance from grid points (py, px) to segment (a, b)."""
    dy, dx = by - ay, bx - ax
    seg_len2 = dy * dy + dx * dx
    if seg_len2 <= 0.0:
        return np.hypot(py - ay, px - ax)
    t = ((py - ay) * dy + (px - ax) * dx) / seg_len2
    t = np.clip(t, 0.0, 1.0)
    return np.hypot(py - (ay + t * dy), px - (ax + t * dx))


class SilhouetteCanvas:
    """Accumulates capsules and discs into a boolean patch.

    The patch covers [y0, y0+h) x [x0, x0+w) in frame coordinates; shapes
    falling outside are clipped.
    """

    def __init__(self, x0: int, y0: int, width: int, height: int):
        self.x0 = x0
        self.y0 = y0
        self.mask = np.zeros((height, width), dtype=bool)
        ys = np.arange(y0, y0 + height, dtype=np.float64)
        xs = np.arange(x0, x0 + width, dtype=np.float64)
        # pixel centers at integer + 0.5
        self._py, self._px = np.meshgrid(ys + 0.5, xs + 0.5, indexing="ij")

    def add_capsule(self, a, b, radius: float) -> None:
        if radius <= 0:
            return
        d = _segment_distance(self._py, self._px, a[1], a[0], b[1], b[0])
        self.mask |= d <= radius

    def add_disc(self, center, radius: float) -> None:
        if radius <= 0:
            return
        d = np.hypot(self._py - center[1], self._px - center[0])
        self.mask |= d <= radius


def erode4(mask: np.ndarray) -> np.ndarray:
    """4-neighborhood erosion with a False border."""
    out = mask.copy()
    out[1:, :] &= mask[:-1, :]
    out[:-1, :] &= mask[1:, :]
    out[:, 1:] &= mask[:, :-1]
    out[:, :-1] &= mask[:, 1:]
    return out


def outline_of(mask: np.ndarray) -> np.ndarray:
    """One-pixel inner boundary of a boolean mask."""
    return mask & ~erode4(mask)


def paste_rgba(dst: np.ndarray, patch: np.ndarray, x0: int, y0: int) -> None:
    """Paint the opaque pixels of an RGBA patch onto an RGB frame in place.

    Alpha is binary by construction (0 or 255); opaque pixels overwrite.
    """
    h, w = patch.shape[:2]
    H, W = dst.shape[:2]
    sy0, sx0 = max(0, -y0), max(0, -x0)
    dy0, dx0 = max(0, y0), max(0, x0)
    hh = min(h - sy0, H - dy0)
    ww = min(w - sx0, W - dx0)
    if hh <= 0 or ww <= 0:
        return
    sub = patch[sy0 : sy0 + hh, sx0 : sx0 + ww]
    opaque = sub[:, :, 3] > 0
    region = dst[dy0 : dy0 + hh, dx0 : dx0 + ww]
    region[opaque] = sub[:, :, :3][opaque]


def paste_rgba_over_rgba(dst: np.ndarray, patch: np.ndarray, x0: int, y0: int) -> None:
    """Same painter rule as paste_rgba but the destination keeps alpha."""
    h, w = patch.shape[:2]
    H, W = dst.shape[:2]
    sy0, sx0 = max(0, -y0), max(0, -x0)
    dy0, dx0 = max(0, y0), max(0, x0)
    hh = min(h - sy0, H - dy0)
    ww = min(w - sx0, W - dx0)
    if hh <= 0 or ww <= 0:
        return
    sub = patch[sy0 : sy0 + hh, sx0 : sx0 + ww]
    opaque = sub[:, :, 3] > 0
    region = dst[dy0 : dy0 + hh, dx0 : dx0 + ww]
    region[opaque] = sub[opaque]


def luminance(frame: np.ndarray) -> np.ndarray:
    """Rec.601 luma as float64, same height/width as the input."""
    f = frame.astype(np.float64)
    return 0.299 * f[:, :, 0] + 0.587 * f[:, :, 1] + 0.114 * f[:, :, 2]


def grid_pool(values: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Mean-pool a 2D array over a rows x cols grid of cells.

    Cell (i, j) covers rows [floor(i*H/rows), floor((i+1)*H/rows)) and the
    analogous column range, so uneven sizes are absorbed by the last cells.
    """
    h, w = values.shape
    r_edges = [(i * h) // rows for i in range(rows + 1)]
    c_edges = [(j * w) // cols for j in range(cols + 1)]
    out = np.empty((rows, cols), dtype=np.float64)
    for i in range(rows):
        for j in range(cols):
            cell = values[r_edges[i] : r_edges[i + 1], c_edges[j] : c_edges[j + 1]]
            out[i, j] = cell.mean() if cell.size else 0.0
    return out
