"""Appearance-free skeletal proxy renderer.

This is the single rendering routine shared by the edge overlay and the
cloud reconstruction: both sides must produce byte-identical rasters from
the same pose, so there is exactly one implementation.

A proxy is a capsule per visible bone plus a head disc, drawn with one
fixed fill and outline for every subject. Nothing about the person except
geometry enters the raster: two different people in the same pose render
to the same bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePoseError
from .geometry import BoundingBox
from .raster import SilhouetteCanvas, outline_of
from .skeleton import BONES, KeypointSet, L_EAR, NOSE, R_EAR

FILL_COLOR = (180, 180, 180)
OUTLINE_COLOR = (60, 60, 60)

_LIMB_WIDTH_FRAC = 0.06        # capsule width as a fraction of torso length
_TORSO_FALLBACK_FRAC = 0.3     # of box height, when shoulders/hips are hidden
_HEAD_RADIUS_EAR_FRAC = 0.5    # of the inter-ear distance
_HEAD_RADIUS_FALLBACK = 0.15   # of torso length
_TICK_LENGTH = 2.0             # orientation tick, pixels past the disc rim


@dataclass(frozen=True)
class SkeletalProxy:
    """RGBA patch plus its placement in frame coordinates."""

    raster: np.ndarray
    anchor: tuple[int, int]
    subject_id: int = -1


def render_proxy(
    pose: KeypointSet,
    head_yaw: float | None,
    box: BoundingBox,
    frame_size: tuple[int, int],
) -> SkeletalProxy:
    """Rasterize the proxy for one subject.

    frame_size is (width, height); the patch is clipped to the frame so the
    proxy always fits when pasted at its anchor. Raises DegeneratePoseError
    when fewer than two joints are visible or nothing lands inside the
    frame.
    """
    frame_w, frame_h = frame_size
    visible = pose.visible()
    if int(visible.sum()) < 2:
        raise DegeneratePoseError("proxy needs at least two visible joints")
    pts = pose.joints[:, :2].astype(np.float64)

    torso = pose.torso_length()
    if torso is None or torso <= 0.0:
        torso = _TORSO_FALLBACK_FRAC * max(box.h, 1.0)
    limb_r = max(_LIMB_WIDTH_FRAC * torso / 2.0, 0.75)

    head_r = 0.0
    if pose.is_visible(NOSE):
        if pose.is_visible(L_EAR) and pose.is_visible(R_EAR):
            inter_ear = float(np.hypot(*(pts[L_EAR] - pts[R_EAR])))
            head_r = _HEAD_RADIUS_EAR_FRAC * inter_ear
        if head_r <= 0.0:
            head_r = _HEAD_RADIUS_FALLBACK * torso

    used = pts[visible]
    margin = max(limb_r, head_r) + _TICK_LENGTH + 2.0
    x0 = max(0, int(math.floor(used[:, 0].min() - margin)))
    y0 = max(0, int(math.floor(used[:, 1].min() - margin)))
    x1 = min(frame_w, int(math.ceil(used[:, 0].max() + margin)))
    y1 = min(frame_h, int(math.ceil(used[:, 1].max() + margin)))
    if x1 <= x0 or y1 <= y0:
        raise DegeneratePoseError("proxy silhouette lies outside the frame")

    canvas = SilhouetteCanvas(x0, y0, x1 - x0, y1 - y0)
    for a, b in BONES:
        if pose.is_visible(a) and pose.is_visible(b):
            canvas.add_capsule(pts[a], pts[b], limb_r)
    if head_r > 0.0:
        canvas.add_disc(pts[NOSE], head_r)

    inside = canvas.mask
    tick = np.zeros_like(inside)
    if head_r > 0.0 and head_yaw is not None:
        direction = np.array([math.cos(head_yaw), math.sin(head_yaw)])
        tip = pts[NOSE] + direction * (head_r + _TICK_LENGTH)
        base = pts[NOSE] + direction * head_r
        tick_canvas = SilhouetteCanvas(x0, y0, x1 - x0, y1 - y0)
        tick_canvas.add_capsule(base, tip, 1.0)
        tick = tick_canvas.mask

    raster = np.zeros((y1 - y0, x1 - x0, 4), dtype=np.uint8)
    raster[inside] = (*FILL_COLOR, 255)
    raster[outline_of(inside)] = (*OUTLINE_COLOR, 255)
    raster[tick] = (*OUTLINE_COLOR, 255)
    return SkeletalProxy(raster=raster, anchor=(x0, y0))


def keypoint_extent_box(pose: KeypointSet, margin_frac: float = 0.10) -> BoundingBox:
    """Box around the visible joints, grown by a relative margin.

    This is the stand-in for the detector box where only poses are
    available (the cloud side of the wire).
    """
    vis = pose.visible_points()
    if vis.shape[0] == 0:
        raise DegeneratePoseError("no visible joints to box")
    x0, y0 = vis.min(axis=0)
    x1, y1 = vis.max(axis=0)
    box = BoundingBox(float(x0), float(y0), float(x1 - x0), float(y1 - y0))
    return box.scaled(1.0 + margin_frac)
