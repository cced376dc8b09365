"""Subject detection: ground-truth oracle or background subtraction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import ConfigurationError
from ..geometry import BoundingBox
from ..raster import validate_frame
from .background import BackgroundModel

DIFF_THRESHOLD = 25
MIN_BOX_AREA = 100.0


@dataclass(frozen=True)
class Detection:
    box: BoundingBox
    score: float


def detect(
    frame: np.ndarray,
    mode: str,
    gt=None,
    model: BackgroundModel | None = None,
    threshold: int = DIFF_THRESHOLD,
    min_box_area: float = MIN_BOX_AREA,
) -> list[Detection]:
    """Find subject boxes in a frame.

    Oracle mode passes ground-truth boxes through at score 1.0 and needs
    `gt`. Heuristic mode thresholds the per-pixel distance to the
    background model (where the model has data), labels the foreground
    into 8-connected components, and keeps components whose bounding box
    covers at least `min_box_area` pixels; the score is the fraction of
    the box the component actually covers.
    """
    frame = validate_frame(frame)
    if mode == "oracle":
        if gt is None:
            raise ConfigurationError("oracle detection requires ground truth")
        return [Detection(box=actor.box, score=1.0) for actor in gt.actors]
    if mode != "heuristic":
        raise ConfigurationError(f"unknown detection mode '{mode}'")
    if model is None:
        raise ConfigurationError("heuristic detection requires a background model")

    diff = np.abs(frame.astype(np.int16) - model.estimate_u8().astype(np.int16))
    fg = (diff.max(axis=2) > threshold) & model.seen
    labels, count = ndimage.label(fg, structure=np.ones((3, 3), dtype=bool))
    detections: list[Detection] = []
    for sl, component in zip(ndimage.find_objects(labels), range(1, count + 1)):
        if sl is None:
            continue
        ys, xs = sl
        box = BoundingBox(
            float(xs.start),
            float(ys.start),
            float(xs.stop - xs.start),
            float(ys.stop - ys.start),
        )
        if box.area < min_box_area:
            continue
        covered = int((labels[sl] == component).sum())
        detections.append(Detection(box=box, score=covered / box.area))
    return detections
