"""Constant-velocity multi-subject tracker with Hungarian assignment.

Tracks predict their next box by shifting with their smoothed velocity.
Predicted boxes are matched to detections by IoU via the Hungarian method
and pairs below the IoU gate are split back apart. Unmatched detections
spawn fresh subject ids; tracks coast while missed and retire after the
miss timeout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..geometry import BoundingBox, iou
from .detect import Detection


@dataclass(frozen=True)
class TrackerParams:
    iou_threshold: float = 0.2
    miss_timeout: int = 10
    velocity_alpha: float = 0.5


@dataclass
class Track:
    subject_id: int
    box: BoundingBox
    velocity: tuple[float, float] = (0.0, 0.0)
    age: int = 1
    misses: int = 0

    def predicted_box(self) -> BoundingBox:
        return self.box.shifted(*self.velocity)


@dataclass
class TrackerState:
    params: TrackerParams = field(default_factory=TrackerParams)
    tracks: list[Track] = field(default_factory=list)
    next_id: int = 1


def track_step(state: TrackerState, detections: list[Detection]) -> list[Track]:
    """Advance the tracker by one frame and return the live tracks.

    Empty detection lists are fine: every track coasts on its predicted
    box and accrues a miss.
    """
    params = state.params
    tracks = state.tracks
    predicted = [t.predicted_box() for t in tracks]

    matched_t: set[int] = set()
    matched_d: set[int] = set()
    pairs: list[tuple[int, int]] = []
    if tracks and detections:
        cost = np.ones((len(tracks), len(detections)), dtype=np.float64)
        for i, pbox in enumerate(predicted):
            for j, det in enumerate(detections):
                cost[i, j] = 1.0 - iou(pbox, det.box)
        rows, cols = linear_sum_assignment(cost)
        for i, j in zip(rows, cols):
            if 1.0 - cost[i, j] >= params.iou_threshold:
                pairs.append((i, j))
                matched_t.add(i)
                matched_d.add(j)

    for i, j in pairs:
        track = tracks[i]
        det = detections[j]
        old_cx, old_cy = track.box.center
        new_cx, new_cy = det.box.center
        a = params.velocity_alpha
        track.velocity = (
            (1.0 - a) * track.velocity[0] + a * (new_cx - old_cx),
            (1.0 - a) * track.velocity[1] + a * (new_cy - old_cy),
        )
        track.box = det.box
        track.age += 1
        track.misses = 0

    for i, track in enumerate(tracks):
        if i not in matched_t:
            track.box = predicted[i]
            track.age += 1
            track.misses += 1

    for j, det in enumerate(detections):
        if j not in matched_d:
            tracks.append(Track(subject_id=state.next_id, box=det.box))
            state.next_id += 1

    state.tracks = [t for t in tracks if t.misses <= params.miss_timeout]
    return sorted(state.tracks, key=lambda t: t.subject_id)
