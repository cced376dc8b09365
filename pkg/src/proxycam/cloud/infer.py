"""Behavior inference over a short window of representation tuples."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..errors import DegenerateSubjectError, ValidationError
from ..geometry import BoundingBox
from ..proxy import keypoint_extent_box
from ..skeleton import KeypointSet
from ..transport.model import RepresentationTuple, SyncKey
from .classify import ClassifierParams, classify_behavior
from .kinematics import extract_kinematics

INFER_WINDOW = 5


@dataclass(frozen=True)
class SubjectReport:
    subject_id: int
    box: BoundingBox
    label: str
    confidence: float


@dataclass(frozen=True)
class BehaviorReport:
    key: SyncKey
    subjects: tuple[SubjectReport, ...]


def infer(
    window: Sequence[RepresentationTuple],
    params: ClassifierParams = ClassifierParams(),
) -> BehaviorReport:
    """Classify every subject present in the newest tuple of the window.

    The window must be a frame-ordered slice of one camera's stream.
    Labels are computed sequentially along the window so the hysteresis
    sees the same history on every call; a subject whose pose is
    degenerate degrades to ('unknown', 0.5) without failing the frame.
    """
    if not window:
        raise ValidationError("inference needs a non-empty tuple window")
    cam = window[0].key.camera_id
    for a, b in zip(window, window[1:]):
        if b.key.camera_id != cam:
            raise ValidationError("window mixes camera ids")
        if b.key.frame_id <= a.key.frame_id:
            raise ValidationError("window is not frame-ordered")

    histories: dict[int, list[KeypointSet]] = {}
    for t in window:
        for sid, kp in t.poses:
            histories.setdefault(sid, []).append(kp)

    current = window[-1]
    reports: list[SubjectReport] = []
    for sid, kp in sorted(current.poses, key=lambda p: p[0]):
        history = histories[sid]
        label, conf = "unknown", 0.5
        try:
            prev: str | None = None
            for upto in range(1, len(history) + 1):
                features = extract_kinematics(history[:upto])
                label, conf = classify_behavior(features, prev, params)
                prev = label
            box = keypoint_extent_box(kp)
        except DegenerateSubjectError:
            label, conf = "unknown", 0.5
            box = BoundingBox(0.0, 0.0, 0.0, 0.0)
        reports.append(
            SubjectReport(subject_id=sid, box=box, label=label, confidence=conf)
        )
    return BehaviorReport(key=current.key, subjects=tuple(reports))
