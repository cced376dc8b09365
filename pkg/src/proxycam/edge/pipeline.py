"""Per-frame edge pipeline: detect, track, pose, scrub, overlay, embed.

One EdgeState per camera stream; frames must be fed in order because both
the tracker and the background model are temporal. The output carries
everything the transport tuple needs plus the edge-side composite, and
never the raw frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import AssociationError, DegeneratePoseError, StageError
from ..proxy import SkeletalProxy, render_proxy
from ..skeleton import KeypointSet
from ..raster import validate_frame
from .background import (
    BackgroundModel,
    EMA_ALPHA,
    NEVER_SEEN_FILL,
    erase,
    update_background,
)
from .compose import embed, occlusion_order, overlay
from .detect import DIFF_THRESHOLD, MIN_BOX_AREA, detect
from .pose import estimate_pose
from .track import TrackerParams, TrackerState, track_step


@dataclass(frozen=True)
class EdgeParams:
    mode: str = "oracle"
    noise_sigma: float = 0.0
    detect_threshold: int = DIFF_THRESHOLD
    min_box_area: float = MIN_BOX_AREA
    background_alpha: float = EMA_ALPHA
    # heuristic mode only: frames of full-frame suppression while the
    # background model bootstraps blind; over-erasure is the safe direction
    heuristic_warmup: int = 30
    tracker: TrackerParams = field(default_factory=TrackerParams)


@dataclass
class EdgeState:
    width: int
    height: int
    params: EdgeParams = field(default_factory=EdgeParams)
    seed: int = 0
    tracker: TrackerState = field(init=False)
    background: BackgroundModel = field(init=False)
    rng: np.random.Generator = field(init=False)
    frame_index: int = field(default=0, init=False)

    def __post_init__(self):
        self.tracker = TrackerState(params=self.params.tracker)
        self.background = BackgroundModel.create(self.width, self.height)
        self.rng = np.random.default_rng(self.seed)


@dataclass(frozen=True)
class EdgeOutput:
    """Everything extracted from one frame. The raw frame is not here."""

    desensitized: np.ndarray
    poses: tuple[tuple[int, KeypointSet], ...]
    order: tuple[int, ...]
    embedding: np.ndarray
    composite: np.ndarray


def _stage(name: str):
    def wrap(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except Exception as exc:
            raise StageError(name, exc) from exc

    return wrap


def _box_mask(height: int, width: int, boxes) -> np.ndarray:
    mask = np.zeros((height, width), dtype=bool)
    for box in boxes:
        x0 = max(0, int(np.floor(box.x)))
        y0 = max(0, int(np.floor(box.y)))
        x1 = min(width, int(np.ceil(box.x2)))
        y1 = min(height, int(np.ceil(box.y2)))
        if x1 > x0 and y1 > y0:
            mask[y0:y1, x0:x1] = True
    return mask


def process_frame(state: EdgeState, frame: np.ndarray, gt=None) -> EdgeOutput:
    """Run the full per-frame edge pipeline.

    Oracle mode takes boxes, masks, and poses from ground truth; heuristic
    mode takes boxes from background subtraction and over-erases with box
    rectangles (poses still come from gt when it is supplied, since no
    heuristic pose estimator exists). Erasure always uses every known
    subject mask, not just the tracked ones, so a tracking failure can
    never leak pixels.
    """
    frame = validate_frame(frame)
    if frame.shape[:2] != (state.height, state.width):
        raise StageError(
            "input", ValueError(f"frame shape {frame.shape[:2]} does not match stream")
        )
    params = state.params
    mode = params.mode

    detections = _stage("detect")(
        detect,
        frame,
        mode,
        gt=gt,
        model=state.background,
        threshold=params.detect_threshold,
        min_box_area=params.min_box_area,
    )
    tracks = _stage("track")(track_step, state.tracker, detections)

    poses: dict[int, KeypointSet] = {}
    if gt is not None:
        for track in tracks:
            try:
                poses[track.subject_id] = estimate_pose(
                    frame,
                    track.box,
                    "oracle",
                    gt=gt,
                    noise_sigma=params.noise_sigma,
                    rng=state.rng,
                )
            except AssociationError:
                # subject left the scene or the track is coasting too far
                continue
            except Exception as exc:
                raise StageError("pose", exc) from exc

    if mode == "oracle":
        if gt is None:
            raise StageError("segment", ValueError("oracle mode requires ground truth"))
        joint_mask = np.zeros((state.height, state.width), dtype=bool)
        for actor in gt.actors:
            joint_mask |= actor.mask
    else:
        joint_mask = _box_mask(state.height, state.width, [d.box for d in detections])

    if mode == "heuristic" and state.frame_index < params.heuristic_warmup:
        # the model may still hold subject pixels absorbed before the first
        # detections existed; suppress the whole frame rather than leak
        desensitized = np.empty_like(frame)
        desensitized[:] = NEVER_SEEN_FILL
    else:
        desensitized = _stage("erase")(erase, frame, joint_mask, state.background)
    _stage("background")(
        update_background, state.background, frame, joint_mask, params.background_alpha
    )

    live = {t.subject_id: t for t in tracks}
    proxies: list[SkeletalProxy] = []
    for sid in sorted(poses):
        pose = poses[sid]
        try:
            proxy = render_proxy(
                pose, pose.head_yaw, live[sid].box, (state.width, state.height)
            )
        except DegeneratePoseError:
            del poses[sid]
            continue
        proxies.append(replace(proxy, subject_id=sid))

    order = _stage("order")(occlusion_order, tracks, poses)
    composite = _stage("overlay")(overlay, desensitized, proxies, order)
    embedding = _stage("embed")(embed, composite)

    state.frame_index += 1
    return EdgeOutput(
        desensitized=desensitized,
        poses=tuple((sid, poses[sid]) for sid in sorted(poses)),
        order=tuple(order),
        embedding=embedding,
        composite=composite,
    )
