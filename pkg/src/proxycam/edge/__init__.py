from .background import BackgroundModel, erase, update_background
from .detect import Detection, detect
from .track import Track, TrackerParams, TrackerState, track_step
from .pose import estimate_pose
from .compose import embed, occlusion_order, overlay
from .pipeline import EdgeOutput, EdgeParams, EdgeState, process_frame

__all__ = [
    "BackgroundModel",
    "Detection",
    "EdgeOutput",
    "EdgeParams",
    "EdgeState",
    "Track",
    "TrackerParams",
    "TrackerState",
    "detect",
    "embed",
    "erase",
    "estimate_pose",
    "occlusion_order",
    "overlay",
    "process_frame",
    "track_step",
    "update_background",
]
