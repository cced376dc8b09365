from .kinematics import KinematicFeatures, extract_kinematics
from .classify import LABELS, ClassifierParams, classify_behavior
from .infer import BehaviorReport, SubjectReport, infer
from .reconstruct import ReconstructedScene, reconstruct, render_proxies

__all__ = [
    "BehaviorReport",
    "ClassifierParams",
    "KinematicFeatures",
    "LABELS",
    "ReconstructedScene",
    "SubjectReport",
    "classify_behavior",
    "extract_kinematics",
    "infer",
    "reconstruct",
    "render_proxies",
]
