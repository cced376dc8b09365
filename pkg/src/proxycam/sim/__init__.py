from .spec import ActorSpec, BackgroundSpec, SceneSpec, load_scene_spec, save_scene_spec
from .generate import ActorTruth, GroundTruthFrame, generate_scene
from .kinematics import pose_at

__all__ = [
    "ActorSpec",
    "ActorTruth",
    "BackgroundSpec",
    "GroundTruthFrame",
    "SceneSpec",
    "generate_scene",
    "load_scene_spec",
    "pose_at",
    "save_scene_spec",
]
