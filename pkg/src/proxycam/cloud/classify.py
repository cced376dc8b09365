"""Rule-based behavior classifier over kinematic features.

A transparent decision list stands in for a learned model: every rule is
a threshold on a feature, scaled by torso length where the feature is a
length or a speed, so the rules are resolution-independent. First match
wins. Confidence reflects how far inside its thresholds the firing rule
sits: sigma(4 * m) where m is the mean normalized slack over the rule's
conditions, so a rule that barely fires scores 0.5 and a comfortably
satisfied one approaches 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .kinematics import KinematicFeatures

LABELS = (
    "standing",
    "walking",
    "sitting",
    "fallen",
    "falling",
    "raising_arm",
    "unknown",
)


@dataclass(frozen=True)
class ClassifierParams:
    fall_vy_frac: float = 0.08       # of torso length, px/frame
    fallen_spine_deg: float = 60.0
    fallen_aspect: float = 0.8
    sit_gap_frac: float = 0.15       # |hip_v - knee_v| as fraction of torso
    sit_spine_deg: float = 30.0
    walk_speed_frac: float = 0.02    # of torso length, px/frame
    stand_spine_deg: float = 20.0


def _confidence(slacks: list[float]) -> float:
    margin = sum(slacks) / len(slacks)
    return 1.0 / (1.0 + math.exp(-4.0 * margin))


def classify_behavior(
    features: KinematicFeatures,
    prev_label: str | None = None,
    params: ClassifierParams = ClassifierParams(),
) -> tuple[str, float]:
    """Label one subject from its features.

    Comparisons are inclusive so a value exactly at a threshold fires its
    rule with zero slack (confidence 0.5). When nothing fires, the
    previous label is held at confidence 0.5 (mild hysteresis), else
    'unknown'.
    """
    torso = max(features.torso_len, 1e-6)
    spine = features.spine_angle_deg
    aspect = features.kp_bbox_aspect

    vy_thr = params.fall_vy_frac * torso
    if features.hip_vy >= vy_thr:
        return "falling", _confidence([(features.hip_vy - vy_thr) / vy_thr])

    if spine >= params.fallen_spine_deg and aspect <= params.fallen_aspect:
        return "fallen", _confidence(
            [
                (spine - params.fallen_spine_deg) / params.fallen_spine_deg,
                (params.fallen_aspect - aspect) / params.fallen_aspect,
            ]
        )

    if features.knee_mid_v is not None:
        gap = abs(features.hip_mid[1] - features.knee_mid_v)
        gap_thr = params.sit_gap_frac * torso
        if gap <= gap_thr and spine <= params.sit_spine_deg:
            return "sitting", _confidence(
                [
                    (gap_thr - gap) / gap_thr,
                    (params.sit_spine_deg - spine) / params.sit_spine_deg,
                ]
            )

    speed_thr = params.walk_speed_frac * torso
    if abs(features.hip_vx) >= speed_thr:
        return "walking", _confidence([(abs(features.hip_vx) - speed_thr) / speed_thr])

    if spine <= params.stand_spine_deg:
        return "standing", _confidence(
            [(params.stand_spine_deg - spine) / params.stand_spine_deg]
        )

    if prev_label is not None and prev_label != "unknown":
        return prev_label, 0.5
    return "unknown", 0.5
