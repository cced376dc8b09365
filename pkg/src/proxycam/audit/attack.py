"""Re-identification attack against the pipeline's own output.

Identity is operationalized as appearance (clothing and skin colors), the
one thing the simulator controls exactly. Gallery actors share the same
body height and draw their scripts from the same distribution, so the
only signal separating them is appearance, and appearance is exactly what
the edge removes. A nearest-neighbor attacker is given only the fields
that cross the wire; its accuracy should sit at chance. The same attacker
pointed at the raw frames must succeed, proving the attack is competent
and the chance-level result is not vacuous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..pngio import decode_png, encode_png
from ..raster import grid_pool, luminance
from ..sim.generate import generate_scene
from ..sim.scripts import make_solo_scene
from ..edge.pipeline import EdgeParams, EdgeState, process_frame
from ..cloud.reconstruct import render_proxies
from ..transport.model import RepresentationTuple, SyncKey

MIN_CHANNEL_DISTANCE = 64

_CLOTHING = [
    (48, 48, 48),
    (216, 48, 48),
    (48, 216, 48),
    (48, 48, 216),
    (216, 216, 48),
    (216, 48, 216),
    (48, 216, 216),
    (216, 216, 216),
]
_SKIN = [
    (236, 188, 160),
    (224, 172, 140),
    (208, 156, 124),
    (188, 136, 104),
    (164, 116, 88),
    (140, 96, 72),
    (116, 80, 60),
    (92, 64, 48),
]


@dataclass(frozen=True)
class GalleryActor:
    actor_id: str
    clothing: tuple[int, int, int]
    skin: tuple[int, int, int]


@dataclass(frozen=True)
class AttackGallery:
    actors: tuple[GalleryActor, ...]
    height_px: int = 120

    def validate(self) -> None:
        if len(self.actors) < 2:
            raise ValidationError("gallery needs at least two actors")
        for i, a in enumerate(self.actors):
            for b in self.actors[i + 1 :]:
                dist = max(abs(x - y) for x, y in zip(a.clothing, b.clothing))
                if dist < MIN_CHANNEL_DISTANCE:
                    raise ValidationError(
                        f"actors {a.actor_id} and {b.actor_id} have appearance "
                        f"channel distance {dist} < {MIN_CHANNEL_DISTANCE}"
                    )


@dataclass(frozen=True)
class AttackResult:
    probes: int
    accuracy: float
    chance: float
    ci95: tuple[float, float]
    control_accuracy: float

    @property
    def at_chance(self) -> bool:
        return self.accuracy <= self.chance + 0.05

    @property
    def control_valid(self) -> bool:
        return self.control_accuracy >= 0.95


def build_gallery(n: int = 8) -> AttackGallery:
    if not 2 <= n <= len(_CLOTHING):
        raise ValidationError(f"gallery size must be in [2, {len(_CLOTHING)}]")
    actors = tuple(
        GalleryActor(actor_id=f"g{i}", clothing=_CLOTHING[i], skin=_SKIN[i])
        for i in range(n)
    )
    gallery = AttackGallery(actors=actors)
    gallery.validate()
    return gallery


def _run_scene(scene):
    """Run a scene through the oracle edge; return the last frame's tuple,
    raw frame, and ground truth."""
    frames, gts = generate_scene(scene)
    state = EdgeState(scene.width, scene.height, params=EdgeParams(mode="oracle"))
    out = None
    for frame, gt in zip(frames, gts):
        out = process_frame(state, frame, gt)
    t = RepresentationTuple(
        key=SyncKey(0, len(frames) - 1, (len(frames) - 1) * 33333),
        env_png=encode_png(out.desensitized),
        poses=list(out.poses),
        order=list(out.order),
        embedding=out.embedding,
    )
    return t, frames[-1], gts[-1]


def _wire_features(t: RepresentationTuple, width: int, height: int) -> np.ndarray:
    """Attacker view: everything it can compute from tuple fields alone."""
    env = decode_png(t.env_png)
    env_stats = grid_pool(luminance(env), 8, 8).ravel() / 255.0
    proxies = render_proxies(list(t.poses), list(t.order), (width, height))
    occupancy = grid_pool(proxies[:, :, 3].astype(np.float64), 8, 8).ravel() / 255.0
    return np.concatenate([np.asarray(t.embedding, dtype=np.float64), env_stats, occupancy])


def _raw_features(raw: np.ndarray, gt) -> np.ndarray:
    """Control view: mean appearance color inside the true subject mask."""
    mask = np.zeros(raw.shape[:2], dtype=bool)
    for actor in gt.actors:
        mask |= actor.mask
    if not mask.any():
        return np.zeros(3)
    return raw[mask].mean(axis=0) / 255.0


def _nearest(feature: np.ndarray, bank: list[tuple[str, np.ndarray]]) -> str:
    best_id, best_d = bank[0][0], math.inf
    for actor_id, ref in bank:
        d = float(np.linalg.norm(feature - ref))
        if d < best_d:
            best_id, best_d = actor_id, d
    return best_id


def identity_attack(
    gallery: AttackGallery,
    probe_scenes: int,
    seed: int,
    width: int = 320,
    height: int = 240,
    frames_per_scene: int = 10,
    enroll_per_actor: int = 3,
    probe_actor_ids: list[str] | None = None,
) -> AttackResult:
    """Nearest-neighbor re-identification over wire-visible features.

    Every enrollment and probe scene is a fresh solo scene with a random
    script, so pose and position carry no identity information; body
    height is shared across the gallery by construction. Probes draw from
    the whole gallery unless `probe_actor_ids` narrows them; accuracy and
    chance are always defined against the full gallery.
    """
    gallery.validate()
    rng = np.random.default_rng(seed)
    probe_pool = [
        a for a in gallery.actors
        if probe_actor_ids is None or a.actor_id in probe_actor_ids
    ]
    if not probe_pool:
        raise ValidationError("probe_actor_ids selects no gallery actor")

    wire_bank: list[tuple[str, np.ndarray]] = []
    raw_bank: list[tuple[str, np.ndarray]] = []
    for actor in gallery.actors:
        for _ in range(enroll_per_actor):
            scene = make_solo_scene(
                seed=int(rng.integers(0, 2**63)),
                actor_id=actor.actor_id,
                clothing=actor.clothing,
                skin=actor.skin,
                width=width,
                height=height,
                frame_count=frames_per_scene,
                height_px=gallery.height_px,
            )
            t, raw, gt = _run_scene(scene)
            wire_bank.append((actor.actor_id, _wire_features(t, width, height)))
            raw_bank.append((actor.actor_id, _raw_features(raw, gt)))

    hits = 0
    control_hits = 0
    for _ in range(probe_scenes):
        actor = probe_pool[int(rng.integers(0, len(probe_pool)))]
        scene = make_solo_scene(
            seed=int(rng.integers(0, 2**63)),
            actor_id=actor.actor_id,
            clothing=actor.clothing,
            skin=actor.skin,
            width=width,
            height=height,
            frame_count=frames_per_scene,
            height_px=gallery.height_px,
        )
        t, raw, gt = _run_scene(scene)
        if _nearest(_wire_features(t, width, height), wire_bank) == actor.actor_id:
            hits += 1
        if _nearest(_raw_features(raw, gt), raw_bank) == actor.actor_id:
            control_hits += 1

    accuracy = hits / probe_scenes
    half = 1.96 * math.sqrt(max(accuracy * (1.0 - accuracy), 1e-12) / probe_scenes)
    return AttackResult(
        probes=probe_scenes,
        accuracy=accuracy,
        chance=1.0 / len(gallery.actors),
        ci95=(max(0.0, accuracy - half), min(1.0, accuracy + half)),
        control_accuracy=control_hits / probe_scenes,
    )
