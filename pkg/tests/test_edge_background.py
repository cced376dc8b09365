import math

import numpy as np
import pytest

from proxycam.edge.background import BackgroundModel, erase, update_background
from proxycam.errors import ValidationError


def flat(color, h=60, w=80):
    frame = np.empty((h, w, 3), dtype=np.uint8)
    frame[:] = color
    return frame


class TestErase:
    def test_zero_mask_is_identity(self):
        rng = np.random.default_rng(0)
        frame = rng.integers(0, 256, (60, 80, 3), dtype=np.uint8)
        model = BackgroundModel.create(80, 60)
        out = erase(frame, np.zeros((60, 80), bool), model)
        assert np.array_equal(out, frame)

    def test_all_mask_fresh_model_is_mid_gray(self):
        rng = np.random.default_rng(1)
        frame = rng.integers(0, 256, (60, 80, 3), dtype=np.uint8)
        model = BackgroundModel.create(80, 60)
        out = erase(frame, np.ones((60, 80), bool), model)
        assert np.all(out == 128)

    def test_masked_content_cannot_influence_output(self):
        # forced by the independence contract: identical outside the mask,
        # arbitrary inside
        rng = np.random.default_rng(2)
        frame_a = rng.integers(0, 256, (60, 80, 3), dtype=np.uint8)
        mask = np.zeros((60, 80), bool)
        mask[10:40, 20:60] = True
        frame_b = frame_a.copy()
        frame_b[mask] = rng.integers(0, 256, (int(mask.sum()), 3), dtype=np.uint8)
        model = BackgroundModel(
            accum=rng.uniform(0, 255, (60, 80, 3)),
            seen=rng.random((60, 80)) < 0.5,
        )
        assert np.array_equal(erase(frame_a, mask, model), erase(frame_b, mask, model))

    def test_dimension_mismatch_rejected(self):
        model = BackgroundModel.create(80, 60)
        with pytest.raises(ValidationError):
            erase(flat(10, h=50, w=80), np.zeros((50, 80), bool), model)
        with pytest.raises(ValidationError):
            erase(flat(10), np.zeros((59, 80), bool), model)


class TestUpdateBackground:
    def test_constant_background_is_a_fixed_point(self):
        frame = flat((40, 90, 160))
        model = BackgroundModel.create(80, 60)
        empty = np.zeros((60, 80), bool)
        for _ in range(100):
            update_background(model, frame, empty)
        assert np.all(np.abs(model.accum - frame.astype(np.float64)) <= 1.0)
        assert model.seen.all()

    def test_always_masked_pixel_stays_unseen(self):
        frame = flat(200)
        model = BackgroundModel.create(80, 60)
        mask = np.zeros((60, 80), bool)
        mask[5, 5] = True
        for _ in range(50):
            update_background(model, frame, mask)
        assert not model.seen[5, 5]
        assert model.seen[0, 0]

    def test_step_change_converges_at_the_closed_form_rate(self):
        # EMA error after n updates is 255 * 0.95^n; below one unit needs
        # ceil(log(1/255)/log(0.95)) = 109 updates
        gray, white = flat(0), flat(255)
        model = BackgroundModel.create(80, 60)
        empty = np.zeros((60, 80), bool)
        update_background(model, gray, empty)  # seeds accum at 0
        n = math.ceil(math.log(1 / 255) / math.log(0.95))
        assert n == 109
        for _ in range(n):
            update_background(model, white, empty)
        assert np.all(np.abs(model.accum - 255.0) <= 1.0)

    def test_first_observation_seeds_exactly(self):
        frame = flat((7, 77, 177))
        model = BackgroundModel.create(80, 60)
        update_background(model, frame, np.zeros((60, 80), bool))
        assert np.array_equal(model.accum, frame.astype(np.float64))
