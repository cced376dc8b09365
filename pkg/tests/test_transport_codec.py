import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from proxycam.errors import (
    ConsistencyError,
    IntegrityError,
    ProtocolError,
    ValidationError,
    VersionError,
    WireError,
)
from proxycam.pngio import encode_png
from proxycam.skeleton import KeypointSet
from proxycam.transport.codec import decode, encode
from proxycam.transport.model import RepresentationTuple, SyncKey

SMALL_PNG = encode_png(np.full((8, 8, 3), 77, dtype=np.uint8))


def make_tuple(poses=(), order=(), frame_id=0, flags=0, embedding=None, env=SMALL_PNG):
    if embedding is None:
        embedding = np.zeros(64, dtype=np.float32)
    return RepresentationTuple(
        key=SyncKey(camera_id=0, frame_id=frame_id, timestamp_us=frame_id * 33333),
        env_png=env,
        poses=list(poses),
        order=list(order),
        embedding=embedding,
        flags=flags,
    )


def keypoints(seed, head=True):
    rng = np.random.default_rng(seed)
    joints = np.empty((17, 3), dtype=np.float32)
    joints[:, 0] = rng.uniform(0, 320, 17)
    joints[:, 1] = rng.uniform(0, 240, 17)
    joints[:, 2] = rng.uniform(0, 1, 17)
    yaw = float(np.float32(rng.uniform(-np.pi, np.pi))) if head else None
    return KeypointSet(joints=joints, head_yaw=yaw)


class TestRoundTrip:
    def test_empty_tuple(self):
        t = make_tuple()
        assert decode(encode(t)) == t

    def test_tuple_with_poses_and_order(self):
        t = make_tuple(
            poses=[(3, keypoints(1)), (9, keypoints(2, head=False))],
            order=[9, 3],
            frame_id=41,
            embedding=np.linspace(0, 1, 64, dtype=np.float32),
        )
        assert decode(encode(t)) == t

    def test_canonical_encoding(self):
        t = make_tuple(poses=[(1, keypoints(5))], order=[1], frame_id=7)
        assert encode(t) == encode(decode(encode(t)))


subject_ids = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def tuples(draw):
    n = draw(st.integers(min_value=0, max_value=4))
    sids = draw(
        st.lists(subject_ids, min_size=n, max_size=n, unique=True)
    )
    poses = [
        (sid, keypoints(draw(st.integers(0, 10_000)), head=draw(st.booleans())))
        for sid in sids
    ]
    order = draw(st.permutations(sids))
    rng = np.random.default_rng(draw(st.integers(0, 10_000)))
    return make_tuple(
        poses=poses,
        order=list(order),
        frame_id=draw(st.integers(0, 2**44)),  # timestamp = fid * 33333 must fit u64
        embedding=rng.uniform(0, 1, 64).astype(np.float32),
    )


class TestRoundTripProperty:
    @settings(max_examples=150, deadline=None)
    @given(tuples())
    def test_decode_inverts_encode(self, t):
        assert decode(encode(t)) == t

    @settings(max_examples=150, deadline=None)
    @given(tuples())
    def test_equal_tuples_encode_identically(self, t):
        assert encode(t) == encode(t)


class TestRejection:
    def test_bad_magic(self):
        packet = bytearray(encode(make_tuple()))
        packet[:4] = b"NOPE"
        with pytest.raises(ProtocolError):
            decode(bytes(packet))

    def test_unknown_version(self):
        packet = bytearray(encode(make_tuple()))
        packet[4] = 9
        with pytest.raises(VersionError):
            decode(bytes(packet))

    def test_crc_mismatch(self):
        packet = bytearray(encode(make_tuple()))
        packet[-1] ^= 0x01
        with pytest.raises(IntegrityError):
            decode(bytes(packet))

    def test_truncation(self):
        packet = encode(make_tuple())
        with pytest.raises(WireError):
            decode(packet[: len(packet) // 2])

    def test_trailing_bytes_rejected(self):
        # version 1 has no extension sections: extra bytes cannot ride along
        packet = encode(make_tuple())
        with pytest.raises(WireError):
            decode(packet + b"extra")

    def test_encode_refuses_order_mismatch(self):
        t = make_tuple(poses=[(1, keypoints(0))], order=[2])
        with pytest.raises(ValidationError):
            encode(t)

    def test_encode_refuses_bad_embedding(self):
        t = make_tuple(embedding=np.full(64, 2.0, dtype=np.float32))
        with pytest.raises(ValidationError):
            encode(t)
        t = make_tuple(embedding=np.zeros(32, dtype=np.float32))
        with pytest.raises(ValidationError):
            encode(t)

    def test_decode_rejects_pose_order_mismatch_as_consistency(self):
        # corrupt a valid packet's order section id and fix up the CRC
        import struct
        import zlib

        t = make_tuple(poses=[(1, keypoints(0))], order=[1])
        packet = bytearray(encode(t))
        body = packet[:-4]
        idx = bytes(body).rfind(struct.pack("<I", 1))  # order entry
        body[idx : idx + 4] = struct.pack("<I", 2)
        fixed = bytes(body) + struct.pack("<I", zlib.crc32(bytes(body)))
        with pytest.raises(ConsistencyError):
            decode(fixed)


class TestSingleByteFuzz:
    def test_every_single_byte_flip_is_detected(self):
        # exhaustive over one reference packet: no flip may decode silently
        t = make_tuple(poses=[(2, keypoints(11))], order=[2], frame_id=3)
        packet = encode(t)
        undetected = []
        for i in range(len(packet)):
            mutated = bytearray(packet)
            mutated[i] ^= 0xFF
            try:
                decoded = decode(bytes(mutated))
            except WireError:
                continue
            if decoded != t:
                undetected.append(i)
            else:  # flip produced an identical tuple: impossible for xor 0xFF
                undetected.append(i)
        assert undetected == []
