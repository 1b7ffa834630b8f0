import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vironment import FRAME_LEN, ScanFrame, StreamDecoder, crc16, decode_stream, encode_frame
from vironment.wire import SYNC, VERSION, DecodedFrame, DecodeError
from helpers import crc16_reference, frame_of


def random_frame(rng) -> tuple[ScanFrame, bool]:
    readings = [
        0xFFFF if rng.random() < 0.25 else int(rng.integers(20, 4001))
        for _ in range(12)
    ]
    frame = ScanFrame(
        seq=int(rng.integers(0, 0x10000)),
        readings=readings,
        timestamp_ms=int(rng.integers(0, 2**32)),
    )
    return frame, bool(rng.random() < 0.5)


class TestCrc16:
    def test_empty_input_is_init(self):
        assert crc16(b"") == 0xFFFF

    def test_standard_check_value(self):
        assert crc16_reference(b"123456789") == 0x29B1
        assert crc16(b"123456789") == 0x29B1

    def test_deterministic(self):
        data = bytes(range(256))
        assert crc16(data) == crc16(data)

    def test_matches_independent_reference(self):
        rng = np.random.default_rng(17)
        for _ in range(300):
            data = rng.bytes(int(rng.integers(0, 80)))
            assert crc16(data) == crc16_reference(data)


class TestEncodeFrame:
    def test_layout_of_sentinel_frame(self):
        raw = encode_frame(frame_of([None] * 12, seq=0, t_ms=0), alert=False)
        assert len(raw) == FRAME_LEN == 35
        assert raw[0] == SYNC == 0xAA
        assert raw[1] == VERSION == 0x01
        assert raw[2:4] == b"\x00\x00"  # seq
        assert raw[4:8] == b"\x00\x00\x00\x00"  # timestamp
        assert raw[8:32] == b"\xff" * 24  # readings
        assert raw[32] == 0x00  # alert flags

    def test_reading_encoding_little_endian(self):
        raw = encode_frame(frame_of([1.75] + [None] * 11))
        assert raw[8:10] == b"\xd6\x06"  # 1750 == 0x06D6

    def test_alert_flag_bit0(self):
        assert encode_frame(frame_of([None] * 12), alert=True)[32] == 0x01

    def test_crc_field_is_ccitt_false_of_body(self):
        raw = encode_frame(frame_of([2.0] * 12, seq=9, t_ms=1234), alert=True)
        stored = int.from_bytes(raw[33:35], "little")
        assert stored == crc16_reference(raw[1:33])

    def test_round_trip_random_frames(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            frame, alert = random_frame(rng)
            frames, errors = decode_stream(encode_frame(frame, alert))
            assert errors == []
            assert frames == [DecodedFrame(frame, alert)]

    @settings(max_examples=200)
    @given(
        seq=st.integers(0, 0xFFFF),
        t_ms=st.integers(0, 2**32 - 1),
        readings=st.lists(st.integers(0, 0xFFFF), min_size=12, max_size=12),
        alert=st.booleans(),
    )
    def test_round_trip_property(self, seq, t_ms, readings, alert):
        frame = ScanFrame(seq=seq, readings=readings, timestamp_ms=t_ms)
        frames, errors = decode_stream(encode_frame(frame, alert))
        assert errors == []
        assert frames == [DecodedFrame(frame, alert)]


class TestDecodeStream:
    def test_three_frames_back_to_back(self):
        rng = np.random.default_rng(6)
        triplet = [random_frame(rng) for _ in range(3)]
        stream = b"".join(encode_frame(f, a) for f, a in triplet)
        frames, errors = decode_stream(stream)
        assert errors == []
        assert [(d.frame, d.alert) for d in frames] == triplet

    def test_single_bit_flip_rejected(self):
        frame, alert = random_frame(np.random.default_rng(7))
        raw = encode_frame(frame, alert)
        for byte_i in range(1, FRAME_LEN):  # flipping sync only desyncs
            for bit in range(8):
                bad = bytearray(raw)
                bad[byte_i] ^= 1 << bit
                frames, errors = decode_stream(bytes(bad))
                assert frames == []
                assert len(errors) >= 1

    def test_garbage_prefix_resync(self):
        frame, alert = random_frame(np.random.default_rng(8))
        raw = encode_frame(frame, alert)
        garbage = b"\x00\x13\x37\xaa\x55"
        frames, errors = decode_stream(garbage + raw)
        assert [(d.frame, d.alert) for d in frames] == [(frame, alert)]
        assert len(errors) == 1
        assert errors[0].length == len(garbage)
        assert errors[0].offset == 0

    def test_flip_reports_crc_mismatch_region(self):
        frame, alert = random_frame(np.random.default_rng(9))
        raw = encode_frame(frame, alert)
        bad = bytearray(raw)
        bad[20] ^= 0x01
        frames, errors = decode_stream(bytes(bad))
        assert frames == []
        assert errors[0].kind == "crc-mismatch"
        assert sum(e.length for e in errors) == FRAME_LEN

    def test_unknown_version_reported(self):
        frame, alert = random_frame(np.random.default_rng(10))
        raw = bytearray(encode_frame(frame, alert))
        raw[1] = 0x02
        frames, errors = decode_stream(bytes(raw))
        assert frames == []
        assert errors[0].kind == "unknown-version"

    def test_truncated_tail_reported(self):
        frame, alert = random_frame(np.random.default_rng(11))
        raw = encode_frame(frame, alert)
        frames, errors = decode_stream(raw + raw[: FRAME_LEN // 2])
        assert len(frames) == 1
        assert errors[-1].kind == "truncated-tail"
        assert errors[-1].length == FRAME_LEN // 2

    def test_frame_inside_garbage_recovered(self):
        rng = np.random.default_rng(12)
        frame, alert = random_frame(rng)
        raw = encode_frame(frame, alert)
        noise_before = rng.bytes(40)
        noise_after = rng.bytes(17)
        frames, errors = decode_stream(noise_before + raw + noise_after)
        assert DecodedFrame(frame, alert) in frames
        assert len(errors) >= 1

    def test_fuzz_never_emits_bad_crc(self):
        # Random garbage with frames sprinkled in: every emitted frame
        # must re-encode to a byte block whose CRC verifies.
        rng = np.random.default_rng(13)
        real = [random_frame(rng) for _ in range(20)]
        stream = bytearray()
        for frame, alert in real:
            stream += rng.bytes(int(rng.integers(0, 50)))
            block = bytearray(encode_frame(frame, alert))
            if rng.random() < 0.4:  # corrupt some frames
                block[int(rng.integers(len(block)))] ^= 1 << int(rng.integers(8))
            stream += block
        frames, _ = decode_stream(bytes(stream))
        valid = {encode_frame(f, a) for f, a in real}
        for d in frames:
            assert encode_frame(d.frame, d.alert) in valid

    def test_chunking_invariance(self):
        rng = np.random.default_rng(14)
        stream = bytearray()
        for _ in range(30):
            frame, alert = random_frame(rng)
            if rng.random() < 0.3:
                stream += rng.bytes(int(rng.integers(1, 20)))
            stream += encode_frame(frame, alert)
        whole_frames, whole_errors = decode_stream(bytes(stream))
        for trial in range(30):
            split_rng = np.random.default_rng(100 + trial)
            cuts = sorted(split_rng.integers(0, len(stream), size=8).tolist())
            decoder = StreamDecoder()
            events = []
            prev = 0
            for cut in cuts + [len(stream)]:
                events += decoder.feed(bytes(stream[prev:cut]))
                prev = cut
            events += decoder.close()
            frames = [e for e in events if isinstance(e, DecodedFrame)]
            errors = [e for e in events if isinstance(e, DecodeError)]
            assert frames == whole_frames
            assert errors == whole_errors
