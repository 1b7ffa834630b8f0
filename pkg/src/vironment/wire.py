"""Byte-exact framing for scan frames over the necklace-to-display link.

Frame layout, all multi-byte fields little-endian:

    offset 0   sync 0xAA
    offset 1   version 0x01
    offset 2   seq          u16
    offset 4   timestamp_ms u32
    offset 8   readings     12 x u16 millimeters, 0xFFFF = no echo
    offset 32  alert_flags  u8, bit0 = led/horn
    offset 33  crc          u16 over offsets 1..32 inclusive

The CRC is CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF, no reflection,
no final xor).  The decoder scans for the sync byte and, on any CRC or
version failure, discards a single byte and resynchronizes, so a
corrupted stream loses frames but never derails.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .scanner import NUM_SENSORS, ScanFrame

SYNC = 0xAA
VERSION = 0x01
FRAME_LEN = 35

_HEADER_FMT = "<BBHI12HB"  # everything except the trailing crc

_CRC_TABLE = []
for _byte in range(256):
    _crc = _byte << 8
    for _ in range(8):
        _crc = ((_crc << 1) ^ 0x1021) if _crc & 0x8000 else (_crc << 1)
        _crc &= 0xFFFF
    _CRC_TABLE.append(_crc)


def crc16(data: bytes) -> int:
    """CRC-16/CCITT-FALSE. crc16(b"123456789") == 0x29B1."""
    crc = 0xFFFF
    for b in data:
        crc = ((crc << 8) & 0xFFFF) ^ _CRC_TABLE[((crc >> 8) ^ b) & 0xFF]
    return crc


def encode_frame(frame: ScanFrame, alert: bool = False) -> bytes:
    """Serialize one frame to its 35-byte wire form."""
    body = struct.pack(
        _HEADER_FMT,
        SYNC,
        VERSION,
        frame.seq,
        frame.timestamp_ms,
        *frame.readings,
        0x01 if alert else 0x00,
    )
    return body + struct.pack("<H", crc16(body[1:]))


@dataclass(frozen=True)
class DecodedFrame:
    frame: ScanFrame
    alert: bool


@dataclass(frozen=True)
class DecodeError:
    """One contiguous discarded region of the input stream."""

    kind: str  # "crc-mismatch" | "unknown-version" | "desync" | "truncated-tail"
    offset: int  # absolute stream offset where the region began
    length: int  # bytes discarded


def _parse(raw: bytes) -> DecodedFrame:
    fields = struct.unpack(_HEADER_FMT, raw[: FRAME_LEN - 2])
    seq, timestamp_ms = fields[2], fields[3]
    readings = fields[4 : 4 + NUM_SENSORS]
    flags = fields[4 + NUM_SENSORS]
    frame = ScanFrame(seq=seq, readings=readings, timestamp_ms=timestamp_ms)
    return DecodedFrame(frame=frame, alert=bool(flags & 0x01))


class StreamDecoder:
    """Incremental decoder; feed() arbitrary chunks, get frames and error events.

    The decoded frame sequence is independent of how the stream is
    chunked.  Each maximal run of discarded bytes produces exactly one
    DecodeError, tagged with the first failure diagnosed in that run;
    the event is emitted once the run is closed by a valid frame or by
    close().
    """

    def __init__(self):
        self._buf = bytearray()
        self._base = 0  # absolute stream offset of _buf[0]
        self._bad_start: int | None = None
        self._bad_kind: str | None = None
        self._bad_len = 0

    def _discard(self, n: int, kind: str) -> None:
        if n <= 0:
            return
        if self._bad_start is None:
            self._bad_start = self._base
            self._bad_kind = kind
        self._bad_len += n
        del self._buf[:n]
        self._base += n

    def _flush_bad(self, events: list) -> None:
        if self._bad_start is not None:
            events.append(DecodeError(self._bad_kind, self._bad_start, self._bad_len))
            self._bad_start = None
            self._bad_kind = None
            self._bad_len = 0

    def _scan(self, events: list, closed: bool) -> None:
        buf = self._buf
        while buf:
            if buf[0] != SYNC:
                idx = buf.find(SYNC)
                self._discard(idx if idx >= 0 else len(buf), "desync")
                continue
            if len(buf) < FRAME_LEN:
                if closed:
                    self._discard(len(buf), "truncated-tail")
                break
            if buf[1] != VERSION:
                self._discard(1, "unknown-version")
                continue
            stored = int.from_bytes(buf[FRAME_LEN - 2 : FRAME_LEN], "little")
            if crc16(bytes(buf[1 : FRAME_LEN - 2])) != stored:
                self._discard(1, "crc-mismatch")
                continue
            self._flush_bad(events)
            events.append(_parse(bytes(buf[:FRAME_LEN])))
            del buf[:FRAME_LEN]
            self._base += FRAME_LEN

    def feed(self, data: bytes) -> list[DecodedFrame | DecodeError]:
        """Consume a chunk, returning any frames and error events it completes."""
        self._buf.extend(data)
        events: list[DecodedFrame | DecodeError] = []
        self._scan(events, closed=False)
        return events

    def close(self) -> list[DecodedFrame | DecodeError]:
        """Signal end of stream; flushes any dangling partial frame as an error."""
        events: list[DecodedFrame | DecodeError] = []
        self._scan(events, closed=True)
        self._flush_bad(events)
        return events


def decode_stream(data: bytes) -> tuple[list[DecodedFrame], list[DecodeError]]:
    """Decode a complete byte buffer into (frames, error events)."""
    dec = StreamDecoder()
    events = dec.feed(data) + dec.close()
    frames = [e for e in events if isinstance(e, DecodedFrame)]
    errors = [e for e in events if isinstance(e, DecodeError)]
    return frames, errors
