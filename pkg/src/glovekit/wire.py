"""Glove wire protocol: sensor-frame framing and the PWM command channel.

Sensor frames travel glove -> host as fixed 13-byte records:

    0xA5 | ch1..ch5 as little-endian uint16 | XOR of the 10 payload bytes | 0x0A

Force-feedback commands travel host -> glove as ASCII lines
``"P <v1> <v2> <v3> <v4> <v5>\\n"`` with decimal duty-cycle values in [0, 255].
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from .errors import ProtocolError

SYNC_BYTE = 0xA5
TERMINATOR = 0x0A
NUM_CHANNELS = 5
ADC_MAX = 1023
PWM_MAX = 255
FRAME_SIZE = 13  # sync + 5 * uint16 + checksum + terminator

_PAYLOAD = struct.Struct("<5H")


@dataclass(frozen=True)
class SensorFrame:
    """One decoded 5-channel flex-sensor sample (raw 10-bit ADC counts)."""

    channels: tuple[int, int, int, int, int]

    def __post_init__(self):
        if len(self.channels) != NUM_CHANNELS:
            raise ProtocolError(f"expected {NUM_CHANNELS} channels, got {len(self.channels)}")
        for v in self.channels:
            if not (0 <= v <= ADC_MAX):
                raise ProtocolError(f"channel value {v} outside [0, {ADC_MAX}]")


@dataclass(frozen=True)
class PwmCommand:
    """Per-finger vibration-motor duty cycles in [0, 255]."""

    duty: tuple[int, int, int, int, int]

    def __post_init__(self):
        if len(self.duty) != NUM_CHANNELS:
            raise ProtocolError(f"expected {NUM_CHANNELS} duty values, got {len(self.duty)}")
        for v in self.duty:
            if not (0 <= v <= PWM_MAX):
                raise ProtocolError(f"PWM value {v} outside [0, {PWM_MAX}]")


def encode_frame(frame: SensorFrame) -> bytes:
    """Encode a sensor frame into its 13-byte wire representation."""
    payload = _PAYLOAD.pack(*frame.channels)
    checksum = 0
    for b in payload:
        checksum ^= b
    return bytes([SYNC_BYTE]) + payload + bytes([checksum, TERMINATOR])


@dataclass
class StreamParser:
    """Incremental frame extractor tolerating garbage and split input.

    Single-owner mutable state: feed byte chunks in order, complete frames
    come out in order. Corrupt bytes are skipped (one byte at a time, resync
    on the next 0xA5) and counted, never fatal.
    """

    buffer: bytearray = field(default_factory=bytearray)
    frames_decoded: int = 0
    bytes_skipped: int = 0

    def feed(self, data: bytes) -> list[SensorFrame]:
        self.buffer.extend(data)
        buf = self.buffer
        n = len(buf)
        frames: list[SensorFrame] = []
        pos = 0
        while True:
            start = buf.find(SYNC_BYTE, pos)
            if start < 0:
                self.bytes_skipped += n - pos
                pos = n
                break
            self.bytes_skipped += start - pos
            pos = start
            if n - pos < FRAME_SIZE:
                break
            if buf[pos + FRAME_SIZE - 1] == TERMINATOR and self._frame_ok(buf, pos):
                frames.append(SensorFrame(_PAYLOAD.unpack_from(buf, pos + 1)))
                pos += FRAME_SIZE
            else:
                # bad checksum/terminator/range: drop the sync byte and rescan
                self.bytes_skipped += 1
                pos += 1
        del buf[:pos]
        self.frames_decoded += len(frames)
        return frames

    @staticmethod
    def _frame_ok(buf: bytearray, pos: int) -> bool:
        checksum = 0
        for b in buf[pos + 1 : pos + 11]:
            checksum ^= b
        if checksum != buf[pos + 11]:
            return False
        return all(v <= ADC_MAX for v in _PAYLOAD.unpack_from(buf, pos + 1))


def decode_stream(parser: StreamParser, data: bytes) -> list[SensorFrame]:
    """Functional alias for :meth:`StreamParser.feed`."""
    return parser.feed(data)


def encode_pwm_command(cmd: PwmCommand) -> str:
    """Format a PWM command as the ASCII line ``"P v1 v2 v3 v4 v5\\n"``."""
    return "P " + " ".join(str(v) for v in cmd.duty) + "\n"


def parse_pwm_command(line: str) -> PwmCommand:
    """Parse a host PWM command line; raises ProtocolError when malformed."""
    tokens = line.strip().split(" ")
    if len(tokens) != NUM_CHANNELS + 1:
        raise ProtocolError(f"expected 6 fields, got {len(tokens)}: {line!r}")
    if tokens[0] != "P":
        raise ProtocolError(f"unknown command verb {tokens[0]!r}")
    values = []
    for tok in tokens[1:]:
        try:
            values.append(int(tok))
        except ValueError:
            raise ProtocolError(f"non-numeric PWM value {tok!r}") from None
    for v in values:
        if not (0 <= v <= PWM_MAX):
            raise ProtocolError(f"PWM value {v} outside [0, {PWM_MAX}]")
    return PwmCommand(tuple(values))
