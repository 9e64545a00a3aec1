"""Virtual glove device: deterministic sinusoidal flex channels plus a PWM sink.

Lets the whole pipeline run and be tested without hardware. One emulator
instance is single-owner; PWM commands are applied between steps.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import GlovekitError, TransportError
from .wire import ADC_MAX, NUM_CHANNELS, PwmCommand, SensorFrame, encode_frame

DEFAULT_RATE = 350.0


@dataclass(frozen=True)
class ChannelWaveform:
    """Sinusoid parameters for one flex channel, in ADC counts / Hz / rad."""

    offset: float = 512.0
    amplitude: float = 0.0
    frequency: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.offset - self.amplitude and self.offset + self.amplitude <= ADC_MAX):
            raise GlovekitError(
                f"waveform range {self.offset}±{self.amplitude} exceeds [0, {ADC_MAX}]"
            )


@dataclass(frozen=True)
class EmulatorConfig:
    rate: float = DEFAULT_RATE
    channels: tuple[ChannelWaveform, ...] = tuple(ChannelWaveform() for _ in range(NUM_CHANNELS))
    noise_std: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.rate <= 0:
            raise GlovekitError(f"rate must be positive, got {self.rate}")
        if len(self.channels) != NUM_CHANNELS:
            raise GlovekitError(f"expected {NUM_CHANNELS} channel waveforms")
        if self.noise_std < 0:
            raise GlovekitError("noise_std must be nonnegative")


def _round_half_away(x: float) -> int:
    return math.floor(x + 0.5) if x >= 0 else math.ceil(x - 0.5)


class GloveEmulator:
    """Produces the 350 Hz sensor stream and records the last PWM command."""

    def __init__(self, config: EmulatorConfig):
        self.config = config
        self.t = 0.0
        self.last_pwm = PwmCommand((0, 0, 0, 0, 0))
        self._rng = np.random.default_rng(config.seed)
        self._step = 0

    def step(self) -> SensorFrame:
        """Emit the frame for the current clock, then advance by 1/rate."""
        cfg = self.config
        t = self.t
        if cfg.noise_std > 0:
            noise = self._rng.normal(0.0, cfg.noise_std, NUM_CHANNELS)
        else:
            noise = np.zeros(NUM_CHANNELS)
        values = []
        for i, ch in enumerate(cfg.channels):
            x = ch.offset + ch.amplitude * math.sin(2.0 * math.pi * ch.frequency * t + ch.phase)
            v = _round_half_away(x + noise[i])
            values.append(min(max(v, 0), ADC_MAX))
        self._step += 1
        # integer step count avoids drift over long runs
        self.t = self._step / cfg.rate
        return SensorFrame(tuple(values))

    def handle_pwm(self, cmd: PwmCommand) -> None:
        self.last_pwm = cmd


def run_emulator(config: EmulatorConfig, duration: float, transport, fast: bool = True) -> int:
    """Write floor(duration * rate) encoded frames to the transport.

    ``transport`` is anything with a ``write(bytes)`` method. In real-time
    mode writes are paced at 1/rate; fast mode emits identical bytes without
    sleeping. A closed transport terminates cleanly; returns frames written.
    """
    if duration <= 0:
        raise GlovekitError(f"duration must be positive, got {duration}")
    emulator = GloveEmulator(config)
    total = math.floor(duration * config.rate)
    start = time.monotonic()
    written = 0
    for i in range(total):
        data = encode_frame(emulator.step())
        try:
            transport.write(data)
        except (OSError, ValueError, TransportError):
            break
        written += 1
        if not fast:
            target = start + (i + 1) / config.rate
            delay = target - time.monotonic()
            if delay > 0:
                time.sleep(delay)
    return written
