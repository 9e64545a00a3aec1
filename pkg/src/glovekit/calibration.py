"""Calibration maps: raw flex counts -> joint angles, glove -> robot joint
coupling, and the proportional tactile -> PWM force-feedback map."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CalibrationError, ShapeMismatchError
from .wire import ADC_MAX, NUM_CHANNELS, PWM_MAX, PwmCommand, SensorFrame

DEFAULT_JOINT_MIN = 0.0
DEFAULT_JOINT_MAX = math.pi / 2


@dataclass(frozen=True)
class CalibrationProfile:
    """Per-channel raw extrema (ADC counts) and joint-angle range (rad)."""

    raw_min: tuple[float, ...]
    raw_max: tuple[float, ...]
    joint_min: tuple[float, ...]
    joint_max: tuple[float, ...]

    def __post_init__(self):
        lengths = {len(self.raw_min), len(self.raw_max), len(self.joint_min), len(self.joint_max)}
        if lengths != {NUM_CHANNELS}:
            raise CalibrationError(f"profile must have {NUM_CHANNELS} entries per field")
        for i in range(NUM_CHANNELS):
            if not self.raw_min[i] < self.raw_max[i]:
                raise CalibrationError(f"channel {i + 1}: raw_min must be < raw_max")
            if not self.joint_min[i] <= self.joint_max[i]:
                raise CalibrationError(f"channel {i + 1}: joint_min must be <= joint_max")


class ExtremaBuilder:
    """Accumulates per-channel min/max while the operator flexes and spreads."""

    def __init__(self):
        self.raw_min = [float(ADC_MAX)] * NUM_CHANNELS
        self.raw_max = [0.0] * NUM_CHANNELS
        self.frames_seen = 0

    def observe(self, frame: SensorFrame) -> None:
        for i, v in enumerate(frame.channels):
            if v < self.raw_min[i]:
                self.raw_min[i] = float(v)
            if v > self.raw_max[i]:
                self.raw_max[i] = float(v)
        self.frames_seen += 1

    def finalize(
        self,
        joint_min: tuple[float, ...] = (DEFAULT_JOINT_MIN,) * NUM_CHANNELS,
        joint_max: tuple[float, ...] = (DEFAULT_JOINT_MAX,) * NUM_CHANNELS,
    ) -> CalibrationProfile:
        for i in range(NUM_CHANNELS):
            if not self.raw_min[i] < self.raw_max[i]:
                raise CalibrationError(
                    f"incomplete calibration: channel {i + 1} has degenerate range "
                    f"[{self.raw_min[i]}, {self.raw_max[i]}]"
                )
        return CalibrationProfile(
            tuple(self.raw_min), tuple(self.raw_max), tuple(joint_min), tuple(joint_max)
        )


# kept for symmetry with the builder-style call sites
def observe_extrema(builder: ExtremaBuilder, frame: SensorFrame) -> ExtremaBuilder:
    builder.observe(frame)
    return builder


def raw_to_angle(profile: CalibrationProfile, raw) -> np.ndarray:
    """Linearly map raw counts to joint angles; out-of-range values clamp.

    ``raw`` is a SensorFrame, a length-5 sequence, or an (N, 5) array.
    """
    if isinstance(raw, SensorFrame):
        raw = raw.channels
    raw = np.asarray(raw, dtype=float)
    lo = np.asarray(profile.raw_min)
    hi = np.asarray(profile.raw_max)
    jmin = np.asarray(profile.joint_min)
    jmax = np.asarray(profile.joint_max)
    frac = (np.clip(raw, lo, hi) - lo) / (hi - lo)
    return jmin + frac * (jmax - jmin)


@dataclass(frozen=True)
class CouplingMap:
    """Fixed linear map from the 5 glove channels onto robot finger joints.

    Each output row is a convex combination (weights >= 0, summing to 1), so
    a constant input maps to the same constant on every output.
    """

    weights: np.ndarray  # (D_out, 5)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if w.ndim != 2 or w.shape[1] != NUM_CHANNELS:
            raise CalibrationError(f"coupling weights must be (D, {NUM_CHANNELS})")
        if np.any(w < 0):
            raise CalibrationError("coupling weights must be nonnegative")
        if not np.allclose(w.sum(axis=1), 1.0, atol=1e-9):
            raise CalibrationError("coupling weights must sum to 1 per output")

    @property
    def n_outputs(self) -> int:
        return self.weights.shape[0]


def apply_coupling(coupling: CouplingMap, glove_angles) -> np.ndarray:
    """Weighted combination of glove angles; accepts (5,) or (N, 5) input."""
    angles = np.asarray(glove_angles, dtype=float)
    if angles.shape[-1] != NUM_CHANNELS:
        raise ShapeMismatchError(
            f"expected {NUM_CHANNELS} glove angles, got {angles.shape[-1]}"
        )
    return angles @ coupling.weights.T


def identity_coupling_map() -> CouplingMap:
    return CouplingMap(np.eye(NUM_CHANNELS))


def default_coupling_map() -> CouplingMap:
    """Thumb/index/middle pass-through, ring and little averaged into one joint."""
    w = np.zeros((4, NUM_CHANNELS))
    w[0, 0] = 1.0
    w[1, 1] = 1.0
    w[2, 2] = 1.0
    w[3, 3] = 0.5
    w[3, 4] = 0.5
    return CouplingMap(w)


@dataclass(frozen=True)
class ForceFeedbackMap:
    """Proportional tactile -> PWM map with per-finger scaling."""

    f_max: float
    scale: tuple[float, ...] = (1.0,) * NUM_CHANNELS

    def __post_init__(self):
        if self.f_max <= 0:
            raise CalibrationError(f"f_max must be positive, got {self.f_max}")
        if len(self.scale) != NUM_CHANNELS:
            raise CalibrationError(f"scale must have {NUM_CHANNELS} entries")


def _round_half_away(x: float) -> int:
    return math.floor(x + 0.5) if x >= 0 else math.ceil(x - 0.5)


def tactile_to_pwm(fmap: ForceFeedbackMap, force: float, finger: int = 0) -> int:
    """Map one tactile reading to a PWM duty cycle; clamps into [0, 255]."""
    pwm = _round_half_away(PWM_MAX * fmap.scale[finger] * force / fmap.f_max)
    return min(max(pwm, 0), PWM_MAX)


def tactile_to_pwm_command(fmap: ForceFeedbackMap, forces) -> PwmCommand:
    """Map 5 tactile readings to a full PWM command."""
    forces = list(forces)
    if len(forces) != NUM_CHANNELS:
        raise ShapeMismatchError(f"expected {NUM_CHANNELS} tactile values")
    return PwmCommand(tuple(tactile_to_pwm(fmap, f, i) for i, f in enumerate(forces)))
