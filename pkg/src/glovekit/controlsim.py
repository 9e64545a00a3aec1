"""Per-joint PD tracking on a second-order plant, plus stream-rate resampling.

Stand-in for a robot's built-in low-level impedance controller: each joint is
an independent inertia-damper plant driven by a torque-limited PD law that
tracks a reference trajectory at the control rate (default 200 Hz).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GlovekitError

DEFAULT_CONTROL_RATE = 200.0


@dataclass(frozen=True)
class Gains:
    kp: float = 5.0  # N*m/rad
    kd: float = 0.2  # N*m*s/rad

    def __post_init__(self):
        if self.kp <= 0:
            raise GlovekitError(f"Kp must be positive, got {self.kp}")
        if self.kd < 0:
            raise GlovekitError(f"Kd must be nonnegative, got {self.kd}")


@dataclass(frozen=True)
class PlantParams:
    m: float = 0.01  # inertia, kg*m^2
    b: float = 0.05  # viscous damping, N*m*s/rad
    torque_limit: float = 2.0  # N*m

    def __post_init__(self):
        if self.m <= 0:
            raise GlovekitError(f"inertia must be positive, got {self.m}")
        if self.b < 0:
            raise GlovekitError(f"damping must be nonnegative, got {self.b}")
        if self.torque_limit <= 0:
            raise GlovekitError(f"torque limit must be positive, got {self.torque_limit}")


@dataclass
class PlantState:
    theta: np.ndarray  # rad, per joint
    omega: np.ndarray  # rad/s, per joint


@dataclass(frozen=True)
class TrackingResult:
    executed: np.ndarray  # (T, D) rad
    rmse: np.ndarray  # (D,) rad
    max_abs_error: np.ndarray  # (D,) rad


def pd_torque(gains: Gains, theta_des, omega_des, theta, omega, torque_limit: float):
    """Torque-limited PD law; works elementwise on arrays."""
    tau = gains.kp * (np.asarray(theta_des) - theta) + gains.kd * (np.asarray(omega_des) - omega)
    return np.clip(tau, -torque_limit, torque_limit)


def step_plant(state: PlantState, torque, dt: float, params: PlantParams) -> PlantState:
    """Semi-implicit Euler step of the inertia-damper plant."""
    if dt <= 0:
        raise GlovekitError(f"dt must be positive, got {dt}")
    omega = state.omega + dt * (np.asarray(torque) - params.b * state.omega) / params.m
    theta = state.theta + dt * omega
    return PlantState(theta, omega)


def simulate_tracking(
    reference: np.ndarray,
    gains: Gains = Gains(),
    params: PlantParams = PlantParams(),
    rate: float = DEFAULT_CONTROL_RATE,
) -> TrackingResult:
    """Track a (T, D) reference from rest at its first row.

    Desired velocities come from backward finite differences of the reference.
    """
    reference = np.atleast_2d(np.asarray(reference, dtype=float))
    if not np.all(np.isfinite(reference)):
        raise GlovekitError("reference contains non-finite entries")
    if rate <= 0:
        raise GlovekitError(f"rate must be positive, got {rate}")
    dt = 1.0 / rate
    t_steps, d = reference.shape
    omega_des = np.zeros_like(reference)
    omega_des[1:] = (reference[1:] - reference[:-1]) * rate

    state = PlantState(reference[0].copy(), np.zeros(d))
    executed = np.empty_like(reference)
    executed[0] = state.theta
    for t in range(1, t_steps):
        tau = pd_torque(
            gains, reference[t], omega_des[t], state.theta, state.omega, params.torque_limit
        )
        state = step_plant(state, tau, dt, params)
        executed[t] = state.theta

    error = executed - reference
    rmse = np.sqrt((error**2).mean(axis=0))
    return TrackingResult(executed, rmse, np.abs(error).max(axis=0))


def resample_linear(series: np.ndarray, r1: float, r2: float) -> np.ndarray:
    """Linearly resample a uniformly sampled (T, D) series from rate r1 to r2.

    Output length is floor((T-1) * r2 / r1) + 1; sample j interpolates at
    source index j * r1 / r2.
    """
    if r1 <= 0 or r2 <= 0:
        raise GlovekitError("rates must be positive")
    series = np.atleast_2d(np.asarray(series, dtype=float))
    t_in = series.shape[0]
    if t_in < 2:
        raise GlovekitError(f"need T >= 2 samples to resample, got {t_in}")
    t_out = math.floor((t_in - 1) * r2 / r1) + 1
    src = np.arange(t_out) * (r1 / r2)
    grid = np.arange(t_in, dtype=float)
    out = np.empty((t_out, series.shape[1]))
    for d in range(series.shape[1]):
        out[:, d] = np.interp(src, grid, series[:, d])
    return out
