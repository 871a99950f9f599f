"""Time-dependent radio-frequency schedules for CTAP.

The six comb lines move according to a single ramp f(t) and its
tau-delayed copy: the pair (w5, w6) follows f(t) so the right trap
approaches the middle first, and (w3, w4) follows f(t - tau) so the
middle approaches the (stationary) left trap after the delay.  The
intuitive variant exchanges the two pulse roles.  An optional tanh
detuning shifts w2 down and w6 up to track the chemical-potential
imbalance of an interacting cloud during transfer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ScheduleError

MODES = ("counter_intuitive", "intuitive")


@dataclass(frozen=True)
class RampFunction:
    """Raised-cosine ramp: zero value and slope at both ends of its support."""

    peak: float  # rad/s
    duration: float  # s
    shape: str = "cosine"

    def __post_init__(self):
        if self.shape != "cosine":
            raise DomainError(f"only the cosine ramp is implemented, got {self.shape!r}")
        if self.peak < 0 or self.duration <= 0:
            raise DomainError("ramp peak must be >= 0 and duration > 0")


def ramp_value(ramp: RampFunction, t):
    """f(t) = peak/2 * (1 - cos(2 pi t / duration)) on [0, duration], else 0."""
    s = np.asarray(t, dtype=float) / ramp.duration
    inside = (s >= 0.0) & (s <= 1.0)
    val = 0.5 * ramp.peak * (1.0 - np.cos(2.0 * np.pi * np.where(inside, s, 0.0)))
    out = np.where(inside, val, 0.0)
    return float(out) if np.ndim(t) == 0 else out


@dataclass(frozen=True)
class DetuningProfile:
    """Complementary tanh detunings of the outer traps.

    dw2(t~) = 1/2 [1 - tanh(kappa t~)] dw0 runs from dw0 to 0;
    dw6 is its mirror; their sum is exactly dw0 at all times.
    t~ = t - T/2 with T the overall process duration.
    """

    kappa: float  # 1/s
    delta_omega0: float  # rad/s


def detuning_values(profile: DetuningProfile, t: float, total_T: float):
    """(dw2, dw6) at time t for a process of duration total_T."""
    if total_T <= 0:
        raise DomainError("total_T must be positive")
    th = math.tanh(profile.kappa * (t - 0.5 * total_T))
    dw2 = 0.5 * (1.0 - th) * profile.delta_omega0
    # complement exactly: dw2 + dw6 == delta_omega0
    dw6 = profile.delta_omega0 - dw2
    return dw2, dw6


@dataclass(frozen=True)
class CtapSchedule:
    """Frequency trajectories for one transport run.

    initial_omegas are the six comb lines at t = 0 (strictly increasing,
    uniform spacing over w2..w6); the ramp spans [0, total_T - tau] so
    both the direct and the delayed pulse complete by total_T.
    """

    initial_omegas: tuple  # 6 values, rad/s
    tau: float  # s
    total_T: float  # s
    mode: str = "counter_intuitive"
    ramp: RampFunction = None
    detuning: DetuningProfile | None = None

    def __post_init__(self):
        w = tuple(float(v) for v in self.initial_omegas)
        object.__setattr__(self, "initial_omegas", w)
        if len(w) != 6:
            raise DomainError("schedule needs exactly six initial frequencies")
        if np.min(np.diff(w)) <= 0:
            raise DomainError("initial frequencies must be strictly increasing")
        spacings = np.diff(w[1:])
        if np.max(np.abs(spacings - spacings[0])) > 1e-9 * spacings[0]:
            raise DomainError("initial spacing of w2..w6 must be uniform")
        if not 0 < self.tau < self.total_T:
            raise DomainError("tau must lie strictly inside (0, total_T)")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}")
        if self.ramp is None:
            raise DomainError("schedule requires a ramp")
        if abs(self.ramp.duration - (self.total_T - self.tau)) > 1e-9 * self.total_T:
            raise DomainError("ramp duration must equal total_T - tau")

    @property
    def initial_spacing(self) -> float:
        return self.initial_omegas[2] - self.initial_omegas[1]

    def min_spacing(self) -> float:
        """Closest approach of adjacent comb lines over the whole schedule."""
        return self.initial_spacing - 0.5 * self.ramp.peak


def frequencies_at(schedule: CtapSchedule, t: float) -> np.ndarray:
    """The six comb lines at time t (rad/s).

    Counter-intuitive mode moves (w5, w6) with f(t) and (w3, w4) with the
    delayed f(t - tau); intuitive mode swaps the two pulse roles.  The
    delayed pulse carries the Heaviside factor exactly as written, though
    the ramp's own support already enforces it.
    """
    w = schedule.initial_omegas
    f1 = ramp_value(schedule.ramp, t)
    theta = 1.0 if t >= schedule.tau else 0.0
    f2 = ramp_value(schedule.ramp, t - schedule.tau) * theta
    if schedule.mode == "counter_intuitive":
        first, second = f1, f2
    else:
        first, second = f2, f1
    out = np.array([
        w[0],
        w[1],
        w[2] - 0.5 * second,
        w[3] - second,
        w[4] - 0.5 * first - second,
        w[5] - first - second,
    ])
    if schedule.detuning is not None:
        dw2, dw6 = detuning_values(schedule.detuning, t, schedule.total_T)
        out[1] -= dw2
        out[5] += dw6
    if np.min(np.diff(out)) <= 0.0:
        raise ScheduleError(f"comb ordering violated at t = {t:.6e} s")
    return out


def required_peak(initial_spacing: float, min_spacing: float) -> float:
    """Ramp peak that lets adjacent lines approach to min_spacing.

    Each moving pair closes its gap by f/2, so peak = 2 (s0 - s_min).
    """
    if not 0 < min_spacing < initial_spacing:
        raise DomainError("need 0 < min_spacing < initial_spacing")
    return 2.0 * (initial_spacing - min_spacing)


def write_schedule_csv(path, schedule: CtapSchedule, n_times: int = 501,
                       header_lines=()):
    ts = np.linspace(0.0, schedule.total_T, n_times)
    with open(path, "w", newline="\n") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("t_s," + ",".join(f"w{i}_rad_s" for i in range(1, 7)) + "\n")
        for t in ts:
            w = frequencies_at(schedule, float(t))
            fh.write(f"{t:.17g}," + ",".join(f"{v:.17g}" for v in w) + "\n")
