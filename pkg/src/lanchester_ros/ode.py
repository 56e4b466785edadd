"""Fixed-step explicit integration of the coupled culture system.

The state is ``(c, r)`` with ``dc/dt = -alpha r`` and ``dr/dt = k t``;
initial state ``(c0, b)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import ConfigError, DomainError, NumericBlowUpError
from .model import Trajectory, cell_survival, radical_level, time_grid

METHODS = ("euler", "rk4")
MAX_STEPS = 10**8


class State(NamedTuple):
    c: float
    r: float


@dataclass(frozen=True)
class IntegratorSpec:
    method: str = "rk4"
    h: float = 0.01
    t0: float = 0.0
    t_end: float = 9.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if not (math.isfinite(self.h) and self.h > 0):
            raise ConfigError(f"step size must be > 0, got {self.h}")
        if not (math.isfinite(self.t0) and math.isfinite(self.t_end)
                and self.t_end > self.t0 >= 0):
            raise ConfigError(f"need t_end > t0 >= 0, got t0={self.t0}, t_end={self.t_end}")
        if (self.t_end - self.t0) / self.h > MAX_STEPS:
            raise ConfigError(f"more than {MAX_STEPS} steps requested")


def derivatives(t, s, p):
    """Right-hand side ``(-alpha r, k t)``."""
    if not (math.isfinite(s.c) and math.isfinite(s.r) and math.isfinite(t)):
        raise DomainError(f"non-finite state {s} at t={t}")
    if t < 0:
        raise DomainError(f"time must be >= 0, got {t}")
    return (-p.alpha * s.r, p.k * t)


def integrate(p, spec):
    """Integrate from ``(c0, b)`` over ``[t0, t_end]``.

    Samples every ``h``; the last step is shortened to land on ``t_end``.
    Raises :class:`NumericBlowUpError` carrying the step index if the state
    leaves the finite range.
    """
    times = time_grid(spec.t0, spec.t_end, spec.h)
    kernel = kernels.rk4_path if spec.method == "rk4" else kernels.euler_path
    # the initial condition is given at t=0; start elsewhere from the closed form
    c_start = cell_survival(spec.t0, p)
    r_start = radical_level(spec.t0, p)
    with np.errstate(over="ignore", invalid="ignore"):
        cells, radicals, bad = kernel(p.alpha, p.k, c_start, r_start, times)
    if bad >= 0:
        raise NumericBlowUpError(int(bad))
    return Trajectory(times, cells, radicals, meta={"method": spec.method, "h": spec.h})


def max_error_vs_analytic(traj, p):
    """Largest absolute deviation of (cells, radicals) from the closed forms."""
    if not (len(traj.times) == len(traj.cells) == len(traj.radicals)):
        raise DomainError("trajectory arrays differ in length")
    dc = np.max(np.abs(traj.cells - cell_survival(traj.times, p)))
    dr = np.max(np.abs(traj.radicals - radical_level(traj.times, p)))
    return float(dc), float(dr)
