"""Closed-form attrition model for a cell culture under radical attack.

Radicals accumulate as ``r(t) = k t^2 / 2 + b`` and cells are attrited at
rate ``dc/dt = -alpha r(t)``, which integrates to the survival cubic

    c(t) = c0 - alpha k t^3 / 6 - alpha b t.

Everything here is a pure function of its arguments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, NoExtinctionError

#: Consistency tolerance between an explicit alpha and b / (a + b).
ALPHA_TOL = 1e-12


def _finite(*values):
    return all(math.isfinite(v) for v in values)


def effectiveness(a, b):
    """Attack effectiveness ``b / (a + b)`` of radicals against antioxidants.

    Equals 1 with no antioxidants and falls strictly as ``a`` grows.
    """
    a = float(a)
    b = float(b)
    if not _finite(a, b):
        raise DomainError(f"effectiveness needs finite inputs, got a={a}, b={b}")
    if b <= 0:
        raise DomainError(f"b must be > 0, got {b}")
    if a < 0:
        raise DomainError(f"a must be >= 0, got {a}")
    return b / (a + b)


@dataclass(frozen=True, kw_only=True)
class CultureParams:
    """Parameter set of the culture model.

    Give ``alpha`` directly, or the antioxidant fraction ``a`` (alpha is then
    derived from ``b``), or both if they agree. The closed limits
    ``alpha == 0`` and ``b == 0`` are accepted so degenerate scenarios can be
    evaluated; :meth:`check_strict` rejects them.
    """

    b: float
    k: float
    c0: float
    alpha: float | None = None
    a: float | None = None

    def __post_init__(self):
        for name in ("b", "k", "c0"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.b < 0:
            raise DomainError(f"b must be >= 0, got {self.b}")
        if self.k < 0:
            raise DomainError(f"k must be >= 0, got {self.k}")
        if self.c0 <= 0:
            raise DomainError(f"c0 must be > 0, got {self.c0}")

        if self.a is not None:
            derived = effectiveness(self.a, self.b)
            object.__setattr__(self, "a", float(self.a))
            if self.alpha is None:
                object.__setattr__(self, "alpha", derived)
            elif abs(float(self.alpha) - derived) > ALPHA_TOL:
                raise DomainError(
                    f"alpha={self.alpha} disagrees with b/(a+b)={derived}")
        if self.alpha is None:
            raise DomainError("either alpha or a must be given")
        alpha = float(self.alpha)
        if not (math.isfinite(alpha) and 0.0 <= alpha <= 1.0):
            raise DomainError(f"alpha out of (0,1]: {alpha}")
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def from_composition(cls, a, b, k, c0):
        return cls(a=a, b=b, k=k, c0=c0)

    def check_strict(self):
        """Enforce ``0 < alpha <= 1`` and ``b > 0``; returns self."""
        if not self.alpha > 0:
            raise DomainError(f"alpha out of (0,1]: {self.alpha}")
        if not self.b > 0:
            raise DomainError(f"b must be > 0, got {self.b}")
        return self

    def with_param(self, name, value):
        """Copy with one parameter substituted.

        Substituting ``a`` (or ``b`` when ``a`` is set) re-derives alpha;
        substituting ``alpha`` drops ``a``.
        """
        if name == "alpha":
            return replace(self, alpha=value, a=None)
        if name == "a":
            return replace(self, a=value, alpha=None)
        if name == "b":
            if self.a is not None:
                return replace(self, b=value, alpha=None)
            return replace(self, b=value)
        if name in ("k", "c0"):
            return replace(self, **{name: value})
        raise KeyError(f"unknown parameter {name!r}")


#: The reference scenario: alpha = 0.8, k = 1, b = 0.2, c0 = 100.
PAPER_PARAMS = CultureParams(alpha=0.8, k=1.0, b=0.2, c0=100.0)


def _time(t):
    arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError(f"time must be finite and >= 0, got {t}")
    return arr


def _out(value, t):
    return float(value) if np.ndim(t) == 0 else value


def radical_level(t, p):
    """``k t^2 / 2 + b``; scalar or array ``t``."""
    tt = _time(t)
    return _out(p.k * tt * tt / 2.0 + p.b, t)


def cell_survival(t, p):
    """Unclamped survival cubic; negative past extinction."""
    tt = _time(t)
    return _out(p.c0 - p.alpha * p.k * tt**3 / 6.0 - p.alpha * p.b * tt, t)


def survival_rate(t, p):
    """``dc/dt = -alpha r(t)``."""
    tt = _time(t)
    return _out(-p.alpha * (p.k * tt * tt / 2.0 + p.b), t)


def survival_coefficients(p):
    """Coefficients of c(t) in ascending powers: (c0, lin, quad, cubic)."""
    return np.array([p.c0, -p.alpha * p.b, 0.0, -p.alpha * p.k / 6.0])


def radical_coefficients(p):
    """Coefficients of r(t) in ascending powers: (b, 0, k/2)."""
    return np.array([p.b, 0.0, p.k / 2.0])


def extinction_time(p):
    """Unique positive root of the survival cubic, by bracketing bisection.

    The upper bracket starts at 1 and doubles until c < 0. Stops once
    ``|c(t)| <= c0 * 1e-10`` or the bracket cannot shrink further.
    """
    if p.alpha == 0 or (p.k == 0 and p.b == 0):
        raise NoExtinctionError(
            f"no attrition with alpha={p.alpha}, k={p.k}, b={p.b}")
    tol = p.c0 * 1e-10
    lo, hi = 0.0, 1.0
    while cell_survival(hi, p) >= 0:
        hi *= 2.0
        if not math.isfinite(hi):
            raise NoExtinctionError("could not bracket extinction time")
    mid = hi
    while True:
        mid = 0.5 * (lo + hi)
        value = cell_survival(mid, p)
        if abs(value) <= tol or mid in (lo, hi):
            return mid
        if value > 0:
            lo = mid
        else:
            hi = mid


def time_grid(t0, t_end, dt):
    """``t0, t0+dt, ...`` ending exactly on ``t_end`` (last step may be short)."""
    if not (dt > 0 and t_end > t0):
        raise DomainError(f"bad grid: t0={t0}, t_end={t_end}, dt={dt}")
    span = t_end - t0
    n = int(math.floor(span / dt + 1e-9))
    times = t0 + dt * np.arange(n + 1, dtype=float)
    if t_end - times[-1] > 1e-9 * dt:
        times = np.append(times, t_end)
    else:
        times[-1] = t_end
    return times


@dataclass(frozen=True)
class Trajectory:
    """Sampled cell counts and radical levels."""

    times: np.ndarray
    cells: np.ndarray
    radicals: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        arrays = [np.asarray(x, dtype=float) for x in (self.times, self.cells, self.radicals)]
        if not (len(arrays[0]) == len(arrays[1]) == len(arrays[2]) >= 1):
            raise DomainError("trajectory arrays must share a nonzero length")
        if np.any(np.diff(arrays[0]) <= 0):
            raise DomainError("trajectory times must be strictly increasing")
        for name, arr in zip(("times", "cells", "radicals"), arrays):
            object.__setattr__(self, name, arr)

    def __len__(self):
        return len(self.times)

    @property
    def cells_clamped(self):
        return np.maximum(self.cells, 0.0)

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        return all(np.array_equal(x, y) for x, y in zip(
            (self.times, self.cells, self.radicals),
            (other.times, other.cells, other.radicals)))


def closed_form_trajectory(p, times):
    times = _time(times)
    return Trajectory(times, cell_survival(times, p), radical_level(times, p),
                      meta={"method": "closed"})
