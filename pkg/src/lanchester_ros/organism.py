"""Per-minute apoptosis simulator for an individual following a daily timetable.

Each minute radicals are produced (resting baseline plus a linear ramp inside
the current activity), antioxidants neutralize what they can, and any excess
kills ``floor(kill_ratio * excess)`` cells. Radicals that killed are spent;
an excess too small to kill a whole cell carries over. Antioxidants then
replenish up to capacity.

A linear ramp makes cumulative activity load triangular, ``1+2+...+n``, so
the minute at which a load ``S`` is reached solves ``n(n+1)/2 = S``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .errors import ConfigError, DomainError, EndOfDayError

MINUTES_PER_DAY = 1440
REST = "rest"


def positive_root(S):
    """Nonnegative root of ``n^2 + n - 2S = 0``."""
    S = float(S)
    if not math.isfinite(S) or S < 0:
        raise DomainError(f"S must be finite and >= 0, got {S}")
    return (-1.0 + math.sqrt(1.0 + 8.0 * S)) / 2.0


def ticks_to_threshold(S):
    """Smallest integer n with ``n(n+1)/2 >= S``."""
    n = max(0, math.ceil(positive_root(S)))
    # float root may land one off near perfect triangular numbers
    while n > 0 and (n - 1) * n / 2 >= S:
        n -= 1
    while n * (n + 1) / 2 < S:
        n += 1
    return n


@dataclass(frozen=True)
class Activity:
    name: str
    start_minute: int
    duration: int
    intensity: float

    def __post_init__(self):
        if not self.name or self.name == REST:
            raise ConfigError(f"invalid activity name {self.name!r}")
        if not (0 <= self.start_minute < MINUTES_PER_DAY):
            raise ConfigError(f"{self.name}: start_minute must be in [0, 1440)")
        if self.duration < 1 or self.start_minute + self.duration > MINUTES_PER_DAY:
            raise ConfigError(f"{self.name}: duration must be >= 1 and end by minute 1440")
        if not (math.isfinite(self.intensity) and self.intensity >= 0):
            raise ConfigError(f"{self.name}: intensity must be finite and >= 0")

    @property
    def end_minute(self):
        return self.start_minute + self.duration


@dataclass(frozen=True)
class Schedule:
    activities: tuple = ()

    def __post_init__(self):
        acts = tuple(sorted(self.activities, key=lambda a: a.start_minute))
        for prev, nxt in zip(acts, acts[1:]):
            if nxt.start_minute < prev.end_minute:
                raise ConfigError(f"activities {prev.name!r} and {nxt.name!r} overlap")
        object.__setattr__(self, "activities", acts)

    def at(self, minute):
        """``(activity, j)`` with j the 1-based minute inside it, or ``(None, 0)``."""
        for act in self.activities:
            if act.start_minute <= minute < act.end_minute:
                return act, minute - act.start_minute + 1
        return None, 0

    def profile(self):
        """Per-minute intensity, ramp index and activity index (-1 at rest)."""
        intensity = np.zeros(MINUTES_PER_DAY)
        ramp = np.zeros(MINUTES_PER_DAY)
        which = np.full(MINUTES_PER_DAY, -1, dtype=np.int64)
        for i, act in enumerate(self.activities):
            sl = slice(act.start_minute, act.end_minute)
            intensity[sl] = act.intensity
            ramp[sl] = np.arange(1, act.duration + 1)
            which[sl] = i
        return intensity, ramp, which


@dataclass(frozen=True)
class OrganismConfig:
    baseline_production: float
    antioxidant_capacity: float
    replenish_rate: float
    kill_ratio: float
    episode_threshold: float = 30000.0

    def __post_init__(self):
        for name in ("baseline_production", "antioxidant_capacity", "replenish_rate",
                     "kill_ratio", "episode_threshold"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value >= 0):
                raise ConfigError(f"{name} must be finite and >= 0, got {value}")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class OrganismState:
    minute: int = 0
    radical_pool: float = 0.0
    antioxidant_pool: float = 0.0
    cumulative_dead: int = 0

    def __post_init__(self):
        if not (0 <= self.minute <= MINUTES_PER_DAY):
            raise DomainError(f"minute must be in [0, 1440], got {self.minute}")
        if self.radical_pool < 0 or self.antioxidant_pool < 0 or self.cumulative_dead < 0:
            raise DomainError("organism pools and counts must be nonnegative")

    @classmethod
    def rested(cls, cfg):
        """Start of day with a full antioxidant pool."""
        return cls(0, 0.0, cfg.antioxidant_capacity, 0)


@dataclass(frozen=True)
class MinuteRecord:
    minute: int
    activity: str
    production: float
    neutralized: float
    dead: int
    radical_pool: float
    antioxidant_pool: float
    cumulative_dead: int
    spent: float = 0.0


def step_minute(state, cfg, sched):
    """Advance one minute; returns ``(new_state, record)``."""
    if state.minute >= MINUTES_PER_DAY:
        raise EndOfDayError(f"minute {state.minute} is past the end of the day")
    if state.antioxidant_pool > cfg.antioxidant_capacity:
        raise DomainError("antioxidant pool exceeds capacity")
    act, j = sched.at(state.minute)
    intensity = act.intensity if act is not None else 0.0
    production = cfg.baseline_production + intensity * j
    rad = state.radical_pool + production
    neutralized = min(rad, state.antioxidant_pool)
    rad -= neutralized
    anti = state.antioxidant_pool - neutralized
    dead = math.floor(cfg.kill_ratio * rad)
    spent = 0.0
    if dead > 0:
        spent, rad = rad, 0.0
    anti = min(anti + cfg.replenish_rate, cfg.antioxidant_capacity)
    cumulative = state.cumulative_dead + dead
    record = MinuteRecord(state.minute, act.name if act is not None else REST,
                          production, neutralized, dead, rad, anti, cumulative, spent)
    return OrganismState(state.minute + 1, rad, anti, cumulative), record


@dataclass(frozen=True)
class SimReport:
    records: tuple
    total_dead: int
    mean_dead_per_minute: float
    threshold_minute: int | None
    final_state: OrganismState
    extra: dict = field(default_factory=dict, compare=False)


def simulate_day(cfg, sched, initial=None):
    """Run a full day (1440 minutes) from ``initial`` (default: rested).

    ``threshold_minute`` is the elapsed-minute count at which cumulative
    unneutralized radicals first reach ``cfg.episode_threshold`` (``None``
    if never).
    """
    if initial is None:
        initial = OrganismState.rested(cfg)
    if initial.minute != 0:
        raise ConfigError("a day must start at minute 0")
    if initial.antioxidant_pool > cfg.antioxidant_capacity:
        raise ConfigError("initial antioxidant pool exceeds capacity")
    intensity, ramp, which = sched.profile()
    out, dead, marker = kernels.organism_day(
        intensity, ramp, cfg.baseline_production, cfg.antioxidant_capacity,
        cfg.replenish_rate, cfg.kill_ratio, float(initial.radical_pool),
        float(initial.antioxidant_pool), cfg.episode_threshold)
    cumulative = initial.cumulative_dead + np.cumsum(dead)
    names = [a.name for a in sched.activities]
    records = tuple(
        MinuteRecord(m, names[which[m]] if which[m] >= 0 else REST,
                     float(out[m, 0]), float(out[m, 1]), int(dead[m]),
                     float(out[m, 3]), float(out[m, 4]), int(cumulative[m]),
                     float(out[m, 2]))
        for m in range(MINUTES_PER_DAY))
    total = int(dead.sum())
    final = OrganismState(MINUTES_PER_DAY, float(out[-1, 3]), float(out[-1, 4]),
                          int(cumulative[-1]))
    return SimReport(records, total, total / MINUTES_PER_DAY,
                     None if marker < 0 else int(marker), final)


def simulate_days(cfg, sched, days, initial=None):
    """Consecutive days, carrying pools (not the clock) over midnight."""
    reports = []
    state = OrganismState.rested(cfg) if initial is None else initial
    for _ in range(days):
        report = simulate_day(cfg, sched, state)
        reports.append(report)
        state = replace(report.final_state, minute=0)
    return reports
