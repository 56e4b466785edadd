"""One-parameter sensitivity sweeps and least-squares parameter fitting."""
from __future__ import annotations

import itertools
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConfigError, DomainError, NoExtinctionError
from .model import (CultureParams, Trajectory, closed_form_trajectory,
                    extinction_time, time_grid)

SWEEP_PARAMS = ("alpha", "k", "b", "a")
FIT_PARAMS = ("alpha", "k", "b")

GRID_POINTS = 25
SIMPLEX_RTOL = 1e-10
SIMPLEX_MAXITER = 500


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple
    base: CultureParams
    t_end: float = 12.0
    dt: float = 0.1

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMS:
            raise ConfigError(f"sweep parameter must be one of {SWEEP_PARAMS}, got {self.parameter!r}")
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ConfigError("sweep needs at least one value")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError("sweep values must be strictly increasing")
        if not (self.dt > 0 and self.t_end > 0):
            raise ConfigError(f"bad sampling window t_end={self.t_end}, dt={self.dt}")
        object.__setattr__(self, "values", values)
        for v in values:
            self.params_for(v)

    def params_for(self, value):
        try:
            return self.base.with_param(self.parameter, value).check_strict()
        except DomainError as exc:
            raise ConfigError(f"{self.parameter}={value!r} gives invalid parameters: {exc}") from exc


@dataclass(frozen=True)
class SweepEntry:
    value: float
    extinction_time: float | None
    trajectory: Trajectory


@dataclass(frozen=True)
class SweepResult:
    parameter: str
    entries: tuple

    @property
    def extinction_times(self):
        return [e.extinction_time for e in self.entries]


def _evaluate(spec, times, value):
    p = spec.params_for(value)
    try:
        t_star = extinction_time(p)
    except NoExtinctionError:
        t_star = None
    return SweepEntry(value, t_star, closed_form_trajectory(p, times))


def run_sweep(spec, workers=None, order=None):
    """Evaluate every sweep value on a shared time grid.

    ``workers > 1`` evaluates points on a thread pool; ``order`` permutes the
    evaluation order (testing hook). Entries are always assembled by input
    index.
    """
    times = time_grid(0.0, spec.t_end, spec.dt)
    indices = list(order) if order is not None else list(range(len(spec.values)))
    if sorted(indices) != list(range(len(spec.values))):
        raise ValueError("order must be a permutation of the value indices")
    results = {}
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {i: pool.submit(_evaluate, spec, times, spec.values[i]) for i in indices}
            for i, fut in futures.items():
                results[i] = fut.result()
    else:
        for i in indices:
            results[i] = _evaluate(spec, times, spec.values[i])
    return SweepResult(spec.parameter, tuple(results[i] for i in range(len(spec.values))))


# -- fitting ---------------------------------------------------------------

@dataclass(frozen=True)
class FitSpec:
    """Observed ``(t, cells)`` pairs and which of alpha, k, b to estimate.

    ``fixed`` must hold a value for every non-free parameter; ``bounds`` a
    finite ``(lo, hi)`` for every free one. ``c0`` is the observation at
    ``t == 0``.
    """

    times: tuple
    cells: tuple
    free: tuple
    fixed: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        cells = tuple(float(c) for c in self.cells)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "free", tuple(self.free))
        if len(times) != len(cells):
            raise ConfigError("times and cells differ in length")
        if not self.free:
            raise ConfigError("at least one free parameter is required")
        for name in self.free:
            if name not in FIT_PARAMS:
                raise ConfigError(f"cannot fit {name!r}; choose from {FIT_PARAMS}")
        if len(set(self.free)) != len(self.free):
            raise ConfigError("duplicate free parameter")
        if len(times) < max(3, len(self.free) + 1):
            raise ConfigError(
                f"need at least {max(3, len(self.free) + 1)} observations, got {len(times)}")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigError("observation times must be strictly increasing")
        if not all(math.isfinite(v) for v in times + cells):
            raise ConfigError("observations must be finite")
        if times[0] != 0.0:
            raise ConfigError("the first observation must be at t=0 (it fixes c0)")
        if cells[0] <= 0:
            raise ConfigError("c0 (observation at t=0) must be > 0")
        for name in FIT_PARAMS:
            if name in self.free:
                lo, hi = self.bounds.get(name, (None, None))
                if lo is None or not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                    raise ConfigError(f"free parameter {name} needs finite bounds lo < hi")
            elif name not in self.fixed:
                raise ConfigError(f"missing fixed value for {name}")

    @property
    def c0(self):
        return self.cells[0]


@dataclass(frozen=True)
class FitResult:
    estimates: dict
    free: tuple
    residual: float
    iterations: int
    history: tuple
    flat: bool = False

    def params(self, c0):
        return CultureParams(alpha=self.estimates["alpha"], k=self.estimates["k"],
                             b=self.estimates["b"], c0=c0)


def nelder_mead(f, x0, lo, hi, scale, rtol=SIMPLEX_RTOL, maxiter=SIMPLEX_MAXITER):
    """Box-constrained Nelder-Mead (trial points are clipped into the box).

    Returns ``(x_best, f_best, iterations, history)`` where ``history``
    records the best objective value after every iteration.
    """
    n = len(x0)
    clip = lambda x: np.minimum(np.maximum(x, lo), hi)
    simplex = [clip(np.asarray(x0, dtype=float))]
    for i in range(n):
        v = simplex[0].copy()
        step = scale[i]
        v[i] = v[i] + step if v[i] + step <= hi[i] else v[i] - step
        simplex.append(clip(v))
    fvals = [f(v) for v in simplex]
    history = []
    it = 0
    while it < maxiter:
        order = np.argsort(fvals, kind="stable")
        simplex = [simplex[j] for j in order]
        fvals = [fvals[j] for j in order]
        best, worst = fvals[0], fvals[-1]
        if worst - best <= rtol * abs(best) or worst - best <= 1e-300:
            break
        it += 1
        centroid = np.mean(simplex[:-1], axis=0)
        xr = clip(centroid + (centroid - simplex[-1]))
        fr = f(xr)
        if fr < fvals[0]:
            xe = clip(centroid + 2.0 * (centroid - simplex[-1]))
            fe = f(xe)
            simplex[-1], fvals[-1] = (xe, fe) if fe < fr else (xr, fr)
        elif fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
        else:
            if fr < fvals[-1]:
                xc = clip(centroid + 0.5 * (xr - centroid))
            else:
                xc = clip(centroid + 0.5 * (simplex[-1] - centroid))
            fc = f(xc)
            if fc < min(fr, fvals[-1]):
                simplex[-1], fvals[-1] = xc, fc
            else:
                for j in range(1, n + 1):
                    simplex[j] = clip(simplex[0] + 0.5 * (simplex[j] - simplex[0]))
                    fvals[j] = f(simplex[j])
        history.append(min(fvals))
    j = int(np.argmin(fvals))
    return simplex[j], fvals[j], it, tuple(history)


def fit_parameters(spec):
    """Least-squares fit of the survival cubic to the observations.

    Coarse grid search (25 points per free dimension) followed by simplex
    refinement from the best grid point. Perfectly flat data with alpha free
    emits a ``RuntimeWarning`` and lands on alpha's lower bound.
    """
    times = np.asarray(spec.times)
    observed = np.asarray(spec.cells)
    c0 = spec.c0
    free = spec.free
    lo = np.array([spec.bounds[n][0] for n in free], dtype=float)
    hi = np.array([spec.bounds[n][1] for n in free], dtype=float)

    def full(x):
        vals = dict(spec.fixed)
        vals.update(zip(free, x))
        return np.array([vals["alpha"], vals["k"], vals["b"]], dtype=float)

    axes = [np.linspace(lo[i], hi[i], GRID_POINTS) for i in range(len(free))]
    grid = np.array([full(x) for x in itertools.product(*axes)])
    sse = kernels.grid_sse(times, observed, c0, grid)
    start = grid[int(np.argmin(sse))]
    x0 = np.array([start[FIT_PARAMS.index(n)] for n in free])

    def objective(x):
        q = full(x)
        return float(kernels.cubic_sse(times, observed, c0, q[0], q[1], q[2]))

    scale = (hi - lo) / (GRID_POINTS - 1)
    x, fx, iterations, history = nelder_mead(objective, x0, lo, hi, scale)

    flat = bool(np.all(observed == observed[0]))
    if flat and "alpha" in free:
        i = free.index("alpha")
        x = x.copy()
        x[i] = lo[i]
        fx = objective(x)
        warnings.warn("observations are flat; alpha pinned to its lower bound",
                      RuntimeWarning, stacklevel=2)
    q = full(x)
    estimates = {"alpha": float(q[0]), "k": float(q[1]), "b": float(q[2])}
    return FitResult(estimates, free, float(fx), iterations, history, flat)
