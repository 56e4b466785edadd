"""Hot loops: fixed-step integration, the organism day and the fit objective.

Each kernel exists as a plain Python function (``py_*``) and as the exported
name, which is the numba-compiled version when numba is available and not
disabled via ``LANCHESTER_ROS_NO_NUMBA``. Only float64/int64 arrays and
scalars cross the boundary.
"""
import math

import numpy as np

from ._accel import jit


def py_euler_path(alpha, k, c0, b, times):
    n = times.shape[0]
    cells = np.empty(n)
    radicals = np.empty(n)
    c = c0
    r = b
    cells[0] = c
    radicals[0] = r
    for i in range(1, n):
        t = times[i - 1]
        h = times[i] - t
        dc = -alpha * r
        dr = k * t
        c = c + h * dc
        r = r + h * dr
        if not (math.isfinite(c) and math.isfinite(r)):
            return cells, radicals, i
        cells[i] = c
        radicals[i] = r
    return cells, radicals, -1


def py_rk4_path(alpha, k, c0, b, times):
    n = times.shape[0]
    cells = np.empty(n)
    radicals = np.empty(n)
    c = c0
    r = b
    cells[0] = c
    radicals[0] = r
    for i in range(1, n):
        t = times[i - 1]
        h = times[i] - t
        half = 0.5 * h
        # dc/dt = -alpha r, dr/dt = k t
        k1c = -alpha * r
        k1r = k * t
        k2c = -alpha * (r + half * k1r)
        k2r = k * (t + half)
        k3c = -alpha * (r + half * k2r)
        k3r = k2r
        k4c = -alpha * (r + h * k3r)
        k4r = k * (t + h)
        c = c + h / 6.0 * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
        r = r + h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
        if not (math.isfinite(c) and math.isfinite(r)):
            return cells, radicals, i
        cells[i] = c
        radicals[i] = r
    return cells, radicals, -1


def py_organism_day(intensity, ramp, baseline, capacity, replenish, kill_ratio,
                    radical0, antioxidant0, threshold):
    """Run 1440 minutes of the radical/antioxidant ledger.

    ``intensity[m]`` is the active intensity at minute ``m`` and ``ramp[m]``
    the 1-based minute index inside that activity (0 at rest). Returns
    per-minute arrays ``out[m] = (production, neutralized, spent,
    radical_pool, antioxidant_pool)``, ``dead[m]``, and the first elapsed
    minute count at which cumulative unneutralized radicals reached
    ``threshold`` (-1 if never).
    """
    n = intensity.shape[0]
    out = np.empty((n, 5))
    dead = np.empty(n, dtype=np.int64)
    rad = radical0
    anti = antioxidant0
    unneutralized = 0.0
    marker = -1
    for m in range(n):
        production = baseline + intensity[m] * ramp[m]
        rad += production
        neutralized = min(rad, anti)
        rad -= neutralized
        anti -= neutralized
        unneutralized += production - neutralized
        if marker < 0 and threshold > 0 and unneutralized >= threshold:
            marker = m + 1
        killed = math.floor(kill_ratio * rad)
        spent = 0.0
        if killed > 0:
            spent = rad
            rad = 0.0
        anti = min(anti + replenish, capacity)
        out[m, 0] = production
        out[m, 1] = neutralized
        out[m, 2] = spent
        out[m, 3] = rad
        out[m, 4] = anti
        dead[m] = killed
    return out, dead, marker


def py_cubic_sse(times, observed, c0, alpha, k, b):
    total = 0.0
    for i in range(times.shape[0]):
        t = times[i]
        resid = c0 - alpha * k * t * t * t / 6.0 - alpha * b * t - observed[i]
        total += resid * resid
    return total


def py_grid_sse(times, observed, c0, points):
    """Sum of squared residuals for each row ``(alpha, k, b)`` of ``points``."""
    m = points.shape[0]
    res = np.empty(m)
    for j in range(m):
        res[j] = py_cubic_sse(times, observed, c0, points[j, 0], points[j, 1], points[j, 2])
    return res


euler_path = jit(py_euler_path)
rk4_path = jit(py_rk4_path)
organism_day = jit(py_organism_day)
cubic_sse = jit(py_cubic_sse)


if cubic_sse is py_cubic_sse:
    def grid_sse(times, observed, c0, points):
        # vectorized fallback
        t = times[None, :]
        alpha, k, b = points[:, 0:1], points[:, 1:2], points[:, 2:3]
        resid = c0 - alpha * k * t * t * t / 6.0 - alpha * b * t - observed[None, :]
        return np.sum(resid * resid, axis=1)
else:
    @jit
    def grid_sse(times, observed, c0, points):
        m = points.shape[0]
        res = np.empty(m)
        for j in range(m):
            res[j] = cubic_sse(times, observed, c0, points[j, 0], points[j, 1], points[j, 2])
        return res


PYTHON_KERNELS = {
    "euler_path": py_euler_path,
    "rk4_path": py_rk4_path,
    "organism_day": py_organism_day,
    "grid_sse": py_grid_sse,
}
