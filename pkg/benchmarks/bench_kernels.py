"""Compare the numba-compiled kernels against their pure-Python sources.

    python benchmarks/bench_kernels.py [--repeat N]

The first compiled call (JIT or on-disk cache load) is reported separately
and excluded from the per-call timings.
"""
import argparse
import statistics
import time

import numpy as np

from lanchester_ros import backend, kernels
from lanchester_ros.config import load_config
from lanchester_ros.model import time_grid


def bench(fn, args, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def cases():
    grid = time_grid(0.0, 9.0, 1e-4)
    run = load_config("default_day").block
    intensity, ramp, _ = run.schedule.profile()
    c = run.config
    day = (intensity, ramp, c.baseline_production, c.antioxidant_capacity, c.replenish_rate,
           c.kill_ratio, 0.0, c.antioxidant_capacity, c.episode_threshold)
    rng = np.random.default_rng(1)
    t = np.linspace(0.0, 9.0, 19)
    obs = 100.0 - 50.0 * rng.random(19)
    pts = rng.random((625, 3))
    return [
        ("rk4_path (90k steps)", "rk4_path", (0.8, 1.0, 100.0, 0.2, grid)),
        ("euler_path (90k steps)", "euler_path", (0.8, 1.0, 100.0, 0.2, grid)),
        ("organism_day (1440 min)", "organism_day", day),
        ("grid_sse (25x25 grid)", "grid_sse", (t, obs, 100.0, pts)),
    ]


def numpy_grid_sse(times, observed, c0, points):
    t = times[None, :]
    alpha, k, b = points[:, 0:1], points[:, 1:2], points[:, 2:3]
    resid = c0 - alpha * k * t ** 3 / 6.0 - alpha * b * t - observed[None, :]
    return np.sum(resid * resid, axis=1)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if backend() != "numba":
        print("numba unavailable or disabled (LANCHESTER_ROS_NO_NUMBA); nothing to compare")

    print(f"{'kernel':<26}{'python':>12}{'numba':>12}{'speedup':>10}{'1st call':>10}")
    for label, name, call_args in cases():
        t_py = bench(kernels.PYTHON_KERNELS[name], call_args, args.repeat)
        fast = getattr(kernels, name)
        start = time.perf_counter()
        fast(*call_args)  # first call compiles (or loads the on-disk cache)
        first = time.perf_counter() - start
        t_nb = bench(fast, call_args, args.repeat)
        print(f"{label:<26}{t_py * 1e3:>10.2f}ms{t_nb * 1e3:>10.3f}ms"
              f"{t_py / t_nb:>9.0f}x{first:>9.2f}s")
        if name == "grid_sse":
            t_np = bench(numpy_grid_sse, call_args, args.repeat)
            print(f"{'  numpy-vectorized':<26}{t_np * 1e3:>10.3f}ms")


if __name__ == "__main__":
    main()
