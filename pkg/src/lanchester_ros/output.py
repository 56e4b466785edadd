"""Running a :class:`RunConfig` and writing its CSV / plot outputs.

Coordinates (time, minute, swept value) are written with ``%.9g``; modelled
quantities with fixed nine decimals (``%.9f``). Cell curves are written raw
and clamped at zero (``cells_clamped``); only the display column is clamped.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ModelError, NoExtinctionError
from .model import closed_form_trajectory, extinction_time, time_grid
from .ode import IntegratorSpec, integrate
from .organism import simulate_day
from .sweep import FIT_PARAMS, fit_parameters, run_sweep

CULTURE_HEADER = ("t", "cells_raw", "radicals", "cells_clamped")
SWEEP_SUMMARY_HEADER = ("param_name", "param_value", "extinction_time")
ORGANISM_HEADER = ("minute", "activity", "production", "neutralized", "dead",
                   "radical_pool", "antioxidant_pool", "cumulative_dead")
FIT_HEADER = ("param", "estimate", "fixed_or_free")


def fmt_coord(x):
    return "%.9g" % x


def fmt_value(x):
    return "%.9f" % x


@dataclass(frozen=True)
class CultureOutcome:
    trajectory: object
    extinction_time: float | None


@dataclass(frozen=True)
class FitOutcome:
    result: object
    spec: object


def run(cfg):
    """Execute a config and return the mode's result object."""
    b = cfg.block
    if cfg.mode == "culture":
        p = b.params
        if b.method == "closed":
            traj = closed_form_trajectory(p, time_grid(0.0, b.t_end, b.dt))
        else:
            traj = integrate(p, IntegratorSpec(b.method, b.dt, 0.0, b.t_end))
        try:
            t_star = extinction_time(p)
        except NoExtinctionError:
            t_star = None
        return CultureOutcome(traj, t_star)
    if cfg.mode == "sweep":
        return run_sweep(b.spec, workers=b.workers)
    if cfg.mode == "organism":
        return simulate_day(b.config, b.schedule, b.initial)
    if cfg.mode == "fit":
        return FitOutcome(fit_parameters(b), b)
    raise ModelError(f"unknown mode {cfg.mode!r}")


def _write(path, rows, header, trailer=()):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    for line in trailer:
        buf.write(line + "\n")
    path.write_text(buf.getvalue())
    return path


def _trajectory_rows(traj):
    return [(fmt_coord(t), fmt_value(c), fmt_value(r), fmt_value(cc))
            for t, c, r, cc in zip(traj.times, traj.cells, traj.radicals, traj.cells_clamped)]


def _plot_image(path, x, series, xlabel, title):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4), dpi=100)
    for label, y in series.items():
        ax.plot(x, y, label=label)
    ax.set_xlabel(xlabel)
    ax.set_title(title)
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="png", metadata={"Software": None})
    plt.close(fig)
    return path


def _plot(out, x, series, xlabel, title):
    cols = list(series)
    rows = [[fmt_coord(xi)] + [fmt_value(series[c][i]) for c in cols] for i, xi in enumerate(x)]
    data = _write(out / "plot_data.csv", rows, [xlabel] + cols)
    return [data, _plot_image(out / "plot.png", x, series, xlabel, title)]


def emit_outputs(result, cfg, out_dir=None):
    """Write the CSV files (and plot files when ``cfg.emit_plot``) for ``result``.

    Returns the list of written paths.
    """
    out = Path(out_dir if out_dir is not None else (cfg.output_dir or "."))
    out.mkdir(parents=True, exist_ok=True)
    written = []
    mode = cfg.mode
    if mode == "culture":
        if not isinstance(result, CultureOutcome):
            raise TypeError("culture mode expects a CultureOutcome")
        traj = result.trajectory
        written.append(_write(out / "culture.csv", _trajectory_rows(traj), CULTURE_HEADER))
        if cfg.emit_plot:
            written += _plot(out, traj.times, {"cells": traj.cells_clamped,
                                                "radicals": traj.radicals},
                             "t", "Cell survival and radical accumulation")
    elif mode == "sweep":
        entries = getattr(result, "entries", None)
        if entries is None:
            raise TypeError("sweep mode expects a SweepResult")
        name = result.parameter
        summary = []
        for i, e in enumerate(entries):
            written.append(_write(out / f"sweep_{name}_{i:02d}.csv",
                                  _trajectory_rows(e.trajectory), CULTURE_HEADER))
            t_star = "" if e.extinction_time is None else fmt_value(e.extinction_time)
            summary.append((name, fmt_coord(e.value), t_star))
        written.append(_write(out / "sweep_summary.csv", summary, SWEEP_SUMMARY_HEADER))
        if cfg.emit_plot:
            series = {f"{name}={fmt_coord(e.value)}": e.trajectory.cells_clamped for e in entries}
            written += _plot(out, entries[0].trajectory.times, series, "t",
                             f"Sensitivity to {name}")
    elif mode == "organism":
        records = getattr(result, "records", None)
        if records is None:
            raise TypeError("organism mode expects a SimReport")
        rows = [(r.minute, r.activity, fmt_value(r.production), fmt_value(r.neutralized),
                 r.dead, fmt_value(r.radical_pool), fmt_value(r.antioxidant_pool),
                 r.cumulative_dead) for r in records]
        written.append(_write(out / "organism.csv", rows, ORGANISM_HEADER))
        if cfg.emit_plot:
            minutes = np.array([r.minute for r in records])
            series = {
                "dead": np.array([r.dead for r in records], dtype=float),
                "radical_pool": np.array([r.radical_pool for r in records]),
                "antioxidant_pool": np.array([r.antioxidant_pool for r in records]),
            }
            written += _plot(out, minutes, series, "minute", "Daily apoptosis")
    elif mode == "fit":
        if not isinstance(result, FitOutcome):
            raise TypeError("fit mode expects a FitOutcome")
        fit, spec = result.result, result.spec
        rows = [(n, fmt_value(fit.estimates[n]), "free" if n in fit.free else "fixed")
                for n in FIT_PARAMS]
        rows.append(("c0", fmt_value(spec.c0), "fixed"))
        trailer = [f"# residual={fit.residual:.9g} iterations={fit.iterations}"]
        written.append(_write(out / "fit_result.csv", rows, FIT_HEADER, trailer))
        if cfg.emit_plot:
            from .model import cell_survival
            times = np.asarray(spec.times)
            fitted = cell_survival(times, fit.params(spec.c0))
            written += _plot(out, times, {"observed": np.asarray(spec.cells),
                                          "fitted": fitted}, "t", "Model fit")
    else:
        raise ModelError(f"unknown mode {mode!r}")
    return written


# -- readers ------------------------------------------------------------------

def read_csv(path, header):
    """Read one of the emitted CSVs, checking the header; returns dict rows.

    Lines starting with ``#`` are returned separately as comments.
    """
    lines = Path(path).read_text().splitlines()
    comments = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    reader = csv.reader(body)
    got = tuple(next(reader))
    if got != tuple(header):
        raise ValueError(f"{path}: header {got} != {tuple(header)}")
    rows = []
    for row in reader:
        if len(row) != len(header):
            raise ValueError(f"{path}: row {row} has {len(row)} fields")
        rows.append(dict(zip(header, row)))
    return rows, comments
