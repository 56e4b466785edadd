"""Sectioned ``key = value`` run configuration.

Layout::

    # comment
    [run]
    mode = culture          # culture | sweep | organism | fit
    emit_plot = false
    output_dir = out        # optional, --out overrides

    [culture]
    alpha = 0.8             # or a = <antioxidant fraction>
    b = 0.2
    k = 1
    c0 = 100

Each mode has its own sections; see :data:`SCHEMA`. Errors carry the line
number of the offending key.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigError, ModelError
from .model import CultureParams
from .organism import Activity, OrganismConfig, OrganismState, Schedule
from .sweep import FIT_PARAMS, FitSpec, SweepSpec

MODES = ("culture", "sweep", "organism", "fit")
CULTURE_METHODS = ("closed", "euler", "rk4")

_PARAM_KEYS = {"alpha": float, "a": float, "b": float, "k": float, "c0": float}

# section -> {key: (type, required)}; "*" means free-form keys.
SCHEMA = {
    "run": {"mode": (str, False), "emit_plot": (bool, False), "output_dir": (str, False)},
    "culture": {**{k: (float, k in ("b", "k", "c0")) for k in _PARAM_KEYS},
                "t_end": (float, False), "dt": (float, False), "method": (str, False)},
    "sweep": {"parameter": (str, True), "values": (list, True), "t_end": (float, False),
              "dt": (float, False), "workers": (int, False)},
    "base": {k: (float, k in ("b", "k", "c0")) for k in _PARAM_KEYS},
    "organism": {"baseline_production": (float, True), "antioxidant_capacity": (float, True),
                 "replenish_rate": (float, True), "kill_ratio": (float, True),
                 "episode_threshold": (float, False), "initial_radical": (float, False),
                 "initial_antioxidant": (float, False)},
    "schedule": "*",
    "fit": {"free": (list, True), "times": (list, False), "cells": (list, False),
            "observed_csv": (str, False)},
    "fixed": {k: (float, False) for k in FIT_PARAMS},
    "bounds": {k: (list, False) for k in FIT_PARAMS},
}

MODE_SECTIONS = {
    "culture": ("culture",),
    "sweep": ("sweep", "base"),
    "organism": ("organism", "schedule"),
    "fit": ("fit", "fixed", "bounds"),
}


@dataclass(frozen=True)
class CultureRun:
    params: CultureParams
    t_end: float = 12.0
    dt: float = 0.1
    method: str = "closed"


@dataclass(frozen=True)
class SweepRun:
    spec: SweepSpec
    workers: int = 1


@dataclass(frozen=True)
class OrganismRun:
    config: OrganismConfig
    schedule: Schedule
    initial: OrganismState


@dataclass(frozen=True)
class RunConfig:
    mode: str
    block: object
    output_dir: str | None = None
    emit_plot: bool = False
    source: str | None = field(default=None, compare=False)


# -- low-level document parsing -----------------------------------------------

@dataclass
class _Entry:
    value: str
    line: int


@dataclass
class _Section:
    name: str
    line: int
    entries: dict = field(default_factory=dict)


def _tokenize(text):
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {raw.strip()!r}", line=lineno)
            name = line[1:-1].strip()
            if name not in SCHEMA:
                raise ConfigError(f"unknown section: {name}", key=name, line=lineno)
            if name in sections:
                raise ConfigError(f"duplicate section: {name}", key=name, line=lineno)
            current = sections[name] = _Section(name, lineno)
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {raw.strip()!r}", line=lineno)
        if current is None:
            raise ConfigError("key outside of any section", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        allowed = SCHEMA[current.name]
        if allowed != "*" and key not in allowed:
            raise ConfigError(f"unknown key: {key}", key=key, line=lineno)
        if key in current.entries:
            raise ConfigError(f"duplicate key: {key}", key=key, line=lineno)
        current.entries[key] = _Entry(value, lineno)
    return sections


def _number(key, entry):
    try:
        value = float(entry.value)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {entry.value!r}",
                          key=key, line=entry.line) from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite", key=key, line=entry.line)
    return value


def _numbers(key, entry):
    parts = [p.strip() for p in entry.value.split(",") if p.strip()]
    return [_number(key, _Entry(p, entry.line)) for p in parts]


def _convert(section, key, entry):
    kind = SCHEMA[section][key][0]
    if kind is float:
        return _number(key, entry)
    if kind is int:
        try:
            return int(entry.value)
        except ValueError:
            raise ConfigError(f"{key}: expected an integer, got {entry.value!r}",
                              key=key, line=entry.line) from None
    if kind is bool:
        v = entry.value.lower()
        if v not in ("true", "false"):
            raise ConfigError(f"{key}: expected true or false", key=key, line=entry.line)
        return v == "true"
    return entry.value


class _Reader:
    def __init__(self, section):
        self.section = section

    def has(self, key):
        return key in self.section.entries

    def line(self, key=None):
        if key is not None and key in self.section.entries:
            return self.section.entries[key].line
        return self.section.line or None

    def get(self, key, default=None):
        spec = SCHEMA[self.section.name][key]
        if key not in self.section.entries:
            if spec[1]:
                raise ConfigError(f"missing key: {key}", key=key, line=self.line())
            return default
        return _convert(self.section.name, key, self.section.entries[key])

    def numbers(self, key):
        return _numbers(key, self.section.entries[key])

    def fail(self, key, message):
        raise ConfigError(message, key=key, line=self.line(key))


# -- block builders -----------------------------------------------------------

def _culture_params(r):
    vals = {key: r.get(key) for key in _PARAM_KEYS}
    if vals["alpha"] is None and vals["a"] is None:
        r.fail(None, "missing key: alpha (or a)")
    if vals["alpha"] is not None and not 0 < vals["alpha"] <= 1:
        r.fail("alpha", "alpha out of (0,1]")
    if vals["a"] is not None and vals["a"] < 0:
        r.fail("a", "a must be >= 0")
    if vals["b"] <= 0:
        r.fail("b", "b must be > 0")
    if vals["k"] < 0:
        r.fail("k", "k must be >= 0")
    if vals["c0"] <= 0:
        r.fail("c0", "c0 must be > 0")
    try:
        return CultureParams(**vals).check_strict()
    except ModelError as exc:
        r.fail("alpha", str(exc))


def _build_culture(sections):
    r = _Reader(sections["culture"])
    params = _culture_params(r)
    method = r.get("method", "closed")
    if method not in CULTURE_METHODS:
        r.fail("method", f"method must be one of {CULTURE_METHODS}")
    t_end = r.get("t_end", 12.0)
    dt = r.get("dt", 0.1)
    if not t_end > 0:
        r.fail("t_end", "t_end must be > 0")
    if not dt > 0:
        r.fail("dt", "dt must be > 0")
    return CultureRun(params, t_end, dt, method)


def _build_sweep(sections):
    r = _Reader(sections["sweep"])
    base = _culture_params(_Reader(sections["base"]))
    workers = r.get("workers", 1)
    if workers < 1:
        r.fail("workers", "workers must be >= 1")
    r.get("values")
    try:
        spec = SweepSpec(r.get("parameter"), tuple(r.numbers("values")), base,
                         t_end=r.get("t_end", 12.0), dt=r.get("dt", 0.1))
    except ModelError as exc:
        r.fail("values", str(exc))
    return SweepRun(spec, workers)


def _build_organism(sections):
    r = _Reader(sections["organism"])
    kw = {key: r.get(key) for key in ("baseline_production", "antioxidant_capacity",
                                       "replenish_rate", "kill_ratio")}
    kw["episode_threshold"] = r.get("episode_threshold", 30000.0)
    for key, value in kw.items():
        if value < 0:
            r.fail(key, f"{key} must be >= 0")
    cfg = OrganismConfig(**kw)

    activities = []
    sched = sections["schedule"]
    for name, entry in sched.entries.items():
        parts = [p.strip() for p in entry.value.split(",")]
        if len(parts) != 3:
            raise ConfigError(f"{name}: expected start_minute, duration, intensity",
                              key=name, line=entry.line)
        try:
            start, duration = int(parts[0]), int(parts[1])
        except ValueError:
            raise ConfigError(f"{name}: start and duration must be integers",
                              key=name, line=entry.line) from None
        intensity = _number(name, _Entry(parts[2], entry.line))
        try:
            activities.append(Activity(name, start, duration, intensity))
        except ModelError as exc:
            raise ConfigError(str(exc), key=name, line=entry.line) from None
    try:
        schedule = Schedule(tuple(activities))
    except ModelError as exc:
        raise ConfigError(str(exc), key="schedule", line=sched.line) from None

    anti = r.get("initial_antioxidant", cfg.antioxidant_capacity)
    rad = r.get("initial_radical", 0.0)
    if not 0 <= anti <= cfg.antioxidant_capacity:
        r.fail("initial_antioxidant", "initial_antioxidant must be in [0, antioxidant_capacity]")
    if rad < 0:
        r.fail("initial_radical", "initial_radical must be >= 0")
    return OrganismRun(cfg, schedule, OrganismState(0, rad, anti, 0))


def _read_observations(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(row for row in fh if not row.startswith("#")))
    if not rows:
        return [], []
    cell_col = "cells" if "cells" in rows[0] else "cells_raw"
    return [float(row["t"]) for row in rows], [float(row[cell_col]) for row in rows]


def _build_fit(sections, base_dir):
    r = _Reader(sections["fit"])
    free = tuple(s.strip() for s in r.get("free").split(",") if s.strip())
    for name in free:
        if name not in FIT_PARAMS:
            r.fail("free", f"cannot fit {name!r}; choose from {FIT_PARAMS}")
    if r.has("observed_csv"):
        if r.has("times") or r.has("cells"):
            r.fail("observed_csv", "give either observed_csv or times/cells, not both")
        path = Path(r.get("observed_csv"))
        if not path.is_absolute() and base_dir is not None:
            path = Path(base_dir) / path
        try:
            times, cells = _read_observations(path)
        except (OSError, KeyError, ValueError) as exc:
            r.fail("observed_csv", f"cannot read observations: {exc}")
    else:
        if not (r.has("times") and r.has("cells")):
            r.fail(None, "missing key: times/cells (or observed_csv)")
        times, cells = r.numbers("times"), r.numbers("cells")

    fixed = {}
    fr = _Reader(sections["fixed"]) if "fixed" in sections else None
    if fr is not None:
        for key in FIT_PARAMS:
            if fr.has(key):
                if key in free:
                    fr.fail(key, f"{key} is free and cannot also be fixed")
                fixed[key] = fr.get(key)
    bounds = {}
    br = _Reader(sections["bounds"]) if "bounds" in sections else None
    if br is not None:
        for key in FIT_PARAMS:
            if br.has(key):
                pair = br.numbers(key)
                if len(pair) != 2:
                    br.fail(key, f"{key}: bounds need two numbers lo, hi")
                bounds[key] = tuple(pair)
    try:
        return FitSpec(tuple(times), tuple(cells), free, fixed, bounds)
    except ModelError as exc:
        r.fail(None, str(exc))


def parse_config(text, mode=None, base_dir=None):
    """Parse and validate a config document into a :class:`RunConfig`.

    ``mode`` supplies the run mode when the document has no ``[run] mode``;
    if both are present they must agree. ``base_dir`` resolves relative
    ``observed_csv`` paths.
    """
    sections = _tokenize(text)
    run = _Reader(sections.get("run", _Section("run", 0)))
    doc_mode = run.get("mode")
    if doc_mode is not None and mode is not None and doc_mode != mode:
        run.fail("mode", f"config is for mode {doc_mode!r}, not {mode!r}")
    mode = doc_mode or mode
    if mode not in MODES:
        run.fail("mode", f"mode must be one of {MODES}, got {mode!r}")
    required = MODE_SECTIONS[mode]
    for name, sec in sections.items():
        if name != "run" and name not in required:
            raise ConfigError(f"section [{name}] does not belong to mode {mode}",
                              key=name, line=sec.line)
    for name in required:
        if name not in sections and name not in ("fixed", "bounds", "schedule"):
            raise ConfigError(f"missing section: [{name}]", key=name)
    if mode == "organism":
        sections.setdefault("schedule", _Section("schedule", 0))
    if mode == "culture":
        block = _build_culture(sections)
    elif mode == "sweep":
        block = _build_sweep(sections)
    elif mode == "organism":
        block = _build_organism(sections)
    else:
        block = _build_fit(sections, base_dir)
    return RunConfig(mode, block, run.get("output_dir"), run.get("emit_plot", False), text)


# -- rendering ----------------------------------------------------------------

def _num(x):
    return repr(float(x))


def _params_lines(p):
    lines = [f"a = {_num(p.a)}"] if p.a is not None else [f"alpha = {_num(p.alpha)}"]
    lines += [f"b = {_num(p.b)}", f"k = {_num(p.k)}", f"c0 = {_num(p.c0)}"]
    return lines


def render_config(cfg):
    """Serialize a :class:`RunConfig` back to a parseable document."""
    out = ["[run]", f"mode = {cfg.mode}", f"emit_plot = {str(cfg.emit_plot).lower()}"]
    if cfg.output_dir is not None:
        out.append(f"output_dir = {cfg.output_dir}")
    b = cfg.block
    if cfg.mode == "culture":
        out += ["", "[culture]", *_params_lines(b.params), f"t_end = {_num(b.t_end)}",
                f"dt = {_num(b.dt)}", f"method = {b.method}"]
    elif cfg.mode == "sweep":
        s = b.spec
        out += ["", "[sweep]", f"parameter = {s.parameter}",
                "values = " + ", ".join(_num(v) for v in s.values),
                f"t_end = {_num(s.t_end)}", f"dt = {_num(s.dt)}", f"workers = {b.workers}",
                "", "[base]", *_params_lines(s.base)]
    elif cfg.mode == "organism":
        c = b.config
        out += ["", "[organism]",
                f"baseline_production = {_num(c.baseline_production)}",
                f"antioxidant_capacity = {_num(c.antioxidant_capacity)}",
                f"replenish_rate = {_num(c.replenish_rate)}",
                f"kill_ratio = {_num(c.kill_ratio)}",
                f"episode_threshold = {_num(c.episode_threshold)}",
                f"initial_radical = {_num(b.initial.radical_pool)}",
                f"initial_antioxidant = {_num(b.initial.antioxidant_pool)}",
                "", "[schedule]"]
        out += [f"{a.name} = {a.start_minute}, {a.duration}, {_num(a.intensity)}"
                for a in b.schedule.activities]
    else:
        out += ["", "[fit]", "free = " + ", ".join(b.free),
                "times = " + ", ".join(_num(t) for t in b.times),
                "cells = " + ", ".join(_num(c) for c in b.cells)]
        if b.fixed:
            out += ["", "[fixed]"] + [f"{k} = {_num(v)}" for k, v in b.fixed.items()]
        if b.bounds:
            out += ["", "[bounds]"] + [f"{k} = {_num(lo)}, {_num(hi)}"
                                       for k, (lo, hi) in b.bounds.items()]
    return "\n".join(out) + "\n"


# -- shipped fixtures ---------------------------------------------------------

def shipped_configs():
    """Names of the example configs bundled with the package."""
    files = resources.files("lanchester_ros").joinpath("configs")
    return sorted(p.name[:-4] for p in files.iterdir() if p.name.endswith(".cfg"))


def shipped_config_text(name):
    return resources.files("lanchester_ros").joinpath("configs", f"{name}.cfg").read_text()


def load_config(path_or_name, mode=None):
    """Read a config file, falling back to a shipped config of that name."""
    path = Path(path_or_name)
    if path.is_file():
        return parse_config(path.read_text(), mode=mode, base_dir=path.parent)
    if path_or_name in shipped_configs():
        return parse_config(shipped_config_text(path_or_name), mode=mode)
    raise ConfigError(f"config not found: {path_or_name}")
