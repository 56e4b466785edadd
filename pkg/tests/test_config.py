import pytest
from hypothesis import given, settings, strategies as st

from lanchester_ros.config import (CultureRun, RunConfig, SweepRun, load_config,
                                   parse_config, render_config, shipped_config_text,
                                   shipped_configs)
from lanchester_ros.errors import ConfigError
from lanchester_ros.model import CultureParams
from lanchester_ros.organism import (Activity, OrganismConfig, OrganismState, Schedule)
from lanchester_ros.config import OrganismRun
from lanchester_ros.sweep import FitSpec, SweepSpec

CULTURE = """\
[run]
mode = culture

[culture]
alpha = 0.8
k = 1
b = 0.2
c0 = 100
"""


def test_paper_culture_block():
    cfg = parse_config(CULTURE)
    assert cfg.mode == "culture"
    assert cfg.block.params == CultureParams(alpha=0.8, k=1.0, b=0.2, c0=100.0)


def test_missing_b():
    text = CULTURE.replace("b = 0.2\n", "")
    with pytest.raises(ConfigError, match="missing key: b") as info:
        parse_config(text)
    assert info.value.key == "b"
    assert info.value.line == 4


def test_alpha_out_of_range():
    with pytest.raises(ConfigError, match=r"alpha out of \(0,1\]") as info:
        parse_config(CULTURE.replace("alpha = 0.8", "alpha = 1.5"))
    assert info.value.line == 5 and info.value.key == "alpha"


@pytest.mark.parametrize("old, new, match", [
    ("k = 1", "k = one", "k: expected a number"),
    ("k = 1", "kk = 1", "unknown key: kk"),
    ("k = 1", "k = 1\nk = 2", "duplicate key"),
    ("[culture]", "[cultures]", "unknown section"),
    ("c0 = 100", "c0 = -1", "c0 must be > 0"),
    ("alpha = 0.8", "a = -0.1", "a must be >= 0"),
    ("alpha = 0.8", "alpha = 0.8\na = 1.0", "disagrees"),
    ("mode = culture", "mode = party", "mode must be one of"),
    ("c0 = 100", "c0 = 100\nmethod = rk5", "method must be one of"),
    ("c0 = 100", "c0 = 100\n[base]\nb = 1", "does not belong"),
    ("c0 = 100", "c0 = nan", "must be finite"),
    ("c0 = 100", "c0 100", "expected key = value"),
])
def test_parse_errors(old, new, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(CULTURE.replace(old, new))


def test_mode_from_caller():
    text = CULTURE.replace("[run]\nmode = culture\n", "")
    assert parse_config(text, mode="culture").mode == "culture"
    with pytest.raises(ConfigError, match="not 'sweep'"):
        parse_config(CULTURE, mode="sweep")


def test_composition_params():
    cfg = parse_config(CULTURE.replace("alpha = 0.8", "a = 0.05"))
    assert cfg.block.params.alpha == pytest.approx(0.8, abs=1e-15)


def test_comments_ignored():
    cfg = parse_config("# header\n" + CULTURE.replace("k = 1", "k = 1   # slope"))
    assert cfg.block.params.k == 1.0


def test_schedule_overlap_error():
    text = shipped_config_text("default_day").replace("lunch_walk = 780", "lunch_walk = 770")
    with pytest.raises(ConfigError, match="overlap"):
        parse_config(text)


def test_fit_from_csv(tmp_path):
    (tmp_path / "obs.csv").write_text("t,cells\n0,100\n1,99.5\n2,98\n3,95\n")
    (tmp_path / "fit.cfg").write_text(
        "[run]\nmode = fit\n[fit]\nfree = alpha\nobserved_csv = obs.csv\n"
        "[fixed]\nk = 1\nb = 0.2\n[bounds]\nalpha = 0.01, 1\n")
    cfg = load_config(tmp_path / "fit.cfg")
    assert cfg.block.times == (0.0, 1.0, 2.0, 3.0)
    assert cfg.block.cells[-1] == 95.0


def test_fit_too_few_points():
    text = ("[run]\nmode = fit\n[fit]\nfree = alpha, k\ntimes = 0, 1\ncells = 100, 99\n"
            "[fixed]\nb = 0.2\n[bounds]\nalpha = 0.01, 1\nk = 0, 3\n")
    with pytest.raises(ConfigError, match="at least"):
        parse_config(text)


def test_shipped_configs_present():
    assert {"paper_culture", "fig5_sweep", "fig6_sweep", "default_day"} <= set(shipped_configs())


@pytest.mark.parametrize("name", shipped_configs())
def test_shipped_round_trip(name):
    cfg = load_config(name)
    assert parse_config(render_config(cfg)) == cfg


def test_load_missing():
    with pytest.raises(ConfigError, match="not found"):
        load_config("no_such_config")


finite = st.floats(0.01, 10, allow_nan=False)


@st.composite
def run_configs(draw):
    mode = draw(st.sampled_from(["culture", "sweep", "organism", "fit"]))
    if draw(st.booleans()):
        params = CultureParams(alpha=draw(st.floats(0.01, 1)), b=draw(finite),
                               k=draw(st.floats(0, 10)), c0=draw(st.floats(1, 1e6)))
    else:
        params = CultureParams(a=draw(st.floats(0, 10)), b=draw(finite),
                               k=draw(st.floats(0, 10)), c0=draw(st.floats(1, 1e6)))
    if mode == "culture":
        block = CultureRun(params, draw(finite), draw(st.floats(0.001, 1)),
                           draw(st.sampled_from(["closed", "euler", "rk4"])))
    elif mode == "sweep":
        vals = sorted(set(draw(st.lists(st.floats(0, 10), min_size=1, max_size=5))))
        block = SweepRun(SweepSpec("k", tuple(vals), params, draw(finite), 0.1),
                         draw(st.integers(1, 8)))
    elif mode == "organism":
        cfg = OrganismConfig(draw(finite), draw(st.floats(0, 1e4)), draw(finite), draw(finite),
                             draw(st.floats(0, 1e5)))
        start = draw(st.integers(0, 1000))
        acts = (Activity("walk", start, draw(st.integers(1, 400)), draw(finite)),)
        block = OrganismRun(cfg, Schedule(acts),
                            OrganismState(0, draw(finite), cfg.antioxidant_capacity / 2, 0))
    else:
        n = draw(st.integers(3, 8))
        cells = [100.0 - i * draw(st.floats(0, 5)) for i in range(n)]
        block = FitSpec(tuple(float(i) for i in range(n)), tuple(cells), ("alpha",),
                        {"k": draw(finite), "b": draw(finite)}, {"alpha": (0.01, 1.0)})
    out = draw(st.one_of(st.none(), st.just("results/run1")))
    return RunConfig(mode, block, out, draw(st.booleans()))


@settings(max_examples=100)
@given(run_configs())
def test_render_round_trip(cfg):
    assert parse_config(render_config(cfg)) == cfg
