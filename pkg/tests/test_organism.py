import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lanchester_ros.config import load_config
from lanchester_ros.errors import ConfigError, DomainError, EndOfDayError
from lanchester_ros.organism import (Activity, OrganismConfig, OrganismState, Schedule,
                                     positive_root, simulate_day, simulate_days,
                                     step_minute, ticks_to_threshold)

REST_DAY = Schedule(())


def brute_ticks(limit):
    """ticks[S] for S = 0..limit by summing 1 + 2 + ... directly."""
    out = np.empty(limit + 1, dtype=np.int64)
    n, total = 0, 0
    for S in range(limit + 1):
        while total < S:
            n += 1
            total += n
        out[S] = n
    return out


def test_positive_root_examples():
    assert positive_root(30000) == pytest.approx(244.449, abs=1e-3)
    assert positive_root(30000) == pytest.approx((math.sqrt(240001) - 1) / 2, rel=1e-15)
    assert positive_root(0) == 0
    assert positive_root(1) == 1


@pytest.mark.parametrize("bad", [-1.0, math.nan, math.inf])
def test_positive_root_domain(bad):
    with pytest.raises(DomainError):
        positive_root(bad)
    with pytest.raises(DomainError):
        ticks_to_threshold(bad)


def test_ticks_examples():
    assert ticks_to_threshold(30000) == 245
    assert 244 * 245 // 2 < 30000 <= 245 * 246 // 2
    assert ticks_to_threshold(3) == 2
    assert ticks_to_threshold(0) == 0


def test_ticks_brute_force_to_million():
    limit = 10**6
    expected = brute_ticks(limit)
    got = np.fromiter((ticks_to_threshold(S) for S in range(limit + 1)),
                      dtype=np.int64, count=limit + 1)
    mismatch = np.nonzero(got != expected)[0]
    assert mismatch.size == 0, mismatch[:10]


@given(st.floats(0, 1e12))
def test_ticks_defining_property(S):
    n = ticks_to_threshold(S)
    assert n * (n + 1) / 2 >= S
    assert n == 0 or (n - 1) * n / 2 < S


def test_schedule_validation():
    with pytest.raises(ConfigError):
        Schedule((Activity("x", 0, 10, 1.0), Activity("y", 5, 10, 1.0)))
    with pytest.raises(ConfigError):
        Activity("x", 1430, 20, 1.0)
    with pytest.raises(ConfigError):
        Activity("x", 0, 0, 1.0)
    with pytest.raises(ConfigError):
        Activity("x", 0, 1, -1.0)
    s = Schedule((Activity("late", 100, 10, 1.0), Activity("early", 0, 10, 1.0)))
    assert [a.name for a in s.activities] == ["early", "late"]
    assert s.at(102) == (s.activities[1], 3)
    assert s.at(50) == (None, 0)


def test_step_rest_minute():
    cfg = OrganismConfig(0.0, 100.0, 10.0, 1.0)
    state, rec = step_minute(OrganismState(0, 0.0, 50.0, 0), cfg, REST_DAY)
    assert rec.dead == 0 and rec.activity == "rest"
    assert state.antioxidant_pool == 60.0
    assert state.minute == 1


def test_step_kill():
    cfg = OrganismConfig(10.0, 4.0, 0.0, 1.0)
    state, rec = step_minute(OrganismState(0, 0.0, 4.0, 0), cfg, REST_DAY)
    assert rec.neutralized == 4.0
    assert rec.dead == 6
    assert state.radical_pool == 0.0
    assert state.cumulative_dead == 6


def test_step_ramp():
    cfg = OrganismConfig(0.0, 0.0, 0.0, 0.0)
    sched = Schedule((Activity("run", 10, 5, 2.0),))
    state = OrganismState(10, 0.0, 0.0, 0)
    productions = []
    for _ in range(3):
        state, rec = step_minute(state, cfg, sched)
        productions.append(rec.production)
    assert productions == [2.0, 4.0, 6.0]
    assert sum(productions) == 2 * (3 * 4 / 2)


def test_step_carryover_without_kill():
    cfg = OrganismConfig(0.4, 0.0, 0.0, 1.0)
    state = OrganismState(0, 0.0, 0.0, 0)
    state, r1 = step_minute(state, cfg, REST_DAY)
    assert r1.dead == 0 and state.radical_pool == pytest.approx(0.4)
    state, r2 = step_minute(state, cfg, REST_DAY)
    state, r3 = step_minute(state, cfg, REST_DAY)
    assert r3.dead == 1 and state.radical_pool == 0.0


def test_step_end_of_day():
    cfg = OrganismConfig(0.0, 0.0, 0.0, 0.0)
    with pytest.raises(EndOfDayError):
        step_minute(OrganismState(1440, 0.0, 0.0, 0), cfg, REST_DAY)


def test_default_day_band():
    run = load_config("default_day").block
    report = simulate_day(run.config, run.schedule, run.initial)
    assert 30000 <= report.mean_dead_per_minute <= 40000
    assert len(report.records) == 1440
    assert report.threshold_minute == 1331


def test_rest_day_no_deaths():
    cfg = OrganismConfig(10.0, 500.0, 10.0, 100.0)
    report = simulate_day(cfg, REST_DAY, OrganismState.rested(cfg))
    assert report.total_dead == 0


def test_threshold_marker_matches_triangular():
    cfg = OrganismConfig(0.0, 0.0, 0.0, 1.0, episode_threshold=30000.0)
    sched = Schedule((Activity("ramp", 0, 1440, 1.0),))
    report = simulate_day(cfg, sched, OrganismState(0, 0.0, 0.0, 0))
    assert report.threshold_minute == ticks_to_threshold(30000) == 245


def test_kernel_matches_stepper():
    run = load_config("default_day").block
    report = simulate_day(run.config, run.schedule, run.initial)
    state = run.initial
    for rec in report.records:
        state, expected = step_minute(state, run.config, run.schedule)
        assert rec == expected
    assert state == report.final_state


def test_simulate_day_rejects_mid_day_start():
    cfg = OrganismConfig(0.0, 10.0, 0.0, 0.0)
    with pytest.raises(ConfigError):
        simulate_day(cfg, REST_DAY, OrganismState(5, 0.0, 0.0, 0))


def test_multi_day_carryover():
    run = load_config("default_day").block
    days = simulate_days(run.config, run.schedule, 2, run.initial)
    assert days[1].records[0].cumulative_dead == days[0].total_dead + days[1].records[0].dead
    assert days[1].total_dead >= days[0].total_dead  # depleted pool carries over


def test_deterministic():
    run = load_config("default_day").block
    assert simulate_day(run.config, run.schedule) == simulate_day(run.config, run.schedule)


activity_st = st.builds(
    lambda start, dur, inten: (start, dur, inten),
    st.integers(0, 1400), st.integers(1, 120), st.floats(0, 5))


@st.composite
def scenarios(draw):
    cfg = OrganismConfig(draw(st.floats(0, 50)), draw(st.floats(0, 3000)),
                         draw(st.floats(0, 50)), draw(st.floats(0, 10)))
    acts, end = [], 0
    for i, (start, dur, inten) in enumerate(draw(st.lists(activity_st, max_size=6))):
        start = max(start, end)
        if start >= 1440:
            break
        dur = min(dur, 1440 - start)
        acts.append(Activity(f"a{i}", start, dur, inten))
        end = start + dur
    anti = draw(st.floats(0, 1)) * cfg.antioxidant_capacity
    return cfg, Schedule(tuple(acts)), OrganismState(0, draw(st.floats(0, 10)), anti, 0)


@settings(max_examples=60, deadline=None)
@given(scenarios())
def test_ledger_invariants(scenario):
    cfg, sched, initial = scenario
    report = simulate_day(cfg, sched, initial)
    prev_rad = initial.radical_pool
    prev_cum = 0
    for rec in report.records:
        assert rec.radical_pool >= 0 and rec.antioxidant_pool >= 0
        assert rec.antioxidant_pool <= cfg.antioxidant_capacity
        assert rec.cumulative_dead >= prev_cum
        incoming = prev_rad + rec.production
        assert incoming == pytest.approx(rec.neutralized + rec.spent + rec.radical_pool,
                                         rel=1e-12, abs=1e-9)
        if rec.dead > 0:
            assert rec.radical_pool == 0.0
            assert rec.dead == math.floor(cfg.kill_ratio * rec.spent)
        else:
            assert rec.spent == 0.0
        prev_rad, prev_cum = rec.radical_pool, rec.cumulative_dead


@settings(max_examples=30, deadline=None)
@given(scenarios())
def test_no_kill_ratio_no_deaths(scenario):
    cfg, sched, initial = scenario
    report = simulate_day(replace(cfg, kill_ratio=0.0), sched, initial)
    assert report.total_dead == 0


@settings(max_examples=60, deadline=None)
@given(scenarios(), st.integers(0, 5), st.floats(0.01, 5))
def test_intensity_monotone(scenario, which, bump):
    cfg, sched, initial = scenario
    if not sched.activities:
        return
    i = which % len(sched.activities)
    acts = list(sched.activities)
    acts[i] = replace(acts[i], intensity=acts[i].intensity + bump)
    more = simulate_day(cfg, Schedule(tuple(acts)), initial)
    assert more.total_dead >= simulate_day(cfg, sched, initial).total_dead
