from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tempograph.event_log import EventLog, UserTable
from tempograph.metrics import basic_counts, top_k_indegree
from tempograph.timeseries import (
    WindowSeries,
    aggregate_top_users,
    cdf_at,
    densification_curve,
    lcc_cdf,
    low_pass,
    top_user_trajectories,
    topk_persistence,
)
from tempograph.windows import DAY, HOUR, SlidingSchedule, WindowSpec, window_view
from oracles import random_log


# -- CDF ---------------------------------------------------------------------------


def test_cdf_example():
    assert lcc_cdf([0.5, 0.5, 1.0]) == [(0.5, pytest.approx(2 / 3)), (1.0, 1.0)]
    assert lcc_cdf([0.3] * 5) == [(0.3, 1.0)]
    assert lcc_cdf([]) == []
    with pytest.raises(ValueError):
        lcc_cdf([1.5])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=200))
def test_cdf_matches_sort_and_count(values):
    cdf = lcc_cdf(values)
    xs = [x for x, _ in cdf]
    assert xs == sorted(set(values))
    for x, f in cdf:
        assert f == sum(v <= x for v in values) / len(values)
    fs = [f for _, f in cdf]
    assert fs == sorted(fs) and fs[-1] == 1.0
    assert cdf_at(cdf, min(values) - 1e-9) == 0.0
    assert cdf_at(cdf, xs[0]) == fs[0]


# -- densification -----------------------------------------------------------------


def test_single_window_curve_has_zero_spread():
    log = EventLog.from_records([("a", "b", 10), ("b", "c", 20), ("c", "a", 30)])
    pts = densification_curve(log, [100], 1000, t_first=20, t_last=20)
    by = {p.metric: p for p in pts}
    g = window_view(log, WindowSpec(20, 100))
    assert by["n_nodes"].mean == g.n_nodes and by["n_nodes"].std == 0
    assert by["avg_degree"].mean == basic_counts(g).avg_degree


def test_curve_is_population_statistics(rng):
    log = random_log(rng, 400, t_span=5000)
    pts = densification_curve(log, [300], 250, t_first=0, t_last=5000)
    counts = np.array(
        [basic_counts(window_view(log, WindowSpec(t, 300))) for t in range(0, 5001, 250)], dtype=float
    )
    by = {p.metric: p for p in pts}
    assert by["n_edges"].mean == pytest.approx(counts[:, 1].mean())
    assert by["n_edges"].std == pytest.approx(counts[:, 1].std(ddof=0))


def poisson_log(rng, rate_per_hour, hours, n_users):
    n = rng.poisson(rate_per_hour * hours)
    ts = rng.integers(0, hours * HOUR, n)
    src = rng.integers(0, n_users, n)
    dst = (src + 1 + rng.integers(0, n_users - 1, n)) % n_users
    return EventLog(src, dst, ts, UserTable(str(i) for i in range(n_users)))


def preferential_log(rng, n_events, n_users, span):
    src, dst = [], []
    weight = np.ones(n_users)
    for _ in range(n_events):
        s = int(rng.integers(0, n_users))
        d = int(rng.choice(n_users, p=weight / weight.sum()))
        if d == s:
            d = (d + 1) % n_users
        weight[d] += 1
        src.append(s)
        dst.append(d)
    ts = np.sort(rng.integers(0, span, n_events))
    return EventLog(src, dst, ts, UserTable(str(i) for i in range(n_users)))


def test_edges_grow_with_window_on_poisson_log():
    rng = np.random.default_rng(1)
    log = poisson_log(rng, 20, 24 * 20, 300)
    taus = [HOUR, 6 * HOUR, DAY, 7 * DAY]
    pts = densification_curve(log, taus, 6 * HOUR)
    edges = [p.mean for p in pts if p.metric == "n_edges"]
    nodes = [p.mean for p in pts if p.metric == "n_nodes"]
    assert edges == sorted(edges) and len(set(edges)) == len(edges)
    assert nodes == sorted(nodes)


def test_densification_on_preferential_log():
    rng = np.random.default_rng(2)
    log = preferential_log(rng, 6000, 400, 30 * DAY)
    pts = densification_curve(log, [HOUR, DAY, 7 * DAY, 30 * DAY], DAY)
    avg = [p.mean for p in pts if p.metric == "avg_degree"]
    assert all(a < b for a, b in zip(avg, avg[1:]))


# -- low-pass ----------------------------------------------------------------------


def hourly(values):
    return WindowSeries(np.arange(len(values)) * HOUR, values)


def test_constant_unchanged():
    out = low_pass(hourly(np.full(100, 0.4)), 6 * HOUR)
    assert np.allclose(out.values, 0.4, atol=1e-12)


def test_passband_sinusoid_unchanged():
    h = np.arange(24 * 7)
    s = np.sin(2 * np.pi * h / 24)
    out = low_pass(hourly(s), 6 * HOUR)
    assert np.max(np.abs(out.values - s)) < 1e-9


def test_two_sinusoids_recovers_daily_component():
    h = np.arange(24 * 14)
    daily = 0.5 + 0.3 * np.sin(2 * np.pi * h / 24 + 0.4)
    fast = 0.1 * np.sin(2 * np.pi * h / 2)
    out = low_pass(hourly(daily + fast), 6 * HOUR)
    assert np.sqrt(np.mean((out.values - daily) ** 2)) < 1e-6
    assert out.t.tolist() == (h * HOUR).tolist()


def test_linearity_and_energy():
    rng = np.random.default_rng(3)
    a, b = rng.normal(size=200), rng.normal(size=200)
    la, lb = low_pass(hourly(a), 6 * HOUR), low_pass(hourly(b), 6 * HOUR)
    lab = low_pass(hourly(2.5 * a - 0.7 * b), 6 * HOUR)
    assert np.max(np.abs(lab.values - (2.5 * la.values - 0.7 * lb.values))) < 1e-9
    assert np.sum(la.values**2) <= np.sum(a**2)


def test_cutoff_at_nyquist_rejected():
    with pytest.raises(ValueError):
        low_pass(hourly(np.ones(10)), 2 * HOUR)


def test_series_requires_uniform_grid():
    with pytest.raises(ValueError):
        WindowSeries([0, 1, 3], [0.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        WindowSeries([2, 1], [0.0, 0.0])


# -- churn ---------------------------------------------------------------------------


def hub_log(rng, hubs_by_window, n_fans=30, tau=DAY):
    """One window per entry; all fans reply to that window's hub."""
    rows = []
    for w, hub in enumerate(hubs_by_window):
        for f in range(n_fans):
            rows.append((f"fan{f}", hub, w * tau + int(rng.integers(1, tau))))
    return EventLog.from_records(rows)


def test_dominant_hub_in_every_window(rng):
    log = hub_log(rng, ["H"] * 10)
    sched = SlidingSchedule(DAY, DAY, DAY // 2, DAY // 2 + 9 * DAY)
    rep = topk_persistence(log, sched, k=1)
    hub = log.users.id_of("H")
    assert rep.counts == Counter({hub: 10})
    assert rep.proportion(hub) == 1.0


def test_rotating_hubs_enter_once(rng):
    names = [f"H{i}" for i in range(8)]
    log = hub_log(rng, names)
    sched = SlidingSchedule(DAY, DAY, DAY // 2, DAY // 2 + 7 * DAY)
    rep = topk_persistence(log, sched, k=1)
    assert {log.users.name_of(u): c for u, c in rep.counts.items()} == dict.fromkeys(names, 1)
    assert rep.persistence_curve() == [(1 / 8, 8)]


def test_churn_matches_per_window_recount(rng):
    log = random_log(rng, 800, n_users=40, t_span=4000)
    sched = SlidingSchedule(500, 200, 0, 4000)
    k = 5
    rep = topk_persistence(log, sched, k)
    expect = Counter()
    keff = []
    for spec in sched.specs():
        g = window_view(log, spec)
        ranked = top_k_indegree(g, k) if g.n_nodes else []
        keff.append(len(ranked))
        expect.update(r.user for r in ranked)
    assert rep.counts == expect
    assert rep.k_effective == keff
    assert sum(rep.counts.values()) == sum(keff)
    curve = rep.persistence_curve()
    users = [n for _, n in curve]
    assert users == sorted(users, reverse=True)
    for p, n in curve:
        assert n == sum(1 for c in rep.counts.values() if c / rep.n_windows >= p)


def test_trajectories(rng):
    log = hub_log(rng, ["H"] * 4, n_fans=9)
    log = EventLog.from_records(list(log.records()) + [("x", "y", 10 * DAY)])
    sched = SlidingSchedule(DAY, DAY, DAY // 2, DAY // 2 + 3 * DAY)
    hub, lonely = log.users.id_of("H"), log.users.id_of("y")
    series = top_user_trajectories(log, sched, [hub, lonely])
    assert np.allclose(series[hub].values, 9 / 10)
    assert not series[lonely].values.any()
    assert aggregate_top_users(log, 1) == [hub]


def test_trajectories_match_recount(rng):
    log = random_log(rng, 600, n_users=25, t_span=3000)
    sched = SlidingSchedule(400, 100, 0, 3000)
    users = aggregate_top_users(log, 5)
    series = top_user_trajectories(log, sched, users)
    for j, spec in enumerate(sched.specs()):
        g = window_view(log, spec)
        for u in users:
            indeg = len({s for s, d in g.edges if d == u and s != u})
            want = indeg / g.n_nodes if g.n_nodes else 0.0
            assert series[u].values[j] == want
