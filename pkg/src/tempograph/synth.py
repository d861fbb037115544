"""Synthetic interaction logs with diurnal cycles, hubs, partner reuse and bursts.

Events come from an inhomogeneous Poisson process (thinning) whose rate is a
sum of daily sinusoids, one per population group. Each group keeps a pool
of currently online users that turns over with exponential session times;
sources are drawn from the firing group's pool, and targets are a hub, a
random online user ("stranger"), or one of the source's past partners.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field, fields, replace
from typing import Sequence

import numpy as np

from .event_log import EventLog, UserTable
from .windows import DAY, HOUR

DEFAULT_START = 1_470_787_200  # 2016-08-10T00:00:00Z


@dataclass(frozen=True)
class Burst:
    """Extra activity starting ``t_start`` seconds after the log start."""

    t_start: int
    duration: int
    rate_multiplier: float = 1.0
    new_user_count: int = 0


@dataclass(frozen=True)
class GeneratorConfig:
    n_users: int = 2000
    duration: int = 14 * DAY
    base_rate: float = 20.0
    diurnal_amplitude: float = 10.0
    population_mix: tuple[tuple[float, int], ...] = ((1.0, 0),)
    hub_fraction: float = 0.002
    hub_attention: float = 0.1
    stranger_prob: float = 0.5
    bursts: tuple[Burst, ...] = ()
    seed: int = 0
    start: int = DEFAULT_START
    peak_hour: float = 18.0
    pool_size: int = 100
    session_mean: float = 2 * HOUR

    def validate(self) -> None:
        for name in ("hub_fraction", "hub_attention", "stranger_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.n_users < 2:
            raise ValueError("n_users must be at least 2")
        if self.duration <= 0 or self.base_rate <= 0 or self.session_mean <= 0:
            raise ValueError("duration, base_rate and session_mean must be positive")
        if self.diurnal_amplitude < 1:
            raise ValueError("diurnal_amplitude is a peak/trough ratio and must be >= 1")
        if not self.population_mix:
            raise ValueError("population_mix must name at least one group")
        fracs = [f for f, _ in self.population_mix]
        if any(not 0.0 < f <= 1.0 for f in fracs) or abs(sum(fracs) - 1.0) > 1e-9:
            raise ValueError("population_mix fractions must be in (0, 1] and sum to 1")
        if self.pool_size < 2:
            raise ValueError("pool_size must be at least 2")
        for b in self.bursts:
            if b.duration <= 0 or b.rate_multiplier <= 0 or b.new_user_count < 0:
                raise ValueError(f"invalid burst {b}")
            if not 0 <= b.t_start < self.duration:
                raise ValueError(f"burst {b} starts outside the generated span")
        reserved = sum(b.new_user_count for b in self.bursts)
        if self.n_users - reserved < 2 * len(self.population_mix) + self.n_hubs:
            raise ValueError(
                f"bursts reserve {reserved} new users, leaving too few of "
                f"{self.n_users} for the base population"
            )

    @property
    def n_hubs(self) -> int:
        if self.hub_fraction <= 0:
            return 0
        return max(1, round(self.hub_fraction * self.n_users))

    def group_rates(self, t: np.ndarray | float) -> np.ndarray:
        """Per-group event rates (events per second) at absolute time(s) ``t``."""
        t = np.asarray(t, dtype=float)
        a = self.diurnal_amplitude
        out = []
        for frac, phase in self.population_mix:
            angle = 2 * math.pi * (t - self.peak_hour * HOUR - phase) / DAY
            profile = 1 + (a - 1) * (1 + np.cos(angle)) / 2
            out.append(frac * self.base_rate / HOUR * profile)
        return np.stack(out) * self.burst_multiplier(t)

    def burst_multiplier(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        m = np.ones_like(t)
        for b in self.bursts:
            s = self.start + b.t_start
            m = np.where((t >= s) & (t < s + b.duration), m * b.rate_multiplier, m)
        return m

    def rate_at(self, t: np.ndarray | float) -> np.ndarray:
        """Total Poisson event rate (per second), excluding injected burst arrivals."""
        return self.group_rates(t).sum(axis=0)

    def expected_events(self, resolution: int = 60) -> float:
        """Rate integral over the span plus injected arrivals."""
        grid = self.start + (np.arange(0, self.duration, resolution) + resolution / 2)
        return float(self.rate_at(grid).sum() * resolution) + sum(
            b.new_user_count for b in self.bursts
        )

    @property
    def max_rate(self) -> float:
        peak_mult = 1.0
        for b in self.bursts:
            peak_mult *= max(1.0, b.rate_multiplier)
        return self.diurnal_amplitude * self.base_rate / HOUR * peak_mult


def demo_config(seed: int = 7, **overrides) -> GeneratorConfig:
    """Two online populations six hours apart, a handful of hubs, mostly strangers."""
    cfg = GeneratorConfig(
        n_users=20_000,
        duration=21 * DAY,
        base_rate=30.0,
        diurnal_amplitude=12.0,
        population_mix=((0.6, 0), (0.4, 6 * HOUR)),
        hub_fraction=0.00025,
        hub_attention=0.08,
        stranger_prob=0.6,
        seed=seed,
        pool_size=100,
        session_mean=1.5 * HOUR,
    )
    return replace(cfg, **overrides)


class _Pool:
    """Online users of one group, refreshed lazily as sessions expire."""

    def __init__(self, members: list[int], size: int, rng: random.Random, t0: float, mean: float):
        self.members = members
        self.rng = rng
        self.mean = mean
        size = min(size, len(members))
        self.slots = rng.sample(members, size)
        self.online = set(self.slots)
        self.expiry = [(t0 + rng.expovariate(1 / mean), i) for i in range(size)]
        heapq.heapify(self.expiry)

    def refresh(self, t: float) -> None:
        heap, rng, members = self.expiry, self.rng, self.members
        while heap and heap[0][0] <= t:
            _, i = heapq.heappop(heap)
            old = self.slots[i]
            # a few redraws avoid duplicates; fall back to keeping the old user
            for _ in range(8):
                new = members[rng.randrange(len(members))]
                if new not in self.online:
                    self.online.discard(old)
                    self.online.add(new)
                    self.slots[i] = new
                    break
            heapq.heappush(heap, (t + rng.expovariate(1 / self.mean), i))


def generate(config: GeneratorConfig) -> EventLog:
    """Draw a synthetic event log; identical configs give identical logs."""
    config.validate()
    nprng = np.random.default_rng(config.seed)
    rng = random.Random(config.seed)

    n_hubs = config.n_hubs
    reserved = sum(b.new_user_count for b in config.bursts)
    n_base = config.n_users - reserved
    hubs = list(range(n_hubs))

    # group membership for the base population, hubs included
    base = list(range(n_base))
    rng.shuffle(base)
    groups: list[list[int]] = []
    cursor = 0
    for gi, (frac, _) in enumerate(config.population_mix):
        take = n_base - cursor if gi == len(config.population_mix) - 1 else round(frac * n_base)
        groups.append(sorted(base[cursor : cursor + take]))
        cursor += take

    # Poisson arrivals by thinning against the peak rate
    t0, t1 = config.start, config.start + config.duration
    lam = config.max_rate
    n_cand = nprng.poisson(lam * config.duration)
    cand = np.sort(nprng.uniform(t0, t1, size=n_cand))
    rates = config.group_rates(cand)
    total = rates.sum(axis=0)
    keep = nprng.uniform(0, lam, size=n_cand) < total
    times = np.floor(cand[keep]).astype(np.int64)
    cum = np.cumsum(rates[:, keep], axis=0) / total[keep]
    u = nprng.uniform(size=len(times))
    firing = (u[None, :] > cum).sum(axis=0)
    firing = np.minimum(firing, len(groups) - 1)

    # burst arrivals: (time, new user)
    arrivals: list[tuple[int, int]] = []
    next_id = n_base
    for b in config.bursts:
        s = t0 + b.t_start
        e = min(t1, s + b.duration)
        when = np.sort(nprng.integers(s, e, size=b.new_user_count))
        for w in when.tolist():
            arrivals.append((w, next_id))
            next_id += 1
    arrivals.sort()

    pools = [_Pool(g, config.pool_size, rng, t0, config.session_mean) for g in groups]
    partners: dict[int, list[int]] = {}
    partner_sets: dict[int, set[int]] = {}
    n_online = sum(len(p.slots) for p in pools)
    hub_p, stranger_p = config.hub_attention, config.stranger_prob
    random_ = rng.random
    randrange = rng.randrange

    def pick_target(src: int) -> int:
        if hubs and random_() < hub_p:
            h = hubs[randrange(n_hubs)]
            if h != src:
                return h
        hist = partners.get(src)
        if not hist or random_() < stranger_p:
            for _ in range(8):
                # uniform over everyone online, across all groups
                r = randrange(n_online)
                for pool in pools:
                    if r < len(pool.slots):
                        break
                    r -= len(pool.slots)
                v = pool.slots[r]
                if v != src:
                    return v
            # a pool of one user: fall back to any other base user
            v = randrange(n_base - 1)
            return v + (v >= src)
        return hist[randrange(len(hist))]

    def record(src: int, dst: int) -> None:
        s = partner_sets.get(src)
        if s is None:
            partner_sets[src] = {dst}
            partners[src] = [dst]
        elif dst not in s:
            s.add(dst)
            partners[src].append(dst)

    out_src: list[int] = []
    out_dst: list[int] = []
    out_ts: list[int] = []
    ai = 0
    n_arr = len(arrivals)
    for t, g in zip(times.tolist(), firing.tolist()):
        while ai < n_arr and arrivals[ai][0] <= t:
            ta, new = arrivals[ai]
            ai += 1
            for p in pools:
                p.refresh(ta)
            dst = pick_target(new)
            record(new, dst)
            out_src.append(new)
            out_dst.append(dst)
            out_ts.append(ta)
            # the newcomer joins a group and can come online later
            groups[rng.randrange(len(groups))].append(new)
        pool = pools[g]
        pool.refresh(t)
        for other in pools:
            if other is not pool:
                other.refresh(t)
        src = pool.slots[randrange(len(pool.slots))]
        dst = pick_target(src)
        record(src, dst)
        out_src.append(src)
        out_dst.append(dst)
        out_ts.append(t)
    while ai < n_arr:
        ta, new = arrivals[ai]
        ai += 1
        dst = pick_target(new)
        record(new, dst)
        out_src.append(new)
        out_dst.append(dst)
        out_ts.append(ta)

    users = UserTable(f"u{i}" for i in range(config.n_users))
    return EventLog(out_src, out_dst, out_ts, users)


# -- flat key=value configuration ----------------------------------------------


def _parse_mix(text: str) -> tuple[tuple[float, int], ...]:
    out = []
    for part in text.split(","):
        frac, phase = part.split(":")
        out.append((float(frac), int(float(phase))))
    return tuple(out)


def _parse_bursts(text: str) -> tuple[Burst, ...]:
    if not text.strip():
        return ()
    out = []
    for part in text.split(","):
        t, d, m, n = part.split(":")
        out.append(Burst(int(float(t)), int(float(d)), float(m), int(n)))
    return tuple(out)


def config_from_mapping(values: dict[str, str], base: GeneratorConfig | None = None) -> GeneratorConfig:
    """Build a config from string values, e.g. a parsed ``key=value`` file.

    ``population_mix`` is ``frac:phase,...`` and ``bursts`` is
    ``t_start:duration:multiplier:new_users,...`` (seconds).
    """
    cfg = base or GeneratorConfig()
    kinds = {f.name: f.type for f in fields(GeneratorConfig)}
    updates: dict = {}
    for key, raw in values.items():
        key = key.strip()
        if key not in kinds:
            raise ValueError(f"unknown generator setting {key!r}")
        raw = raw.strip()
        if key == "population_mix":
            updates[key] = _parse_mix(raw)
        elif key == "bursts":
            updates[key] = _parse_bursts(raw)
        elif kinds[key] in ("int", int):
            updates[key] = int(float(raw))
        else:
            updates[key] = float(raw)
    return replace(cfg, **updates)


def read_config_file(path: str, base: GeneratorConfig | None = None) -> GeneratorConfig:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            k, v = line.split("=", 1)
            values[k] = v
    return config_from_mapping(values, base)


def compose(configs: Sequence[GeneratorConfig], prefixes: Sequence[str] | None = None) -> EventLog:
    """Concatenate several generations with disjoint user namespaces."""
    from .event_log import merge_logs

    logs = []
    for i, cfg in enumerate(configs):
        log = generate(cfg)
        prefix = prefixes[i] if prefixes else f"g{i}_"
        users = UserTable(prefix + n for n in log.users.names)
        logs.append(EventLog(log.src, log.dst, log.ts, users, presorted=True))
    return merge_logs(logs)
