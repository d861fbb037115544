"""Cross-window analyses: empirical CDFs, densification, spectral smoothing,
and top-k churn."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .event_log import EventLog
from .metrics import basic_counts, top_k_indegree
from .windows import SlidingSchedule, sliding_windows


@dataclass(frozen=True)
class WindowSeries:
    """Values on a uniform time grid."""

    t: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.int64)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1:
            raise ValueError("t and values must be 1-d and equal length")
        if len(t) > 1:
            steps = np.diff(t)
            if steps[0] <= 0 or np.any(steps != steps[0]):
                raise ValueError("timestamps must be strictly increasing with uniform spacing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)

    @property
    def spacing(self) -> int:
        return int(self.t[1] - self.t[0]) if len(self.t) > 1 else 0

    def __len__(self) -> int:
        return len(self.t)


def lcc_cdf(values: Iterable[float]) -> list[tuple[float, float]]:
    """Empirical CDF ``F(x) = P(value <= x)`` at each distinct sample value."""
    v = np.sort(np.asarray(list(values), dtype=float))
    if len(v) == 0:
        return []
    if v[0] < 0 or v[-1] > 1:
        raise ValueError("LCC proportions must lie in [0, 1]")
    xs, counts = np.unique(v, return_counts=True)
    cum = np.cumsum(counts)
    return [(float(x), float(c / len(v))) for x, c in zip(xs, cum)]


def cdf_at(cdf: Sequence[tuple[float, float]], x: float) -> float:
    """Evaluate a step CDF (as returned by :func:`lcc_cdf`) at ``x``."""
    xs = [p[0] for p in cdf]
    i = int(np.searchsorted(xs, x, side="right"))
    return cdf[i - 1][1] if i else 0.0


@dataclass(frozen=True)
class DensificationPoint:
    tau: int
    metric: str
    mean: float
    std: float


def densification_curve(
    log: EventLog,
    taus: Sequence[int],
    delta: int,
    *,
    t_first: int | None = None,
    t_last: int | None = None,
) -> list[DensificationPoint]:
    """Mean and population std of node count, edge count and average degree per tau.

    All window sizes share the same centres, so the node and edge means are
    nondecreasing in tau.
    """
    if not taus:
        raise ValueError("at least one window size is required")
    base = SlidingSchedule.covering(log, taus[0], delta, t_from=t_first, t_to=t_last)
    out = []
    for tau in taus:
        sched = SlidingSchedule(tau, delta, base.t_first, base.t_last)
        rows = np.array([basic_counts(g) for _, g in sliding_windows(log, sched)], dtype=float)
        for col, name in enumerate(("n_nodes", "n_edges", "avg_degree")):
            out.append(DensificationPoint(tau, name, float(rows[:, col].mean()), float(rows[:, col].std())))
    return out


def low_pass(series: WindowSeries, cutoff_period: float) -> WindowSeries:
    """Drop every Fourier component whose period is shorter than ``cutoff_period``.

    A sharp spectral truncation: forward real DFT, zero all bins with
    frequency above ``1 / cutoff_period``, inverse DFT.
    """
    n = len(series)
    if n < 2:
        return WindowSeries(series.t, series.values.copy())
    dt = series.spacing
    if cutoff_period <= 2 * dt:
        raise ValueError(
            f"cutoff period {cutoff_period} must exceed twice the spacing ({2 * dt})"
        )
    coeffs = np.fft.rfft(series.values)
    freqs = np.fft.rfftfreq(n, d=dt)
    coeffs[freqs > 1.0 / cutoff_period] = 0
    return WindowSeries(series.t, np.fft.irfft(coeffs, n=n))


@dataclass
class ChurnReport:
    k: int
    n_windows: int
    counts: Counter = field(default_factory=Counter)
    first_window: dict[int, int] = field(default_factory=dict)
    last_window: dict[int, int] = field(default_factory=dict)
    k_effective: list[int] = field(default_factory=list)

    @property
    def distinct_users(self) -> int:
        return len(self.counts)

    def proportion(self, user: int) -> float:
        return self.counts.get(user, 0) / self.n_windows if self.n_windows else 0.0

    def persistence_curve(self) -> list[tuple[float, int]]:
        """For each realised proportion ``p``, users in the top k for at least ``p`` of windows."""
        if not self.n_windows:
            return []
        by_count = Counter(self.counts.values())
        out = []
        at_least = 0
        for c in sorted(by_count, reverse=True):
            at_least += by_count[c]
            out.append((c / self.n_windows, at_least))
        out.reverse()
        return out


def topk_persistence(log: EventLog, sched: SlidingSchedule, k: int = 20) -> ChurnReport:
    """Tally how often each user makes the per-window top ``k`` by in-degree."""
    if k < 1:
        raise ValueError("k must be >= 1")
    report = ChurnReport(k=k, n_windows=len(sched))
    for t, g in sliding_windows(log, sched):
        ranked = top_k_indegree(g, k) if g.n_nodes else []
        report.k_effective.append(len(ranked))
        for r in ranked:
            report.counts[r.user] += 1
            report.first_window.setdefault(r.user, t)
            report.last_window[r.user] = t
    return report


def aggregate_top_users(log: EventLog, k: int = 20) -> list[int]:
    """Users with the highest distinct in-degree in the all-time aggregate graph."""
    pairs = {(s, d) for s, d in zip(log.src_list, log.dst_list) if s != d}
    deg = Counter(d for _, d in pairs)
    return [u for u, _ in sorted(deg.items(), key=lambda x: (-x[1], x[0]))[:k]]


def top_user_trajectories(
    log: EventLog, sched: SlidingSchedule, users: Sequence[int]
) -> Mapping[int, WindowSeries]:
    """Per-user in-degree normalised by window node count; 0 when absent."""
    centers = sched.centers
    idx = {u: i for i, u in enumerate(users)}
    vals = np.zeros((len(users), len(centers)))
    for j, (_, g) in enumerate(sliding_windows(log, sched)):
        if not g.n_nodes:
            continue
        seen: dict[int, int] = {}
        for s, d in g.edges:
            if d in idx and s != d:
                seen[d] = seen.get(d, 0) + 1
        for u, c in seen.items():
            vals[idx[u], j] = c / g.n_nodes
    return {u: WindowSeries(centers, vals[i]) for u, i in idx.items()}
