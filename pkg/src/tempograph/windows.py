"""Windowed graph views G(t, tau) and their incremental sliding computation.

A window centred at ``t`` with length ``tau`` covers the half-open interval
``(t - floor(tau/2), t + ceil(tau/2)]``, which is exactly ``tau`` seconds wide
for odd and even ``tau`` alike. Every interaction in the interval contributes
to one deduplicated directed edge whose weight counts the interactions.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import AbstractSet, Iterator, Mapping

import numpy as np

from .event_log import EventLog

DAY = 86_400
HOUR = 3_600


@dataclass(frozen=True)
class WindowSpec:
    t: int
    tau: int

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError(f"window length must be positive, got {self.tau}")

    @property
    def lo(self) -> int:
        """Exclusive left edge."""
        return self.t - self.tau // 2

    @property
    def hi(self) -> int:
        """Inclusive right edge."""
        return self.t + (self.tau - self.tau // 2)

    def contains(self, ts: int) -> bool:
        return self.lo < ts <= self.hi


@dataclass(frozen=True, eq=False)
class WindowedGraph:
    """Immutable snapshot of one window.

    ``edges`` maps ordered pairs ``(u, v)`` to the number of in-window
    interactions from ``u`` to ``v``; ``nodes`` is a read-only set view.
    """

    spec: WindowSpec
    nodes: AbstractSet[int]
    edges: Mapping[tuple[int, int], int]

    @classmethod
    def build(cls, spec: WindowSpec, edges: dict[tuple[int, int], int]) -> "WindowedGraph":
        nodes = {u for e in edges for u in e}
        return cls(spec, frozenset(nodes), MappingProxyType(dict(edges)))

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WindowedGraph):
            return NotImplemented
        return (
            self.spec == other.spec
            and set(self.nodes) == set(other.nodes)
            and dict(self.edges) == dict(other.edges)
        )

    __hash__ = None  # type: ignore[assignment]

    def is_subgraph_of(self, other: "WindowedGraph") -> bool:
        """Node and edge containment with weights bounded by ``other``'s."""
        if not set(self.nodes) <= set(other.nodes):
            return False
        oe = other.edges
        return all(e in oe and w <= oe[e] for e, w in self.edges.items())

    def __reduce__(self):
        # key views do not pickle
        return _rebuild_graph, (self.spec, frozenset(self.nodes), dict(self.edges))


def _rebuild_graph(spec, nodes, edges):
    return WindowedGraph(spec, nodes, MappingProxyType(edges))


@dataclass(frozen=True)
class SlidingSchedule:
    """Window centres ``t_first, t_first + delta, ...`` up to ``t_last``."""

    tau: int
    delta: int
    t_first: int
    t_last: int

    def __post_init__(self):
        if self.tau <= 0 or self.delta <= 0:
            raise ValueError("tau and delta must be positive")

    @classmethod
    def covering(
        cls,
        log: EventLog,
        tau: int,
        delta: int,
        *,
        align: str = "epoch",
        t_from: int | None = None,
        t_to: int | None = None,
    ) -> "SlidingSchedule":
        """Schedule spanning the log (or ``[t_from, t_to]``).

        With ``align="epoch"`` centres sit on multiples of ``delta`` since the
        epoch, so a one-day offset puts centres on UTC midnights. With
        ``align="start"`` the first centre is the first event's timestamp.
        """
        if len(log) == 0 and (t_from is None or t_to is None):
            raise ValueError("cannot derive a schedule range from an empty log")
        lo = log.t_min if t_from is None else t_from
        hi = log.t_max if t_to is None else t_to
        if align == "epoch":
            first = (lo // delta) * delta
        elif align == "start":
            first = lo
        else:
            raise ValueError(f"unknown alignment {align!r}")
        return cls(tau, delta, first, max(first, hi))

    @property
    def centers(self) -> np.ndarray:
        return np.arange(self.t_first, self.t_last + 1, self.delta, dtype=np.int64)

    def __len__(self) -> int:
        if self.t_last < self.t_first:
            return 0
        return (self.t_last - self.t_first) // self.delta + 1

    def specs(self) -> Iterator[WindowSpec]:
        for t in range(self.t_first, self.t_last + 1, self.delta):
            yield WindowSpec(t, self.tau)

    def split(self, parts: int) -> list["SlidingSchedule"]:
        """Contiguous sub-schedules with the same tau/delta, in order."""
        n = len(self)
        parts = max(1, min(parts, n))
        bounds = [n * i // parts for i in range(parts + 1)]
        out = []
        for a, b in zip(bounds, bounds[1:]):
            if b > a:
                out.append(
                    SlidingSchedule(
                        self.tau,
                        self.delta,
                        self.t_first + a * self.delta,
                        self.t_first + (b - 1) * self.delta,
                    )
                )
        return out


def window_view(
    log: EventLog, spec: WindowSpec, include_self_loops: bool = False
) -> WindowedGraph:
    """Build G(t, tau) from scratch for a single window."""
    view = log.slice(spec.lo, spec.hi)
    edges: dict[tuple[int, int], int] = {}
    get = edges.get
    for key in log.pair_list[view.start : view.stop]:
        if key[0] == key[1] and not include_self_loops:
            continue
        edges[key] = get(key, 0) + 1
    return WindowedGraph.build(spec, edges)


def sliding_windows(
    log: EventLog, sched: SlidingSchedule, include_self_loops: bool = False
) -> Iterator[tuple[int, WindowedGraph]]:
    """Yield ``(t, G(t, tau))`` for every centre of ``sched``.

    Maintains edge multiplicities under two cursors over the sorted log:
    events entering on the right are counted in, events leaving on the left
    counted out. Node counters track incident live edges, so they only move
    when an edge appears or disappears. Each event is touched at most twice across the whole
    sweep, and each yielded graph holds its own copies of the counters.
    """
    pairs = log.pair_list
    ts = log.ts
    edge_count: dict[tuple[int, int], int] = {}
    node_count: dict[int, int] = {}
    left = right = 0
    churn = 0
    half_lo = sched.tau // 2
    half_hi = sched.tau - half_lo
    centers = sched.centers
    lefts = np.searchsorted(ts, centers - half_lo, side="right").tolist()
    rights = np.searchsorted(ts, centers + half_hi, side="right").tolist()
    keep_loops = include_self_loops

    for t, new_left, new_right in zip(centers.tolist(), lefts, rights):
        eget = edge_count.get
        nget = node_count.get
        # add first so every removed event has been counted in
        if new_right > right:
            for key in pairs[right:new_right]:
                s, d = key
                if s == d and not keep_loops:
                    continue
                c = eget(key)
                if c:
                    edge_count[key] = c + 1
                    continue
                edge_count[key] = 1
                node_count[s] = nget(s, 0) + 1
                node_count[d] = nget(d, 0) + 1
            churn += new_right - right
            right = new_right
        if new_left > left:
            for key in pairs[left:new_left]:
                s, d = key
                if s == d and not keep_loops:
                    continue
                c = edge_count[key] - 1
                if c:
                    edge_count[key] = c
                    continue
                del edge_count[key]
                c = node_count[s] - 1
                if c:
                    node_count[s] = c
                else:
                    del node_count[s]
                c = node_count[d] - 1
                if c:
                    node_count[d] = c
                else:
                    del node_count[d]
            left = new_left
        # dict.copy() is a flat memory clone only while deleted slots stay
        # below a third of the table; repack before churn crosses that line
        if 2 * churn > len(edge_count):
            edge_count = dict(edge_count.items())
            node_count = dict(node_count.items())
            churn = 0
        edges = edge_count.copy()
        nodes = node_count.copy()
        yield t, WindowedGraph(WindowSpec(t, sched.tau), nodes.keys(), MappingProxyType(edges))


def naive_windows(
    log: EventLog, sched: SlidingSchedule, include_self_loops: bool = False
) -> Iterator[tuple[int, WindowedGraph]]:
    """Per-centre reconstruction via :func:`window_view`; the non-incremental route."""
    for spec in sched.specs():
        yield spec.t, window_view(log, spec, include_self_loops)
