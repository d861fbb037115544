"""Per-window structure: counts, weak components, in-degree ranking, and
distributions over the all-time aggregate graph."""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .event_log import EventLog
from .windows import WindowedGraph


class UnionFind:
    """Disjoint sets over arbitrary hashable items, union by size with path halving."""

    def __init__(self, items: Iterable = ()):
        self.parent: dict = {}
        self.size: dict = {}
        for x in items:
            self.add(x)

    def add(self, x) -> None:
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def groups(self) -> list[set]:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), set()).add(x)
        return list(out.values())


class BasicCounts(NamedTuple):
    n_nodes: int
    n_edges: int
    avg_degree: float


@dataclass(frozen=True)
class ComponentBreakdown:
    n_nodes: int
    lcc_size: int
    lcc_prop: float
    pair_prop: float
    mid_prop: float
    n_components: int


class RankedUser(NamedTuple):
    user: int
    indegree: int
    normalized: float


def basic_counts(g: WindowedGraph) -> BasicCounts:
    """Node count, deduplicated edge count, and edges per node."""
    n, m = g.n_nodes, g.n_edges
    return BasicCounts(n, m, m / n if n else 0.0)


def component_sizes(g: WindowedGraph) -> list[int]:
    """Weak component sizes, largest first."""
    parent = {v: v for v in g.nodes}
    size = dict.fromkeys(g.nodes, 1)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            if size[ru] < size[rv]:
                ru, rv = rv, ru
            parent[rv] = ru
            size[ru] += size[rv]
    return sorted((size[v] for v in parent if parent[v] == v), reverse=True)


def components(g: WindowedGraph) -> list[frozenset[int]]:
    """Weakly connected components (edge direction ignored), largest first."""
    uf = UnionFind(g.nodes)
    for u, v in g.edges:
        uf.union(u, v)
    return sorted((frozenset(c) for c in uf.groups()), key=lambda c: (-len(c), min(c)))


def breakdown_from_sizes(sizes: list[int]) -> ComponentBreakdown:
    n = sum(sizes)
    if n == 0:
        return ComponentBreakdown(0, 0, 0.0, 0.0, 0.0, 0)
    lcc = max(sizes)
    rest = list(sizes)
    rest.remove(lcc)
    pairs = sum(s for s in rest if s == 2)
    # singletons (only possible with self-loops kept) land in mid so the three
    # proportions still partition the node set
    mid = n - lcc - pairs
    return ComponentBreakdown(
        n_nodes=n,
        lcc_size=lcc,
        lcc_prop=lcc / n,
        pair_prop=pairs / n,
        mid_prop=mid / n,
        n_components=len(sizes),
    )


def component_breakdown(g: WindowedGraph) -> ComponentBreakdown:
    """Fractions of window nodes in the LCC, in 2-node components, and elsewhere."""
    return breakdown_from_sizes(component_sizes(g))


def in_degrees(g: WindowedGraph) -> Counter:
    """Distinct in-neighbours per node (self-loops do not count)."""
    return Counter(v for u, v in g.edges if u != v)


def top_k_indegree(g: WindowedGraph, k: int) -> list[RankedUser]:
    """The ``k`` highest in-degree users, ties broken by ascending id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    n = g.n_nodes
    if n == 0:
        return []
    deg = in_degrees(g)
    # nodes with in-degree zero still rank when the window has fewer than k targets
    items = ((deg.get(v, 0), v) for v in g.nodes)
    best = heapq.nsmallest(k, items, key=lambda dv: (-dv[0], dv[1]))
    return [RankedUser(v, d, d / n) for d, v in best]


@dataclass(frozen=True)
class Distributions:
    node_degree: Counter
    interaction_degree: Counter
    edge_weight: Counter

    @property
    def weight_one_fraction(self) -> float:
        """Share of interacting ordered pairs that interacted exactly once."""
        total = sum(self.edge_weight.values())
        return self.edge_weight.get(1, 0) / total if total else 0.0


def aggregate_distributions(log: EventLog, degree: str = "union") -> Distributions:
    """Degree, interaction-degree and edge-weight histograms of the all-time graph.

    ``degree`` selects which neighbours count towards node degree: ``"union"``
    (distinct partners in either direction), ``"in"`` or ``"out"``.
    Self-replies are ignored throughout.
    """
    if degree not in ("union", "in", "out"):
        raise ValueError(f"unknown degree mode {degree!r}")
    weights: Counter = Counter()
    activity: Counter = Counter()
    for s, d in zip(log.src_list, log.dst_list):
        if s == d:
            continue
        weights[(s, d)] += 1
        activity[s] += 1
        activity[d] += 1
    partners: dict[int, set[int]] = {}
    for s, d in weights:
        if degree in ("union", "out"):
            partners.setdefault(s, set()).add(d)
        if degree in ("union", "in"):
            partners.setdefault(d, set()).add(s)
    deg_hist = Counter(len(partners.get(u, ())) for u in activity)
    return Distributions(
        node_degree=deg_hist,
        interaction_degree=Counter(activity.values()),
        edge_weight=Counter(weights.values()),
    )
