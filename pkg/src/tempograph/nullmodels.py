"""Randomised reference models: timestamp shuffling and degree-preserving rewiring."""

from __future__ import annotations

import random
from types import MappingProxyType

import numpy as np

from .event_log import EventLog
from .windows import WindowedGraph


def shuffle_timestamps(log: EventLog, seed: int) -> EventLog:
    """Randomly re-pair the log's timestamps with its ``(src, dst)`` pairs.

    The pair multiset and the timestamp multiset are both kept, so the
    all-time aggregate graph is unchanged; temporal correlations are not.
    """
    rng = np.random.default_rng(seed)
    return log.with_timestamps(rng.permutation(log.ts))


def degree_preserving_graph(
    g: WindowedGraph,
    seed: int,
    swaps_per_edge: int = 10,
    max_attempts_per_swap: int = 100,
) -> WindowedGraph:
    """Rewire ``g`` by double-edge swaps that keep every node's in- and out-degree.

    Two edges ``(a, b)`` and ``(c, d)`` become ``(a, d)`` and ``(c, b)`` unless
    that creates a self-loop or a duplicate edge. The chain stops after
    ``swaps_per_edge * |E|`` accepted swaps, or earlier if it runs out of
    attempts (graphs like a star admit no legal swap at all). All output
    weights are 1.
    """
    edges = list(g.edges)
    m = len(edges)
    if m < 2:
        return g
    if len({e[0] for e in edges}) == 1 or len({e[1] for e in edges}) == 1:
        # every swap would recreate an existing edge
        return WindowedGraph(g.spec, g.nodes, MappingProxyType(dict.fromkeys(edges, 1)))
    rng = random.Random(seed)
    present = set(edges)
    target = swaps_per_edge * m
    budget = max_attempts_per_swap * target
    done = attempts = 0
    randrange = rng.randrange
    while done < target and attempts < budget:
        attempts += 1
        i = randrange(m)
        j = randrange(m)
        if i == j:
            continue
        a, b = edges[i]
        c, d = edges[j]
        if a == d or c == b:
            continue
        e1, e2 = (a, d), (c, b)
        if e1 in present or e2 in present:
            continue
        present.remove(edges[i])
        present.remove(edges[j])
        present.add(e1)
        present.add(e2)
        edges[i] = e1
        edges[j] = e2
        done += 1
    return WindowedGraph(g.spec, g.nodes, MappingProxyType(dict.fromkeys(edges, 1)))
