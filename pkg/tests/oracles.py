"""Brute-force reference computations, kept independent of the package internals."""

from collections import deque

import numpy as np

from tempograph.event_log import EventLog, UserTable


def random_log(rng, n_events, n_users=30, t_span=1000, loop_rate=0.05):
    src = rng.integers(0, n_users, n_events)
    dst = rng.integers(0, n_users, n_events)
    # keep self-loops rare but present
    redraw = (src == dst) & (rng.random(n_events) > loop_rate)
    dst[redraw] = (src[redraw] + 1 + rng.integers(0, n_users - 1, redraw.sum())) % n_users
    ts = rng.integers(0, t_span, n_events)
    users = UserTable(f"u{i}" for i in range(n_users))
    return EventLog(src, dst, ts, users)


def triples(log):
    return list(zip(log.src.tolist(), log.dst.tolist(), log.ts.tolist()))


def brute_window(log, t, tau, self_loops=False):
    lo = t - tau // 2
    hi = t + (tau - tau // 2)
    edges = {}
    for s, d, ts in triples(log):
        if lo < ts <= hi and (s != d or self_loops):
            edges[(s, d)] = edges.get((s, d), 0) + 1
    nodes = {u for e in edges for u in e}
    return nodes, edges


def bfs_components(nodes, edges):
    adj = {v: set() for v in nodes}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    seen, comps = set(), []
    for v in sorted(nodes):
        if v in seen:
            continue
        comp, queue = {v}, deque([v])
        seen.add(v)
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.add(y)
                    queue.append(y)
        comps.append(frozenset(comp))
    return comps


def first_seen_scan(log, before, node=None, pair=None):
    """Was ``node`` / ``pair`` active at or before ``before`` (non-loop events)?"""
    for s, d, ts in triples(log):
        if s == d or ts > before:
            continue
        if node is not None and node in (s, d):
            return True
        if pair is not None and (s, d) == pair:
            return True
    return False


def brute_novelty(log, g):
    lo = g.spec.lo
    nodes = [v for v in g.nodes if not first_seen_scan(log, lo, node=v)]
    edges = [e for e in g.edges if not first_seen_scan(log, lo, pair=e)]
    return len(nodes) / g.n_nodes, len(edges) / g.n_edges


def random_graph_edges(rng, n, m):
    edges = set()
    for _ in range(m):
        u, v = rng.integers(0, n, 2).tolist()
        if u != v:
            edges.add((u, v))
    return edges
