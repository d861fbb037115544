"""First-appearance tables, per-window novelty, and burst detection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .event_log import EventLog
from .windows import WindowedGraph

# scales the MAD to a standard-deviation estimate under normal noise
MAD_TO_SIGMA = 1.4826


class ProvenanceError(KeyError):
    """A window mentions a user or pair the first-seen tables never saw."""


@dataclass(frozen=True)
class FirstSeenTables:
    node_first: Mapping[int, int]
    edge_first: Mapping[tuple[int, int], int]


class Novelty(NamedTuple):
    new_node_prop: float
    new_edge_prop: float


def build_first_seen(log: EventLog, include_self_loops: bool = False) -> FirstSeenTables:
    """Earliest timestamp per user and per ordered pair, in one pass.

    Self-replies are skipped unless ``include_self_loops`` is set, matching
    the default graph construction: a user is first "seen" when they first
    appear in a window graph.
    """
    node_first: dict[int, int] = {}
    edge_first: dict[tuple[int, int], int] = {}
    for s, d, t in zip(log.src_list, log.dst_list, log.ts_list):
        if s == d and not include_self_loops:
            continue
        # the log is sorted, so the first write is the minimum
        if s not in node_first:
            node_first[s] = t
        if d not in node_first:
            node_first[d] = t
        key = (s, d)
        if key not in edge_first:
            edge_first[key] = t
    return FirstSeenTables(node_first, edge_first)


def novelty_fractions(g: WindowedGraph, tables: FirstSeenTables) -> Novelty:
    """Fraction of window nodes and edges never active before the window's left edge."""
    if not g.nodes:
        return Novelty(0.0, 0.0)
    lo = g.spec.lo
    nf, ef = tables.node_first, tables.edge_first
    try:
        new_nodes = sum(1 for v in g.nodes if nf[v] > lo)
        new_edges = sum(1 for e in g.edges if ef[e] > lo)
    except KeyError as exc:
        raise ProvenanceError(
            f"{exc.args[0]!r} is missing from the first-seen tables; "
            "graph and tables come from different logs"
        ) from None
    return Novelty(new_nodes / g.n_nodes, new_edges / g.n_edges)


def _rolling_median_mad(values: np.ndarray, window: int) -> tuple[np.ndarray, np.ndarray]:
    n = len(values)
    if n < window:
        med = float(np.median(values))
        mad = float(np.median(np.abs(values - med)))
        return np.full(n, med), np.full(n, mad)
    half = window // 2
    med = np.empty(n)
    mad = np.empty(n)
    for i in range(n):
        # a full-length window, shifted inwards at the series ends
        a = min(max(0, i - half), n - window)
        w = values[a : a + window]
        m = np.median(w)
        med[i] = m
        mad[i] = np.median(np.abs(w - m))
    return med, mad


def spike_detect(
    times: Sequence[int],
    values: Sequence[float],
    z_threshold: float = 3.0,
    window: int = 29,
) -> list[tuple[int, float]]:
    """Local maxima that rise above a robust rolling baseline.

    A point is flagged when it is a strict interior local maximum (greater
    than its left neighbour, not less than its right) and exceeds
    ``median + z_threshold * 1.4826 * MAD`` computed over a centred window of
    ``window`` points. Series shorter than the window use global statistics.
    """
    v = np.asarray(values, dtype=float)
    if len(v) == 0:
        raise ValueError("series must be non-empty")
    if len(times) != len(v):
        raise ValueError("times and values differ in length")
    if z_threshold <= 0:
        raise ValueError("z_threshold must be positive")
    med, mad = _rolling_median_mad(v, window)
    limit = med + z_threshold * MAD_TO_SIGMA * mad
    peaks = []
    for i in range(1, len(v) - 1):
        if v[i] > v[i - 1] and v[i] >= v[i + 1] and v[i] > limit[i]:
            peaks.append((int(times[i]), float(v[i])))
    return peaks
