"""Per-window metric rows over a sliding schedule, optionally across processes."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, Sequence

from .event_log import EventLog
from .metrics import basic_counts, breakdown_from_sizes, component_sizes
from .novelty import FirstSeenTables, build_first_seen, novelty_fractions
from .windows import SlidingSchedule, WindowedGraph, sliding_windows

METRIC_COLUMNS = {
    "counts": ("n_nodes", "n_edges", "avg_degree"),
    "novelty": ("new_node_prop", "new_edge_prop"),
    "components": ("lcc_prop", "pair_prop", "mid_prop", "n_components"),
}
ALL_METRICS = tuple(METRIC_COLUMNS)


def columns_for(metrics: Sequence[str]) -> list[str]:
    cols = ["t"]
    for m in ALL_METRICS:
        if m in metrics:
            cols.extend(METRIC_COLUMNS[m])
    return cols


def window_row(
    t: int,
    g: WindowedGraph,
    metrics: Sequence[str] = ALL_METRICS,
    tables: FirstSeenTables | None = None,
) -> dict:
    row: dict = {"t": t}
    if "counts" in metrics:
        row.update(basic_counts(g)._asdict())
    if "novelty" in metrics:
        if tables is None:
            raise ValueError("novelty metrics need first-seen tables")
        row.update(novelty_fractions(g, tables)._asdict())
    if "components" in metrics:
        b = breakdown_from_sizes(component_sizes(g))
        row.update(
            lcc_prop=b.lcc_prop,
            pair_prop=b.pair_prop,
            mid_prop=b.mid_prop,
            n_components=b.n_components,
        )
    return row


def _rows_for(
    log: EventLog,
    sched: SlidingSchedule,
    metrics: Sequence[str],
    tables: FirstSeenTables | None,
) -> list[dict]:
    return [window_row(t, g, metrics, tables) for t, g in sliding_windows(log, sched)]


def _worker(args):
    log, sched, metrics, tables = args
    return _rows_for(log, sched, metrics, tables)


def default_workers() -> int:
    env = os.environ.get("TEMPOGRAPH_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("TEMPOGRAPH_THREADS must be a positive integer")
        return n
    return os.cpu_count() or 1


def sweep(
    log: EventLog,
    sched: SlidingSchedule,
    metrics: Iterable[str] = ALL_METRICS,
    *,
    workers: int = 1,
    tables: FirstSeenTables | None = None,
) -> list[dict]:
    """Metric rows for every window centre, ordered by ``t``.

    With ``workers > 1`` the centres are split into contiguous blocks, each
    swept incrementally in its own process; blocks are reassembled in order.
    """
    metrics = tuple(metrics)
    unknown = set(metrics) - set(ALL_METRICS)
    if unknown or not metrics:
        raise ValueError(f"metrics must be a non-empty subset of {ALL_METRICS}, got {metrics}")
    if "novelty" in metrics and tables is None:
        tables = build_first_seen(log)
    if workers <= 1 or len(sched) < 2 * workers:
        return _rows_for(log, sched, metrics, tables)
    parts = sched.split(workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunks = pool.map(_worker, [(log, p, metrics, tables) for p in parts])
        return [row for chunk in chunks for row in chunk]
