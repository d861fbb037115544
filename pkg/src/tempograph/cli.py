"""Command-line front end: ``tempograph <command> [options]``.

Every command writes CSV. ``--out -`` sends a single table to standard
output; progress and errors go to standard error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import re
import sys
from contextlib import contextmanager
from typing import Iterable, Sequence

from . import __version__
from .event_log import EventLog, ParseError, parse_time, read_log, write_csv
from .metrics import aggregate_distributions, component_breakdown
from .novelty import spike_detect
from .nullmodels import degree_preserving_graph, shuffle_timestamps
from .sweep import ALL_METRICS, columns_for, default_workers, sweep
from .synth import GeneratorConfig, config_from_mapping, demo_config, generate, read_config_file
from .timeseries import (
    WindowSeries,
    aggregate_top_users,
    lcc_cdf,
    low_pass,
    top_user_trajectories,
    topk_persistence,
)
from .windows import SlidingSchedule, sliding_windows

log = logging.getLogger("tempograph")

UNITS = {"s": 1, "m": 60, "h": 3600, "d": 86_400, "w": 7 * 86_400, "y": 365 * 86_400}
DEFAULT_WINDOWS = "1h,1d,7d,30d"
_DURATION = re.compile(r"^\s*(\d+)\s*([smhdwy]?)\s*$")


class CLIError(Exception):
    pass


def parse_duration(text: str) -> int:
    """``90d`` -> seconds. A bare integer is seconds; ``y`` is 365 days."""
    m = _DURATION.match(text)
    if not m:
        raise ValueError(f"bad duration {text!r} (expected <int><unit>, unit in s/m/h/d/w/y)")
    n = int(m.group(1)) * UNITS[m.group(2) or "s"]
    if n <= 0:
        raise ValueError(f"duration {text!r} must be positive")
    return n


def format_duration(seconds: int) -> str:
    for unit in ("y", "w", "d", "h", "m"):
        if seconds % UNITS[unit] == 0:
            return f"{seconds // UNITS[unit]}{unit}"
    return f"{seconds}s"


def _durations(text: str) -> list[int]:
    return [parse_duration(p) for p in text.split(",") if p.strip()]


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


@contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
        sys.stdout.flush()
    else:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def write_table(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with _open_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _out_path(args, name: str, n_tables: int = 1) -> str:
    if args.out == "-":
        if n_tables > 1:
            raise CLIError("--out - only works when a single table is produced")
        return "-"
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _load(args) -> EventLog:
    try:
        ev = read_log(args.input, args.format, strict=getattr(args, "strict", False))
    except ParseError as exc:
        raise CLIError(f"{args.input}: {exc}") from None
    r = ev.report
    if r is not None:
        log.info(
            "read %s: %d accepted, %d rejected, %d self-replies",
            args.input, r.accepted, r.rejected, r.self_replies,
        )
    return ev


def _schedule(args, ev: EventLog, tau: int) -> SlidingSchedule:
    return SlidingSchedule.covering(
        ev,
        tau,
        parse_duration(args.offset),
        align=args.align,
        t_from=parse_time(args.t_from) if args.t_from else None,
        t_to=parse_time(args.t_to) if args.t_to else None,
    )


def _read_column(path: str, column: str) -> tuple[list[int], list[float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or column not in reader.fieldnames or "t" not in reader.fieldnames:
            raise CLIError(f"{path}: needs columns 't' and {column!r}")
        ts, vals = [], []
        for row in reader:
            ts.append(int(row["t"]))
            vals.append(float(row[column]))
    return ts, vals


# -- commands -----------------------------------------------------------------


def cmd_sweep(args) -> None:
    ev = _load(args)
    metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
    if not metrics:
        raise CLIError("select at least one metric")
    bad = set(metrics) - set(ALL_METRICS)
    if bad:
        raise CLIError(f"unknown metrics {sorted(bad)}; choose from {', '.join(ALL_METRICS)}")
    taus = _durations(args.window)
    workers = args.threads or default_workers()
    cols = columns_for(metrics)
    for tau in taus:
        sched = _schedule(args, ev, tau)
        log.info("sweep tau=%s: %d windows on %d worker(s)", format_duration(tau), len(sched), workers)
        rows = sweep(ev, sched, metrics, workers=workers)
        path = _out_path(args, f"sweep_{format_duration(tau)}.csv", len(taus))
        write_table(path, cols, ([r[c] for c in cols] for r in rows))


def cmd_churn(args) -> None:
    ev = _load(args)
    taus = _durations(args.window)
    n_tables = 2 * len(taus)
    for tau in taus:
        sched = _schedule(args, ev, tau)
        rep = topk_persistence(ev, sched, args.k)
        label = format_duration(tau)
        names = ev.users.names
        users = sorted(rep.counts, key=lambda u: (-rep.counts[u], u))
        write_table(
            _out_path(args, f"churn_{label}.csv", n_tables),
            ("user", "count", "proportion", "first_t", "last_t"),
            (
                (names[u], rep.counts[u], rep.proportion(u), rep.first_window[u], rep.last_window[u])
                for u in users
            ),
        )
        write_table(
            _out_path(args, f"persistence_{label}.csv", n_tables),
            ("proportion", "users"),
            rep.persistence_curve(),
        )


def cmd_trajectories(args) -> None:
    ev = _load(args)
    users = aggregate_top_users(ev, args.k)
    taus = _durations(args.window)
    names = ev.users.names
    for tau in taus:
        series = top_user_trajectories(ev, _schedule(args, ev, tau), users)
        rows = (
            (int(t), names[u], float(v))
            for u in users
            for t, v in zip(series[u].t, series[u].values)
        )
        write_table(
            _out_path(args, f"trajectories_{format_duration(tau)}.csv", len(taus)),
            ("t", "user", "value"),
            rows,
        )


def cmd_cdf(args) -> None:
    _, vals = _read_column(args.input, args.column)
    write_table(_out_path(args, "cdf.csv"), ("x", "F"), lcc_cdf(vals))


def cmd_distributions(args) -> None:
    ev = _load(args)
    dist = aggregate_distributions(ev, args.degree)
    tables = {
        "node_degree.csv": dist.node_degree,
        "interaction_degree.csv": dist.interaction_degree,
        "edge_weight.csv": dist.edge_weight,
    }
    for name, hist in tables.items():
        write_table(_out_path(args, name, len(tables)), ("value", "count"), sorted(hist.items()))
    log.info("share of pairs interacting exactly once: %.4f", dist.weight_one_fraction)


def cmd_nullmodel(args) -> None:
    ev = _load(args)
    if args.model == "shuffle":
        shuffled = shuffle_timestamps(ev, args.seed)
        with _open_out(_out_path(args, "shuffled.csv")) as fh:
            write_csv(shuffled, fh)
        return
    taus = _durations(args.window)
    for tau in taus:
        sched = _schedule(args, ev, tau)
        rows = []
        for i, (t, g) in enumerate(sliding_windows(ev, sched)):
            if g.n_edges:
                g = degree_preserving_graph(g, args.seed + i)
            b = component_breakdown(g)
            rows.append((t, b.n_nodes, b.lcc_prop, b.pair_prop, b.mid_prop, b.n_components))
        write_table(
            _out_path(args, f"restrained_{format_duration(tau)}.csv", len(taus)),
            ("t", "n_nodes", "lcc_prop", "pair_prop", "mid_prop", "n_components"),
            rows,
        )


def cmd_synth(args) -> None:
    if args.demo:
        cfg = demo_config()
    elif args.config:
        cfg = read_config_file(args.config)
    else:
        cfg = GeneratorConfig()
    overrides = {}
    for item in args.set or ():
        if "=" not in item:
            raise CLIError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        overrides[k] = v
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    cfg = config_from_mapping(overrides, cfg)
    ev = generate(cfg)
    log.info("generated %d events over %d users", len(ev), len(ev.users))
    with _open_out(_out_path(args, "synthetic.csv")) as fh:
        write_csv(ev, fh)


def cmd_filter(args) -> None:
    ts, vals = _read_column(args.input, args.column)
    series = low_pass(WindowSeries(ts, vals), parse_duration(args.cutoff))
    write_table(
        _out_path(args, "filtered.csv"),
        ("t", "value"),
        zip(series.t.tolist(), series.values.tolist()),
    )


def cmd_spikes(args) -> None:
    ts, vals = _read_column(args.input, args.column)
    peaks = spike_detect(ts, vals, args.z, args.span)
    write_table(_out_path(args, "spikes.csv"), ("t", "value"), peaks)


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tempograph", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def add_input(sp, events=True):
        sp.add_argument("--input", required=True, help="event log" if events else "CSV table")
        if events:
            sp.add_argument("--format", choices=("csv", "jsonl"), default=None,
                            help="default: from file extension")
            sp.add_argument("--strict", action="store_true", help="abort on the first bad row")

    def add_windows(sp, default=DEFAULT_WINDOWS):
        sp.add_argument("--window", default=default, help="comma list of durations, e.g. 1h,1d,7d")
        sp.add_argument("--offset", default="1d", help="slide between window centres")
        sp.add_argument("--from", dest="t_from", help="first centre (epoch or RFC 3339)")
        sp.add_argument("--to", dest="t_to", help="last centre bound (epoch or RFC 3339)")
        sp.add_argument("--align", choices=("epoch", "start"), default="epoch",
                        help="centres on multiples of the offset, or from the first event")

    def add_out(sp):
        sp.add_argument("--out", required=True, help="output directory, or - for stdout")

    sp = sub.add_parser("sweep", help="per-window metrics table per window size")
    add_input(sp)
    add_windows(sp)
    sp.add_argument("--metrics", default=",".join(ALL_METRICS),
                    help=f"comma subset of {','.join(ALL_METRICS)}")
    sp.add_argument("--threads", type=int, default=None,
                    help="worker processes (default: TEMPOGRAPH_THREADS or CPU count)")
    add_out(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("churn", help="top-k membership counts and persistence curve")
    add_input(sp)
    add_windows(sp)
    sp.add_argument("--k", type=int, default=20)
    add_out(sp)
    sp.set_defaults(func=cmd_churn)

    sp = sub.add_parser("trajectories", help="normalised in-degree of the aggregate top-k users")
    add_input(sp)
    add_windows(sp, default="30d")
    sp.add_argument("--k", type=int, default=20)
    add_out(sp)
    sp.set_defaults(func=cmd_trajectories)

    sp = sub.add_parser("cdf", help="empirical CDF of a sweep column")
    add_input(sp, events=False)
    sp.add_argument("--column", default="lcc_prop")
    add_out(sp)
    sp.set_defaults(func=cmd_cdf)

    sp = sub.add_parser("distributions", help="aggregate-graph histograms")
    add_input(sp)
    sp.add_argument("--degree", choices=("union", "in", "out"), default="union")
    add_out(sp)
    sp.set_defaults(func=cmd_distributions)

    sp = sub.add_parser("nullmodel", help="shuffled log, or restrained-model component breakdown")
    add_input(sp)
    sp.add_argument("--model", choices=("shuffle", "degree"), default="shuffle")
    add_windows(sp, default="1h")
    sp.add_argument("--seed", type=int, default=0)
    add_out(sp)
    sp.set_defaults(func=cmd_nullmodel)

    sp = sub.add_parser("synth", help="generate a synthetic event log")
    sp.add_argument("--config", help="key=value file")
    sp.add_argument("--demo", action="store_true", help="use the documented demo configuration")
    sp.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one setting")
    sp.add_argument("--seed", type=int, default=None)
    add_out(sp)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("filter", help="low-pass filter a sweep column")
    add_input(sp, events=False)
    sp.add_argument("--column", default="lcc_prop")
    sp.add_argument("--cutoff", default="6h", help="shortest period kept")
    add_out(sp)
    sp.set_defaults(func=cmd_filter)

    sp = sub.add_parser("spikes", help="robust peak detection on a sweep column")
    add_input(sp, events=False)
    sp.add_argument("--column", default="new_node_prop")
    sp.add_argument("--z", type=float, default=3.0)
    sp.add_argument("--span", type=int, default=29, help="rolling window length in points")
    add_out(sp)
    sp.set_defaults(func=cmd_spikes)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    if getattr(args, "threads", None) is not None and args.threads < 1:
        parser.error("--threads must be positive")
    try:
        args.func(args)
    except (CLIError, ValueError, OSError) as exc:
        print(f"tempograph: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
