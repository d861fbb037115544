"""Ingestion of timestamped reply events into an immutable, time-indexed log.

An interaction ``(src, dst, ts)`` records that user ``src`` replied at time
``ts`` to a post authored by ``dst``. Timestamps are whole seconds since the
Unix epoch (UTC).
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from functools import cached_property
from typing import IO, Iterable, Iterator, NamedTuple, Sequence

import numpy as np

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

CSV_HEADER = ("src", "dst", "ts")


class ParseError(ValueError):
    """Raised in strict mode on the first malformed row."""

    def __init__(self, row: int, reason: str):
        super().__init__(f"row {row}: {reason}")
        self.row = row
        self.reason = reason


class Interaction(NamedTuple):
    src: int
    dst: int
    ts: int


@dataclass
class ParseReport:
    accepted: int = 0
    rejected: int = 0
    self_replies: int = 0
    timestamp_format: str | None = None
    errors: list[tuple[int, str]] = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.accepted + self.rejected


class UserTable:
    """Bijection between external user identifiers and dense integer ids."""

    def __init__(self, names: Iterable[str] = ()):
        self._names: list[str] = []
        self._ids: dict[str, int] = {}
        for name in names:
            self.intern(name)

    def intern(self, name: str) -> int:
        uid = self._ids.get(name)
        if uid is None:
            uid = len(self._names)
            self._ids[name] = uid
            self._names.append(name)
        return uid

    def id_of(self, name: str) -> int:
        return self._ids[name]

    def name_of(self, uid: int) -> str:
        return self._names[uid]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._names)

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, name: object) -> bool:
        return name in self._ids

    def __eq__(self, other: object) -> bool:
        return isinstance(other, UserTable) and self._names == other._names

    def __repr__(self) -> str:
        return f"UserTable({len(self)} users)"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


class EventLog:
    """Time-sorted, read-only sequence of interactions.

    Columns are exposed as read-only int64 arrays (``src``, ``dst``, ``ts``).
    Construction sorts by timestamp with a stable sort, so events sharing a
    timestamp keep their input order.
    """

    def __init__(
        self,
        src: Sequence[int] | np.ndarray,
        dst: Sequence[int] | np.ndarray,
        ts: Sequence[int] | np.ndarray,
        users: UserTable,
        report: ParseReport | None = None,
        *,
        presorted: bool = False,
    ):
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        ts = np.asarray(ts, dtype=np.int64)
        if not (src.shape == dst.shape == ts.shape) or src.ndim != 1:
            raise ValueError("src, dst and ts must be 1-d arrays of equal length")
        if len(src) and (
            min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= len(users)
        ):
            raise ValueError("user id out of range of the user table")
        if not presorted:
            order = np.argsort(ts, kind="stable")
            src, dst, ts = src[order], dst[order], ts[order]
        elif len(ts) > 1 and np.any(ts[1:] < ts[:-1]):
            raise ValueError("presorted=True but timestamps are not sorted")
        self.src = _frozen(src)
        self.dst = _frozen(dst)
        self.ts = _frozen(ts)
        self.users = users
        self.report = report

    @classmethod
    def from_records(cls, records: Iterable[tuple[str, str, int]]) -> "EventLog":
        """Build a log from ``(src_name, dst_name, ts)`` triples."""
        users = UserTable()
        src, dst, ts = [], [], []
        for s, d, t in records:
            src.append(users.intern(str(s)))
            dst.append(users.intern(str(d)))
            ts.append(int(t))
        return cls(src, dst, ts, users)

    def __getstate__(self):
        # cached Python lists are rebuilt on demand rather than shipped
        return {k: self.__dict__[k] for k in ("src", "dst", "ts", "users", "report")}

    def __setstate__(self, state):
        for k in ("src", "dst", "ts"):
            state[k] = _frozen(state[k])
        self.__dict__.update(state)

    def __len__(self) -> int:
        return len(self.ts)

    def __iter__(self) -> Iterator[Interaction]:
        return map(Interaction._make, zip(self.src_list, self.dst_list, self.ts_list))

    def __getitem__(self, i: int) -> Interaction:
        return Interaction(int(self.src[i]), int(self.dst[i]), int(self.ts[i]))

    def __repr__(self) -> str:
        if not len(self):
            return "EventLog(empty)"
        return f"EventLog({len(self)} events, {len(self.users)} users, ts {self.ts[0]}..{self.ts[-1]})"

    # Plain-int copies for tight Python loops; numpy scalars are slow to iterate.
    @cached_property
    def src_list(self) -> list[int]:
        return self.src.tolist()

    @cached_property
    def dst_list(self) -> list[int]:
        return self.dst.tolist()

    @cached_property
    def ts_list(self) -> list[int]:
        return self.ts.tolist()

    @cached_property
    def pair_list(self) -> list[tuple[int, int]]:
        """``(src, dst)`` per event, built once and shared by window builders."""
        return list(zip(self.src_list, self.dst_list))

    @cached_property
    def self_loop_mask(self) -> np.ndarray:
        m = self.src == self.dst
        m.setflags(write=False)
        return m

    @property
    def n_self_replies(self) -> int:
        return int(self.self_loop_mask.sum())

    @property
    def t_min(self) -> int:
        return int(self.ts[0])

    @property
    def t_max(self) -> int:
        return int(self.ts[-1])

    def index_after(self, x: float) -> int:
        """Index of the first event with ``ts > x``."""
        return int(np.searchsorted(self.ts, x, side="right"))

    def slice(self, lo: float, hi: float) -> "LogSlice":
        """Events with ``lo < ts <= hi``, as a zero-copy view."""
        start = self.index_after(lo)
        stop = self.index_after(hi)
        return LogSlice(self, start, max(start, stop))

    def records(self) -> Iterator[tuple[str, str, int]]:
        names = self.users.names
        for s, d, t in zip(self.src_list, self.dst_list, self.ts_list):
            yield names[s], names[d], t

    def same_events(self, other: "EventLog") -> bool:
        """Equality on user names, order and timestamps (ids may differ)."""
        return len(self) == len(other) and all(
            a == b for a, b in zip(self.records(), other.records())
        )

    def with_timestamps(self, ts: np.ndarray) -> "EventLog":
        """Same pairs in the same order with ``ts`` substituted, then re-sorted."""
        return EventLog(self.src, self.dst, ts, self.users)


@dataclass(frozen=True)
class LogSlice:
    """Contiguous run ``[start, stop)`` of an :class:`EventLog`."""

    log: EventLog
    start: int
    stop: int

    def __len__(self) -> int:
        return self.stop - self.start

    @property
    def src(self) -> np.ndarray:
        return self.log.src[self.start : self.stop]

    @property
    def dst(self) -> np.ndarray:
        return self.log.dst[self.start : self.stop]

    @property
    def ts(self) -> np.ndarray:
        return self.log.ts[self.start : self.stop]

    def __iter__(self) -> Iterator[Interaction]:
        log = self.log
        for i in range(self.start, self.stop):
            yield Interaction(log.src_list[i], log.dst_list[i], log.ts_list[i])


def merge_logs(logs: Iterable[EventLog]) -> EventLog:
    """Union of several logs, re-interning users by name."""
    users = UserTable()
    src, dst, ts = [], [], []
    for log in logs:
        remap = np.array([users.intern(n) for n in log.users.names], dtype=np.int64)
        if len(log):
            src.append(remap[log.src])
            dst.append(remap[log.dst])
            ts.append(log.ts)
    if not src:
        return EventLog([], [], [], users)
    return EventLog(np.concatenate(src), np.concatenate(dst), np.concatenate(ts), users)


# -- timestamps ---------------------------------------------------------------

_RFC3339 = re.compile(
    r"^(\d{4})-(\d{2})-(\d{2})[Tt ](\d{2}):(\d{2}):(\d{2})(\.\d+)?"
    r"([Zz]|[+-]\d{2}:?\d{2})?$"
)
_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


def parse_epoch(value: str | int | float) -> int:
    """Epoch seconds; fractional parts are dropped (floored)."""
    if isinstance(value, bool):
        raise ValueError("boolean is not a timestamp")
    if isinstance(value, int):
        t = value
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite timestamp {value!r}")
        t = math.floor(value)
    else:
        s = value.strip()
        try:
            t = int(s)
        except ValueError:
            f = float(s)
            if not math.isfinite(f):
                raise ValueError(f"non-finite timestamp {s!r}") from None
            t = math.floor(f)
    if not INT64_MIN <= t <= INT64_MAX:
        raise ValueError(f"timestamp {t} outside int64 range")
    return t


def parse_rfc3339(value: str) -> int:
    """RFC 3339 date-time to epoch seconds. A missing offset is read as UTC."""
    m = _RFC3339.match(value.strip())
    if not m:
        raise ValueError(f"not an RFC 3339 timestamp: {value!r}")
    y, mo, d, h, mi, s = (int(g) for g in m.groups()[:6])
    off = m.group(8)
    tz = timezone.utc
    if off and off not in "Zz":
        sign = -1 if off[0] == "-" else 1
        digits = off[1:].replace(":", "")
        tz = timezone(sign * timedelta(hours=int(digits[:2]), minutes=int(digits[2:])))
    # leap second 60 folds into the next second
    extra = 0
    if s == 60:
        s, extra = 59, 1
    dt = datetime(y, mo, d, h, mi, s, tzinfo=tz)
    return (dt - _EPOCH) // timedelta(seconds=1) + extra


def format_rfc3339(ts: int) -> str:
    return (_EPOCH + timedelta(seconds=int(ts))).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_time(value: str) -> int:
    """Accept either epoch seconds or RFC 3339."""
    try:
        return parse_epoch(value)
    except ValueError:
        return parse_rfc3339(value)


def _looks_numeric(value: object) -> bool:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return True
    try:
        float(str(value))
        return True
    except ValueError:
        return False


# -- parsing ------------------------------------------------------------------


def _iter_csv_rows(text: IO[str]) -> Iterator[tuple[int, object, object, object]]:
    reader = csv.reader(text)
    columns = (0, 1, 2)
    width = 0
    for row in reader:
        lineno = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if not width:
            stripped = [c.strip() for c in row]
            if set(CSV_HEADER) <= set(stripped):
                columns = tuple(stripped.index(c) for c in CSV_HEADER)
                width = len(stripped)
                continue
            width = 3
        if len(row) != width:
            yield lineno, None, None, f"expected {width} fields, got {len(row)}"
            continue
        yield lineno, row[columns[0]], row[columns[1]], row[columns[2]]


def _iter_jsonl_rows(text: IO[str]) -> Iterator[tuple[int, object, object, object]]:
    for lineno, line in enumerate(text, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            yield lineno, None, None, f"invalid JSON: {exc.msg}"
            continue
        if not isinstance(obj, dict) or not {"src", "dst", "ts"} <= obj.keys():
            yield lineno, None, None, "object must have keys src, dst, ts"
            continue
        yield lineno, obj["src"], obj["dst"], obj["ts"]


def _user_key(value: object) -> str:
    if value is None or isinstance(value, (bool, dict, list, float)):
        raise ValueError(f"invalid user identifier {value!r}")
    s = str(value).strip()
    if not s:
        raise ValueError("empty user identifier")
    return s


def parse_interactions(
    stream: IO[bytes] | IO[str] | bytes | str,
    format: str = "csv",
    *,
    strict: bool = False,
) -> EventLog:
    """Parse CSV or JSONL interaction records into an :class:`EventLog`.

    The timestamp flavour (epoch seconds or RFC 3339) is fixed by the first
    well-formed row; rows in the other flavour are rejected. Malformed rows
    are counted in ``log.report`` and skipped, or raise :class:`ParseError`
    when ``strict`` is set.
    """
    if isinstance(stream, (bytes, bytearray)):
        text: IO[str] = io.StringIO(stream.decode("utf-8"))
    elif isinstance(stream, str):
        text = io.StringIO(stream)
    elif isinstance(stream, io.TextIOBase):
        text = stream
    else:
        text = io.TextIOWrapper(stream, encoding="utf-8", newline="")

    if format == "csv":
        rows = _iter_csv_rows(text)
    elif format == "jsonl":
        rows = _iter_jsonl_rows(text)
    else:
        raise ValueError(f"unknown format {format!r} (expected csv or jsonl)")

    report = ParseReport()
    users = UserTable()
    src: list[int] = []
    dst: list[int] = []
    ts: list[int] = []
    ts_parser = None

    def reject(lineno: int, reason: str) -> None:
        if strict:
            raise ParseError(lineno, reason)
        report.rejected += 1
        report.errors.append((lineno, reason))

    for lineno, s_raw, d_raw, t_raw in rows:
        if s_raw is None:
            reject(lineno, str(t_raw))
            continue
        try:
            s_key = _user_key(s_raw)
            d_key = _user_key(d_raw)
        except ValueError as exc:
            reject(lineno, str(exc))
            continue
        if ts_parser is None:
            if _looks_numeric(t_raw):
                ts_parser, report.timestamp_format = parse_epoch, "epoch"
            else:
                ts_parser, report.timestamp_format = parse_rfc3339, "rfc3339"
        try:
            if ts_parser is parse_rfc3339 and not isinstance(t_raw, str):
                raise ValueError(f"expected RFC 3339 string, got {t_raw!r}")
            t = ts_parser(t_raw)
        except (ValueError, OverflowError) as exc:
            reject(lineno, f"bad timestamp: {exc}")
            continue
        src.append(users.intern(s_key))
        dst.append(users.intern(d_key))
        ts.append(t)
        report.accepted += 1
        if s_key == d_key:
            report.self_replies += 1

    return EventLog(src, dst, ts, users, report)


def read_log(path: str, format: str | None = None, *, strict: bool = False) -> EventLog:
    if format is None:
        format = "jsonl" if path.endswith((".jsonl", ".ndjson")) else "csv"
    with open(path, "rb") as fh:
        return parse_interactions(fh, format, strict=strict)


def write_csv(log: EventLog, out: IO[str]) -> None:
    """Native export: ``src,dst,ts`` header, epoch-second timestamps."""
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(log.records())


def to_csv_bytes(log: EventLog) -> bytes:
    buf = io.StringIO()
    write_csv(log, buf)
    return buf.getvalue().encode("utf-8")
