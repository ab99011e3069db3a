"""Run-trace records and their CSV serialization.

A trace is a sequence of checkpoint rows written while a solver runs, plus
free-form metadata and end-of-run bookkeeping (a status string and matrix-
vector-product counters).  The on-disk format is a plain CSV with the fixed
header ``iter,f_est,delta_k,matvecs,elapsed_s``; metadata appears before the
header and bookkeeping after the last row, both as ``# key=value`` comment
lines.  Floats are written with ``repr`` so a parse of a written file
reproduces every value bit for bit.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Mapping, TextIO

CSV_HEADER = "iter,f_est,delta_k,matvecs,elapsed_s"

_COUNTER_KEYS = ("matvecs_oracle", "matvecs_eval")


@dataclass
class TraceRow:
    """One checkpoint: iterate index, norm estimate at the averaged point,
    relative accuracy, cumulative matrix-vector products, wall time."""

    iter: int
    f_est: float
    delta_k: float
    matvecs: int
    elapsed_s: float

    def to_csv(self) -> str:
        return "%d,%s,%s,%d,%s" % (
            self.iter,
            repr(self.f_est),
            repr(self.delta_k),
            self.matvecs,
            repr(self.elapsed_s),
        )


@dataclass
class RunTrace:
    """A complete run record: metadata, checkpoint rows, final status
    (``early_stop`` or ``budget_exhausted``), and product counters."""

    meta: dict[str, str] = field(default_factory=dict)
    rows: list[TraceRow] = field(default_factory=list)
    status: str = ""
    counters: dict[str, int] = field(default_factory=dict)


class TraceWriter:
    """Incremental CSV writer.

    Metadata and the header are written on construction and every row is
    flushed as it arrives, so a crash mid-run leaves a valid, parseable
    partial trace.  Call :meth:`finalize` to append the status and counter
    lines; closing without finalizing is allowed.
    """

    def __init__(self, path: str | os.PathLike[str], meta: Mapping[str, str]):
        self._file: TextIO | None = open(path, "w")
        for key, value in meta.items():
            self._file.write("# %s=%s\n" % (key, value))
        self._file.write(CSV_HEADER + "\n")
        self._file.flush()
        self._finalized = False

    def write_row(self, row: TraceRow) -> None:
        if self._file is None:
            raise ValueError("writer is closed")
        if self._finalized:
            raise ValueError("writer is finalized")
        self._file.write(row.to_csv() + "\n")
        self._file.flush()

    def finalize(self, status: str, counters: Mapping[str, int]) -> None:
        if self._file is None:
            raise ValueError("writer is closed")
        if self._finalized:
            raise ValueError("writer is finalized")
        if status:
            self._file.write("# status=%s\n" % status)
        for key in _COUNTER_KEYS:
            if key in counters:
                self._file.write("# %s=%d\n" % (key, counters[key]))
        self._file.flush()
        self._finalized = True

    def close(self) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None

    def __enter__(self) -> TraceWriter:
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def write_trace(path: str | os.PathLike[str], trace: RunTrace) -> None:
    """Write a complete trace to ``path`` in one call."""
    with TraceWriter(path, trace.meta) as w:
        for row in trace.rows:
            w.write_row(row)
        w.finalize(trace.status, trace.counters)


def _parse_row(line: str, lineno: int) -> TraceRow:
    parts = line.split(",")
    if len(parts) != 5:
        raise ValueError(
            "line %d: expected 5 comma-separated fields, got %d" % (lineno, len(parts))
        )
    try:
        return TraceRow(
            iter=int(parts[0]),
            f_est=float(parts[1]),
            delta_k=float(parts[2]),
            matvecs=int(parts[3]),
            elapsed_s=float(parts[4]),
        )
    except ValueError as exc:
        raise ValueError("line %d: %s" % (lineno, exc)) from exc


def parse_trace(path: str | os.PathLike[str]) -> RunTrace:
    """Parse a trace CSV written by :class:`TraceWriter` or :func:`write_trace`.

    Raises :class:`ValueError` naming the offending line for any malformed
    content (wrong header, bad field count, unparseable numbers).
    """
    with open(path, "r") as fh:
        lines = fh.read().splitlines()

    meta: dict[str, str] = {}
    rows: list[TraceRow] = []
    status = ""
    counters: dict[str, int] = {}

    header_seen = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            key, sep, value = body.partition("=")
            if not sep:
                continue  # bare comment
            key = key.strip()
            value = value.strip()
            if key == "status":
                status = value
            elif key in _COUNTER_KEYS:
                try:
                    counters[key] = int(value)
                except ValueError as exc:
                    raise ValueError("line %d: %s" % (lineno, exc)) from exc
            else:
                meta[key] = value
            continue
        if not header_seen:
            if line != CSV_HEADER:
                raise ValueError(
                    "line %d: expected header %r, got %r" % (lineno, CSV_HEADER, line)
                )
            header_seen = True
            continue
        rows.append(_parse_row(line, lineno))

    if not header_seen:
        raise ValueError("line 1: missing header %r" % CSV_HEADER)
    return RunTrace(meta=meta, rows=rows, status=status, counters=counters)


def parse_traces(paths: Iterable[str | os.PathLike[str]]) -> list[RunTrace]:
    """Parse several trace files, prefixing any error with the file name."""
    out = []
    for path in paths:
        try:
            out.append(parse_trace(path))
        except (OSError, ValueError) as exc:
            raise ValueError("%s: %s" % (path, exc)) from exc
    return out
