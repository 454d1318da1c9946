"""Record readers for NDJSON byte ranges and JSON-array files.

Every byte read from a dataset file passes through ``IO_COUNTER`` so tests can
assert that a code path touched no records at all.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Iterator

from .errors import RecordError


class IOCounter:
    def __init__(self):
        self.bytes = 0
        self.files_opened = 0

    def reset(self) -> None:
        self.bytes = 0
        self.files_opened = 0


IO_COUNTER = IOCounter()


def _reject_constant(name):
    raise ValueError(f"{name} is not valid JSON")


@dataclass
class ReadStats:
    bytes_read: int = 0
    records: int = 0
    skipped: int = 0
    duplicate_keys: int = 0


@dataclass
class _Decoder:
    stats: ReadStats = field(default_factory=ReadStats)

    def _pairs(self, pairs):
        out = dict(pairs)  # last occurrence wins
        if len(out) != len(pairs):
            self.stats.duplicate_keys += len(pairs) - len(out)
        return out

    def loads(self, data):
        return json.loads(data, object_pairs_hook=self._pairs, parse_constant=_reject_constant)


@dataclass(frozen=True)
class Segment:
    """A half-open byte range ``[start, end)`` of one file, aligned to line starts."""

    path: str
    start: int
    end: int

    @property
    def size(self) -> int:
        return self.end - self.start


class NdjsonReader:
    """Iterate the JSON object records held in a list of NDJSON segments.

    Blank lines are ignored. Malformed lines and non-object records raise
    :class:`RecordError` unless ``lenient``, in which case they are counted in
    ``stats.skipped``.
    """

    def __init__(self, segments: list[Segment], lenient: bool = False):
        self.segments = list(segments)
        self.lenient = lenient
        self._decoder = _Decoder()
        self.stats = self._decoder.stats

    def __iter__(self) -> Iterator[dict]:
        stats = self.stats
        loads = self._decoder.loads
        ordinal = 0
        for seg in self.segments:
            if seg.size <= 0:
                continue
            IO_COUNTER.files_opened += 1
            with open(seg.path, "rb") as fh:
                fh.seek(seg.start)
                offset = seg.start
                while offset < seg.end:
                    line = fh.readline()
                    if not line:
                        break
                    line_offset = offset
                    offset += len(line)
                    stats.bytes_read += len(line)
                    IO_COUNTER.bytes += len(line)
                    if line.isspace():
                        continue
                    try:
                        record = loads(line)
                    except (ValueError, RecursionError) as exc:
                        if self.lenient:
                            stats.skipped += 1
                            continue
                        raise RecordError(
                            f"malformed JSON: {exc}",
                            "malformed",
                            ordinal=ordinal,
                            offset=line_offset,
                            path=seg.path,
                        ) from None
                    if type(record) is not dict:
                        if self.lenient:
                            stats.skipped += 1
                            continue
                        raise RecordError(
                            "record must be a JSON object",
                            "not-object",
                            ordinal=ordinal,
                            offset=line_offset,
                            path=seg.path,
                        )
                    ordinal += 1
                    stats.records += 1
                    yield record


def read_json_array(path: str, lenient: bool = False, stats: ReadStats | None = None) -> list[dict]:
    """Load a file holding one top-level JSON array of object records."""
    decoder = _Decoder(stats if stats is not None else ReadStats())
    with open(path, "rb") as fh:
        data = fh.read()
    IO_COUNTER.files_opened += 1
    IO_COUNTER.bytes += len(data)
    decoder.stats.bytes_read += len(data)
    try:
        doc = decoder.loads(data) if data.strip() else []
    except ValueError as exc:
        raise RecordError(
            f"malformed JSON: {exc}", "malformed", offset=getattr(exc, "pos", None), path=path
        ) from None
    if type(doc) is not list:
        raise RecordError("expected a top-level JSON array of records", "not-array", path=path)
    records = []
    for i, record in enumerate(doc):
        if type(record) is not dict:
            if lenient:
                decoder.stats.skipped += 1
                continue
            raise RecordError("record must be a JSON object", "not-object", ordinal=i, path=path)
        records.append(record)
    decoder.stats.records += len(records)
    return records


def iter_ndjson(path: str, lenient: bool = False) -> NdjsonReader:
    return NdjsonReader([Segment(path, 0, os.path.getsize(path))], lenient=lenient)


def _next_line_start(fh, pos: int, size: int) -> int:
    """Smallest line start >= pos (``size`` if none)."""
    if pos <= 0:
        return 0
    if pos >= size:
        return size
    fh.seek(pos - 1)
    if fh.read(1) == b"\n":
        return pos
    fh.readline()
    return min(fh.tell(), size)


def split_ndjson(paths: list[str], cuts: list[float]) -> list[list[Segment]]:
    """Split the concatenation of ``paths`` at the given global byte positions.

    Each cut is moved forward to the next line start, so every line lands in
    exactly one partition. ``len(cuts) + 1`` partitions are returned; some
    may be empty.
    """
    sizes = [os.path.getsize(p) for p in paths]
    bases = []
    total = 0
    for size in sizes:
        bases.append(total)
        total += size

    aligned = [0]
    for cut in sorted(cuts):
        cut = int(max(0, min(total, cut)))
        for path, base, size in zip(paths, bases, sizes):
            if base <= cut < base + size:
                with open(path, "rb") as fh:
                    cut = base + _next_line_start(fh, cut - base, size)
                break
        aligned.append(max(cut, aligned[-1]))
    aligned.append(total)

    parts = []
    for lo, hi in zip(aligned, aligned[1:]):
        segs = []
        for path, base, size in zip(paths, bases, sizes):
            s, e = max(lo, base), min(hi, base + size)
            if s < e:
                segs.append(Segment(path, s - base, e - base))
        parts.append(segs)
    return parts
