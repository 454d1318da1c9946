"""The inference pipeline: split the input, infer per partition in parallel, merge, emit.

Each partition runs in its own worker process and ships back its local
schema in the SIS interchange encoding. The merge and the emit run on the
calling thread.
"""

from __future__ import annotations

import json
import logging
import multiprocessing
import os
import random
import time
from concurrent.futures import FIRST_EXCEPTION, ProcessPoolExecutor, wait
from dataclasses import asdict, dataclass, field

from .closed import DeclaredSchema, declared_to_sis, load_declared_schema
from .emit import EmitMeta, JsonSchemaDoc, to_json_schema
from .errors import ConfigError, RecordError
from .infer import LocalSis, compute_local_sis
from .merge import merge_sis
from .sis import SisNode, deserialize_sis, serialize_sis
from .sources import IO_COUNTER, NdjsonReader, ReadStats, Segment, read_json_array, split_ndjson

log = logging.getLogger(__name__)

FORMATS = ("ndjson", "json-array")


@dataclass
class RunConfig:
    inputs: list[str]
    parallelism: int = 1
    input_format: str = "ndjson"
    meta: EmitMeta = field(default_factory=EmitMeta)
    stats_path: str | None = None
    lenient: bool = False
    # None: even byte split; an int seeds random cut positions
    split_seed: int | None = None

    def __post_init__(self):
        if isinstance(self.inputs, (str, os.PathLike)):
            self.inputs = [self.inputs]
        self.inputs = [os.fspath(p) for p in self.inputs]
        if not self.inputs:
            raise ConfigError("at least one input path is required")
        if not isinstance(self.parallelism, int) or self.parallelism < 1:
            raise ConfigError(f"parallelism must be >= 1, got {self.parallelism!r}")
        if self.input_format not in FORMATS:
            raise ConfigError(f"unknown input format {self.input_format!r}")


@dataclass
class RunStats:
    parallelism: int = 1
    partition_records: list[int] = field(default_factory=list)
    partition_seconds: list[float] = field(default_factory=list)
    partition_bytes: list[int] = field(default_factory=list)
    local_seconds: float = 0.0
    global_seconds: float = 0.0
    emit_seconds: float = 0.0
    total_seconds: float = 0.0
    bytes_read: int = 0
    skipped: int = 0
    duplicate_keys: int = 0

    @property
    def records(self) -> int:
        return sum(self.partition_records)

    @property
    def skew(self) -> float:
        """Largest partition record count over the mean (1.0 = perfectly even)."""
        counts = self.partition_records
        if not counts or not sum(counts):
            return 1.0
        return max(counts) / (sum(counts) / len(counts))

    def to_dict(self) -> dict:
        out = asdict(self)
        out["records"] = self.records
        out["skew"] = self.skew
        return out

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def _check_readable(paths: list[str]) -> None:
    for p in paths:
        if not os.path.isfile(p):
            raise FileNotFoundError(f"input not found: {p}")
        if not os.access(p, os.R_OK):
            raise PermissionError(f"input not readable: {p}")


def _cut_points(total: int, parts: int, seed: int | None) -> list[float]:
    if parts <= 1:
        return []
    if seed is None:
        return [total * k / parts for k in range(1, parts)]
    rng = random.Random(seed)
    return sorted(rng.uniform(0, total) for _ in range(parts - 1))


def plan_partitions(cfg: RunConfig) -> list:
    """Per-partition sources: ``list[Segment]`` for NDJSON, ``list[dict]`` for JSON arrays."""
    _check_readable(cfg.inputs)
    p = cfg.parallelism
    if cfg.input_format == "ndjson":
        total = sum(os.path.getsize(path) for path in cfg.inputs)
        return split_ndjson(cfg.inputs, _cut_points(total, p, cfg.split_seed))
    records = []
    for path in cfg.inputs:
        records.extend(read_json_array(path, lenient=cfg.lenient))
    # round-robin; a seed shuffles which partition gets which record
    order = list(range(len(records)))
    if cfg.split_seed is not None:
        random.Random(cfg.split_seed).shuffle(order)
    parts: list[list[dict]] = [[] for _ in range(p)]
    for i, idx in enumerate(order):
        parts[i % p].append(records[idx])
    return parts


def partition_input(cfg: RunConfig) -> list:
    """P record streams that jointly yield every input record exactly once."""
    return [_stream(src, cfg.lenient) for src in plan_partitions(cfg)]


def _stream(source, lenient: bool):
    if source and isinstance(source[0], Segment):
        return NdjsonReader(source, lenient=lenient)
    if not source:
        return NdjsonReader([], lenient=lenient)
    return iter(source)


@dataclass
class _PartitionResult:
    partition_id: int
    root: bytes
    records: int
    seconds: float
    bytes_read: int
    skipped: int
    duplicate_keys: int


def _run_partition(partition_id: int, source, lenient: bool) -> _PartitionResult:
    t0 = time.perf_counter()
    stream = _stream(source, lenient)
    try:
        local = compute_local_sis(stream, partition_id)
    except RecordError as exc:
        exc.partition_id = partition_id
        raise
    stats = stream.stats if isinstance(stream, NdjsonReader) else ReadStats()
    return _PartitionResult(
        partition_id,
        serialize_sis(local.root),
        local.record_count,
        time.perf_counter() - t0,
        stats.bytes_read,
        stats.skipped,
        stats.duplicate_keys,
    )


def _mp_context():
    methods = multiprocessing.get_all_start_methods()
    return multiprocessing.get_context("fork" if "fork" in methods else None)


def _local_phase(cfg: RunConfig, plan: list) -> list[_PartitionResult]:
    if len(plan) == 1:
        return [_run_partition(0, plan[0], cfg.lenient)]
    results = []
    with ProcessPoolExecutor(max_workers=cfg.parallelism, mp_context=_mp_context()) as pool:
        futures = [pool.submit(_run_partition, i, src, cfg.lenient) for i, src in enumerate(plan)]
        done, pending = wait(futures, return_when=FIRST_EXCEPTION)
        for fut in futures:
            if fut in done and fut.exception() is not None:
                for other in pending:
                    other.cancel()
                pool.shutdown(wait=False, cancel_futures=True)
                raise fut.exception()
        results = [fut.result() for fut in futures]
    return results


def infer_sis(cfg: RunConfig) -> tuple[SisNode, RunStats]:
    """Local phase over all partitions plus the global merge; returns the canonical root."""
    t0 = time.perf_counter()
    bytes_before = IO_COUNTER.bytes
    plan = plan_partitions(cfg)
    results = _local_phase(cfg, plan)
    t1 = time.perf_counter()

    locals_ = [
        LocalSis(deserialize_sis(r.root), r.records, r.partition_id, r.skipped, r.duplicate_keys)
        for r in results
    ]
    root = merge_sis(locals_)
    t2 = time.perf_counter()

    stats = RunStats(parallelism=cfg.parallelism)
    stats.partition_records = [r.records for r in results]
    stats.partition_seconds = [r.seconds for r in results]
    stats.partition_bytes = [r.bytes_read for r in results]
    stats.local_seconds = t1 - t0
    stats.global_seconds = t2 - t1
    stats.skipped = sum(r.skipped for r in results)
    stats.duplicate_keys = sum(r.duplicate_keys for r in results)
    if cfg.input_format == "ndjson":
        stats.bytes_read = sum(stats.partition_bytes)
        if len(results) > 1:
            # worker processes have their own counter
            IO_COUNTER.bytes += stats.bytes_read
    else:
        stats.bytes_read = IO_COUNTER.bytes - bytes_before
    stats.total_seconds = t2 - t0
    if stats.duplicate_keys:
        log.warning("%d duplicate object keys seen; last occurrence kept", stats.duplicate_keys)
    if stats.skipped:
        log.warning("%d malformed records skipped", stats.skipped)
    return root, stats


def run_open_inference(cfg: RunConfig) -> tuple[JsonSchemaDoc, RunStats]:
    root, stats = infer_sis(cfg)
    t0 = time.perf_counter()
    doc = to_json_schema(root, cfg.meta)
    doc.dumps()
    stats.emit_seconds = time.perf_counter() - t0
    stats.total_seconds += stats.emit_seconds
    if cfg.stats_path:
        stats.write(cfg.stats_path)
    return doc, stats


def closed_schema(metadata_path, meta: EmitMeta | None = None) -> tuple[JsonSchemaDoc, DeclaredSchema]:
    declared = load_declared_schema(metadata_path)
    return to_json_schema(declared_to_sis(declared), meta), declared


def run_closed(metadata_path, meta: EmitMeta | None = None) -> JsonSchemaDoc:
    """Schema straight from declared metadata; reads no records."""
    return closed_schema(metadata_path, meta)[0]
