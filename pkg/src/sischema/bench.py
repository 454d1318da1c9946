"""Desk-scale timing harness: speed-up, scale-up and declared-vs-scanned latency.

Protocol: each configuration runs ``iterations`` times; when there are at
least two, the first run is a warm-up and is dropped from the mean.

Synthetic corpora come from a :class:`CorpusSpec`. A spec draws a random
record template (nested objects and arrays up to ``depth``), and records
follow it, with ``conflict_rate`` of scalar values swapped to another kind
and ``optional_rate`` of fields left out. With both rates at zero the corpus
matches :func:`template_metadata` exactly.
"""

from __future__ import annotations

import csv
import io
import json
import os
import random
import statistics
import string
import time
from dataclasses import dataclass
from typing import Callable

from .closed import (
    DeclaredCollection,
    DeclaredField,
    DeclaredObject,
    DeclaredPrimitive,
    DeclaredSchema,
    DeclaredType,
    Openness,
    dump_declared_schema,
)
from .emit import EmitMeta
from .runner import RunConfig, closed_schema, run_open_inference
from .sis import TypeTag

CSV_COLUMNS = ["mode", "P", "records", "bytes", "local_ms", "global_ms", "emit_ms", "total_ms"]

_SCALARS = [TypeTag.INTEGER, TypeTag.NUMBER, TypeTag.STRING, TypeTag.BOOLEAN, TypeTag.NULL]
_WORDS = ["alpha", "bravo", "delta", "echo", "gamma", "kilo", "lima", "oscar", "sierra", "tango"]


def physical_cores() -> int:
    """Physical cores usable by this process (hyper-threads not counted)."""
    logical = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1
    cores = set()
    try:
        with open("/proc/cpuinfo") as fh:
            phys = core = None
            for line in fh:
                key, _, value = line.partition(":")
                key = key.strip()
                if key == "physical id":
                    phys = value.strip()
                elif key == "core id":
                    core = value.strip()
                elif not key:
                    if core is not None:
                        cores.add((phys, core))
                    phys = core = None
            if core is not None:
                cores.add((phys, core))
    except OSError:
        pass
    return max(1, min(logical, len(cores) or logical))


# -- corpus generation ----------------------------------------------------------


@dataclass(frozen=True)
class CorpusSpec:
    n_fields: int = 8
    depth: int = 3
    conflict_rate: float = 0.05
    optional_rate: float = 0.0
    array_len: int = 4
    seed: int = 0


def make_template(spec: CorpusSpec) -> DeclaredObject:
    rng = random.Random(spec.seed)
    return _template_object(rng, spec, spec.depth, spec.n_fields)


def _template_object(rng, spec, depth, n_fields) -> DeclaredObject:
    fields = []
    for i in range(n_fields):
        name = f"f{i}_{rng.choice(_WORDS)}"
        fields.append(DeclaredField(name, _template_type(rng, spec, depth - 1)))
    return DeclaredObject(tuple(fields))


def _template_type(rng, spec, depth) -> DeclaredType:
    roll = rng.random()
    if depth >= 1 and roll < 0.2:
        return _template_object(rng, spec, depth, max(1, spec.n_fields // 2))
    if depth >= 1 and roll < 0.35:
        return DeclaredCollection(TypeTag.ARRAY, _template_type(rng, spec, depth - 1))
    return DeclaredPrimitive(rng.choice(_SCALARS[:4]))


def template_metadata(spec: CorpusSpec, name: str = "synthetic") -> DeclaredSchema:
    return DeclaredSchema(name, Openness.CLOSED, make_template(spec))


def _scalar(rng: random.Random, tag: TypeTag):
    if tag is TypeTag.INTEGER:
        return rng.randint(-(10**6), 10**6)
    if tag is TypeTag.NUMBER:
        return rng.randint(-(10**6), 10**6) / 100 + 0.001
    if tag is TypeTag.STRING:
        return "".join(rng.choices(string.ascii_lowercase, k=rng.randint(3, 16)))
    if tag is TypeTag.BOOLEAN:
        return rng.random() < 0.5
    return None


def _value(rng: random.Random, t: DeclaredType, spec: CorpusSpec):
    if isinstance(t, DeclaredPrimitive):
        tag = t.tag
        if spec.conflict_rate and rng.random() < spec.conflict_rate:
            tag = rng.choice([s for s in _SCALARS if s is not tag])
        return _scalar(rng, tag)
    if isinstance(t, DeclaredObject):
        out = {}
        for f in t.fields:
            if spec.optional_rate and rng.random() < spec.optional_rate:
                continue
            out[f.name] = _value(rng, f.type, spec)
        return out
    n = rng.randint(1, max(1, spec.array_len))
    return [_value(rng, t.of, spec) for _ in range(n)]


def generate_records(spec: CorpusSpec, n: int, seed: int | None = None) -> list[dict]:
    template = make_template(spec)
    rng = random.Random(spec.seed + 1 if seed is None else seed)
    return [_value(rng, template, spec) for _ in range(n)]


def write_corpus(
    path: str,
    spec: CorpusSpec,
    *,
    n_records: int | None = None,
    target_bytes: int | None = None,
    pool_size: int = 4096,
) -> int:
    """Write an NDJSON corpus; returns the record count.

    Records are drawn at random from a pool of ``pool_size`` generated records
    so that large corpora are cheap to produce.
    """
    if n_records is None and target_bytes is None:
        raise ValueError("give n_records or target_bytes")
    pool = [
        (json.dumps(r, separators=(",", ":")) + "\n").encode("utf-8")
        for r in generate_records(spec, min(pool_size, n_records or pool_size))
    ]
    rng = random.Random(spec.seed + 2)
    written = count = 0
    with open(path, "wb") as fh:
        buf = []
        while True:
            if n_records is not None and count >= n_records:
                break
            if target_bytes is not None and written >= target_bytes:
                break
            line = pool[rng.randrange(len(pool))]
            buf.append(line)
            written += len(line)
            count += 1
            if len(buf) >= 8192:
                fh.write(b"".join(buf))
                buf.clear()
        fh.write(b"".join(buf))
    return count


def write_metadata(path: str, spec: CorpusSpec, name: str = "synthetic") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_declared_schema(template_metadata(spec, name)))


# -- timing -----------------------------------------------------------------------


def timed_runs(fn: Callable[[], object], iterations: int) -> tuple[list[float], list[object]]:
    """Run ``fn`` ``iterations`` times; return kept wall times and all results."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    times, results = [], []
    for _ in range(iterations):
        t0 = time.perf_counter()
        results.append(fn())
        times.append(time.perf_counter() - t0)
    kept = times[1:] if iterations >= 2 else times
    return kept, results


def _mean_ms(values) -> float:
    return 1000 * statistics.fmean(values)


def _std_ms(values) -> float:
    return 1000 * statistics.pstdev(values) if len(values) > 1 else 0.0


def _open_rows(mode: str, inputs: list[str], p: int, iterations: int, split_seed=None):
    cfg = RunConfig(list(inputs), parallelism=p, split_seed=split_seed)
    kept, results = timed_runs(lambda: run_open_inference(cfg), iterations)
    runs = results[1:] if iterations >= 2 else results
    schemas = {doc.dumps() for doc, _ in results}
    if len(schemas) != 1:
        raise RuntimeError(f"schema changed between iterations at P={p}")
    stats = [s for _, s in runs]
    row = {
        "mode": mode,
        "P": p,
        "records": stats[0].records,
        "bytes": stats[0].bytes_read,
        "local_ms": _mean_ms([s.local_seconds for s in stats]),
        "global_ms": _mean_ms([s.global_seconds for s in stats]),
        "emit_ms": _mean_ms([s.emit_seconds for s in stats]),
        "total_ms": _mean_ms(kept),
        "total_std_ms": _std_ms(kept),
        "skew": max(s.skew for s in stats),
    }
    return row, schemas.pop()


def run_speedup(corpus: list[str] | str, p_list, iterations: int = 11) -> list[dict]:
    """Fixed data, growing parallelism. Raises if the schema differs across P."""
    inputs = [corpus] if isinstance(corpus, (str, os.PathLike)) else list(corpus)
    for p in inputs:
        if not os.path.isfile(p):
            raise FileNotFoundError(f"corpus missing: {p}")
    rows, schemas = [], set()
    for p in p_list:
        row, schema = _open_rows("speedup", inputs, p, iterations)
        rows.append(row)
        schemas.add(schema)
    if len(schemas) > 1:
        raise RuntimeError("inferred schema depends on parallelism")
    return rows


def run_scaleup(base_corpus: str, factors, iterations: int = 11) -> tuple[list[dict], float]:
    """Data and parallelism grown together: factor f reads the base corpus f times with P = f.

    Returns the rows and the flatness ratio (max/min mean total time).
    """
    if not os.path.isfile(base_corpus):
        raise FileNotFoundError(f"corpus missing: {base_corpus}")
    rows, schemas = [], set()
    for f in factors:
        row, schema = _open_rows("scaleup", [base_corpus] * f, f, iterations)
        rows.append(row)
        schemas.add(schema)
    if len(schemas) > 1:
        raise RuntimeError("inferred schema depends on scale factor")
    totals = [r["total_ms"] for r in rows]
    flatness = max(totals) / min(totals) if min(totals) > 0 else float("inf")
    return rows, flatness


def run_open_vs_closed(
    corpora: list[str],
    metadata: str,
    iterations: int = 11,
    open_iterations: int | None = None,
    parallelism: int = 1,
    check_agreement: bool = False,
) -> list[dict]:
    """Time the scanning path against the declared-metadata path on each corpus.

    The declared path is sub-millisecond, so host speed drifting over a few
    seconds would otherwise show up as a difference between corpora. Its
    iterations therefore run in rounds across all corpora, one call per
    corpus per round, and the first round is the warm-up.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    open_iterations = iterations if open_iterations is None else open_iterations
    for corpus in corpora:
        if not os.path.isfile(corpus):
            raise FileNotFoundError(f"corpus missing: {corpus}")
    rows, open_schemas = [], []
    for corpus in corpora:
        open_row, open_schema = _open_rows("open", [corpus], parallelism, open_iterations)
        open_schemas.append(open_schema)
        rows.append(
            {
                "corpus": os.path.basename(corpus),
                "records": open_row["records"],
                "bytes": open_row["bytes"],
                "open_ms": open_row["total_ms"],
            }
        )

    def declared() -> str:
        return closed_schema(metadata, EmitMeta())[0].dumps()

    if check_agreement:
        text = declared()
        for corpus, schema in zip(corpora, open_schemas):
            if schema != text:
                raise RuntimeError(f"declared and inferred schemas differ for {corpus}")
    times: list[list[float]] = [[] for _ in corpora]
    for _ in range(iterations):
        for k in range(len(corpora)):
            t0 = time.perf_counter()
            declared()
            times[k].append(time.perf_counter() - t0)
    for k, row in enumerate(rows):
        kept = times[k][1:] if iterations >= 2 else times[k]
        row["closed_ms"] = _mean_ms(kept)
        row["closed_std_ms"] = _std_ms(kept)
    return rows


def rows_to_csv(rows: list[dict], columns: list[str] | None = None) -> str:
    columns = columns or (CSV_COLUMNS if rows and "mode" in rows[0] else list(rows[0]) if rows else CSV_COLUMNS)
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (f"{v:.3f}" if isinstance(v, float) else v) for k, v in row.items()})
    return out.getvalue()
