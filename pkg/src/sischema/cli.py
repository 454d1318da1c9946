"""Command line interface.

    sischema infer --input data.ndjson -P 4 [--stats stats.json] [--sis]
    sischema declared --metadata athlete.meta.json
    sischema validate --schema schema.json --input data.ndjson
    sischema bench --mode speedup|scaleup|open-vs-closed ...
    sischema generate --out corpus.ndjson --records 10000

Exit codes: 0 ok, 1 validation failures, 2 usage, 3 I/O, 4 malformed data.
stdout carries only the requested document; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile

from . import bench
from .closed import Openness, declared_to_sis, load_declared_schema
from .emit import EmitMeta, from_json_schema
from .errors import ConfigError, DecodeError, MetadataError, RecordError, SchemaError
from .runner import FORMATS, RunConfig, closed_schema, infer_sis, run_open_inference
from .sis import deserialize_sis, serialize_sis
from .sources import iter_ndjson, read_json_array
from .validate import violations

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DATA = 4

log = logging.getLogger("sischema")


def _write_output(text: str | bytes, out: str | None) -> None:
    if isinstance(text, str):
        text = text.encode("utf-8")
    if out:
        with open(out, "wb") as fh:
            fh.write(text)
    else:
        sys.stdout.buffer.write(text)
        sys.stdout.flush()


def _meta(args) -> EmitMeta:
    return EmitMeta(id=args.id, title=args.title)


def cmd_infer(args) -> int:
    cfg = RunConfig(
        args.input,
        parallelism=args.parallelism,
        input_format=args.format,
        meta=_meta(args),
        stats_path=args.stats,
        lenient=args.lenient,
        split_seed=args.split_seed,
    )
    if args.sis:
        root, stats = infer_sis(cfg)
        if cfg.stats_path:
            stats.write(cfg.stats_path)
        _write_output(serialize_sis(root), args.out)
    else:
        doc, stats = run_open_inference(cfg)
        _write_output(doc.dumps(), args.out)
    log.info("%d records in %d partitions, %.3f s", stats.records, cfg.parallelism, stats.total_seconds)
    return EXIT_OK


def cmd_declared(args) -> int:
    if args.sis:
        declared = load_declared_schema(args.metadata)
        _write_output(serialize_sis(declared_to_sis(declared)), args.out)
    else:
        doc, declared = closed_schema(args.metadata, _meta(args))
        _write_output(doc.dumps(), args.out)
    if declared.openness is Openness.OPEN:
        print(
            f"notice: dataset {declared.dataset_name!r} is open; records may carry fields "
            "not in its declared type. Use `infer` to scan the records.",
            file=sys.stderr,
        )
    return EXIT_OK


def load_schema_file(path: str):
    """Read either a SIS interchange file or an emitted JSON Schema."""
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        plain = json.loads(data)
    except ValueError as exc:
        raise DecodeError(f"schema file is not JSON: {exc}", "malformed") from None
    if isinstance(plain, dict) and "tag" in plain:
        return deserialize_sis(data)
    if isinstance(plain, dict):
        plain = {k: v for k, v in plain.items() if k not in ("$schema", "$id", "title")}
    return from_json_schema(plain)


def cmd_validate(args) -> int:
    schema = load_schema_file(args.schema)
    failures = 0
    total = 0
    for path in args.input:
        if args.format == "ndjson":
            records = iter_ndjson(path)
        else:
            records = read_json_array(path)
        for i, record in enumerate(records):
            total += 1
            problems = list(violations(record, schema))
            if problems:
                failures += 1
                if failures <= args.max_violations:
                    print(f"{path}: record {i}: {'; '.join(problems)}", file=sys.stderr)
    print(f"{total - failures}/{total} records conform", file=sys.stderr)
    return EXIT_INVALID if failures else EXIT_OK


def _spec(args) -> bench.CorpusSpec:
    return bench.CorpusSpec(
        n_fields=args.fields,
        depth=args.depth,
        conflict_rate=args.conflict_rate,
        optional_rate=args.optional_rate,
        seed=args.seed,
    )


def cmd_generate(args) -> int:
    spec = _spec(args)
    target = int(args.size_mb * 1e6) if args.size_mb else None
    n = bench.write_corpus(args.out, spec, n_records=args.records if not target else None, target_bytes=target)
    if args.metadata_out:
        bench.write_metadata(args.metadata_out, spec)
    log.info("wrote %d records to %s", n, args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.iterations < 1:
        raise ConfigError("--iterations must be >= 1")
    workdir = args.workdir or tempfile.mkdtemp(prefix="sischema-bench-")
    spec = _spec(args)

    def corpus(n_records: int, name: str) -> str:
        path = os.path.join(workdir, name)
        if not os.path.exists(path):
            bench.write_corpus(path, spec, n_records=n_records)
        return path

    if args.mode == "speedup":
        inputs = args.corpus or [corpus(args.records, f"speedup-{args.records}.ndjson")]
        rows = bench.run_speedup(inputs, args.parallelism, args.iterations)
    elif args.mode == "scaleup":
        base = args.corpus[0] if args.corpus else corpus(args.records, f"scaleup-{args.records}.ndjson")
        rows, flatness = bench.run_scaleup(base, args.factors, args.iterations)
        print(f"flatness (max/min mean time): {flatness:.3f}", file=sys.stderr)
    else:
        if args.corpus:
            inputs = args.corpus
        else:
            inputs = [corpus(n, f"ovc-{n}.ndjson") for n in args.sizes]
        metadata = args.metadata
        if metadata is None:
            metadata = os.path.join(workdir, "synthetic.meta.json")
            bench.write_metadata(metadata, spec)
        rows = bench.run_open_vs_closed(inputs, metadata, args.iterations)

    if args.table_format == "json":
        text = json.dumps(rows, indent=2) + "\n"
    elif args.mode in ("speedup", "scaleup"):
        text = bench.rows_to_csv(rows)
    else:
        text = bench.rows_to_csv(rows, ["corpus", "records", "bytes", "open_ms", "closed_ms"])
    _write_output(text, args.out)
    return EXIT_OK


def _add_generator_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("synthetic corpus")
    g.add_argument("--fields", type=int, default=8, help="top-level fields per record (default: 8)")
    g.add_argument("--depth", type=int, default=3, help="nesting depth (default: 3)")
    g.add_argument("--conflict-rate", type=float, default=0.05, help="share of values with a conflicting type")
    g.add_argument("--optional-rate", type=float, default=0.0, help="share of fields left out of a record")
    g.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sischema", description="Infer JSON Schemas from JSON records")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infer", help="infer a schema by scanning records")
    p.add_argument("--input", nargs="+", action="extend", required=True, metavar="PATH")
    p.add_argument("-P", "--parallelism", type=int, default=1, help="worker processes (default: 1)")
    p.add_argument("--format", choices=FORMATS, default="ndjson")
    p.add_argument("--out", help="write the schema here instead of stdout")
    p.add_argument("--stats", help="write run statistics (JSON) here")
    p.add_argument("--lenient", action="store_true", help="skip malformed records instead of failing")
    p.add_argument("--id", help="$id of the emitted schema")
    p.add_argument("--title", help="title of the emitted schema")
    p.add_argument("--sis", action="store_true", help="emit the SIS interchange form instead")
    p.add_argument("--split-seed", type=int, default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("declared", help="schema from declared dataset metadata (reads no records)")
    p.add_argument("--metadata", required=True, metavar="PATH")
    p.add_argument("--out")
    p.add_argument("--id")
    p.add_argument("--title")
    p.add_argument("--sis", action="store_true")
    p.set_defaults(func=cmd_declared)

    p = sub.add_parser("validate", help="check records against a schema")
    p.add_argument("--schema", required=True, help="SIS interchange file or emitted JSON Schema")
    p.add_argument("--input", nargs="+", action="extend", required=True, metavar="PATH")
    p.add_argument("--format", choices=FORMATS, default="ndjson")
    p.add_argument("--max-violations", type=int, default=10, help="violations to print (default: 10)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="timing sweeps")
    p.add_argument("--mode", choices=["speedup", "scaleup", "open-vs-closed"], default="speedup")
    p.add_argument("--corpus", nargs="+", help="existing NDJSON corpus (default: generate one)")
    p.add_argument("--records", type=int, default=100_000, help="generated corpus size (default: 100000)")
    p.add_argument("--sizes", type=int, nargs="+", default=[10_000, 100_000, 1_000_000],
                   help="corpus sizes for open-vs-closed")
    p.add_argument("--metadata", help="declared metadata for open-vs-closed")
    p.add_argument("-P", "--parallelism", type=int, nargs="+", default=[1, 2, 4, 8])
    p.add_argument("--factors", type=int, nargs="+", default=[1, 2, 4])
    p.add_argument("--iterations", type=int, default=11)
    p.add_argument("--table-format", choices=["csv", "json"], default="csv")
    p.add_argument("--workdir", help="where generated corpora are kept")
    p.add_argument("--out")
    _add_generator_args(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("generate", help="write a synthetic NDJSON corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--records", type=int, default=10_000)
    p.add_argument("--size-mb", type=float, help="target size instead of a record count")
    p.add_argument("--metadata-out", help="also write matching declared metadata")
    _add_generator_args(p)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RecordError, DecodeError, MetadataError) as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SchemaError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
