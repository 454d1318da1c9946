"""scikit-learn style front end.

>>> inf = SchemaInferrer().fit([{"a": 1}, {"a": "x"}])
>>> inf.schema_.body["properties"]["a"]
{'oneOf': [{'type': 'integer'}, {'type': 'string'}]}
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Any, Iterable

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .emit import EmitMeta, JsonSchemaDoc, to_json_schema
from .errors import ConfigError, RecordError
from .infer import LocalSis, compute_local_sis
from .merge import merge_nodes, merge_sis
from .runner import RunConfig, _mp_context, infer_sis
from .sis import SisNode, canonicalize
from .validate import conforms


def check_records(X: Any) -> list[dict]:
    """Materialize ``X`` as a list of JSON object records.

    Accepts any iterable of dicts; a single dict is rejected because it is
    almost always a mistake (iterating it would yield keys).
    """
    if isinstance(X, dict):
        raise RecordError("expected a collection of records, got a single object", "not-collection")
    if isinstance(X, (str, bytes)):
        raise RecordError("expected a collection of records, got a string", "not-collection")
    try:
        records = list(X)
    except TypeError:
        raise RecordError(f"expected an iterable of records, got {type(X).__name__}", "not-collection") from None
    for i, r in enumerate(records):
        if type(r) is not dict:
            raise RecordError(f"record must be a JSON object, got {type(r).__name__}", "not-object", ordinal=i)
    return records


def check_n_jobs(n_jobs: Any) -> int:
    if n_jobs is None:
        return 1
    if not isinstance(n_jobs, (int, np.integer)) or n_jobs < 1:
        raise ConfigError(f"n_jobs must be a positive integer, got {n_jobs!r}")
    return int(n_jobs)


def _local(args) -> LocalSis:
    chunk, pid = args
    return compute_local_sis(chunk, pid)


class SchemaInferrer(BaseEstimator):
    """Infer a JSON Schema from records.

    Parameters
    ----------
    n_jobs : int
        Worker processes for the local phase. Records are split into
        ``n_jobs`` contiguous chunks.
    schema_id, title : str or None
        Envelope values for the emitted document.

    Attributes
    ----------
    sis_ : SisNode
        Canonical merged schema tree.
    schema_ : JsonSchemaDoc
    n_records_ : int
    stats_ : RunStats or None
        Set by :meth:`fit_files`.
    """

    def __init__(self, n_jobs=1, schema_id=None, title=None):
        self.n_jobs = n_jobs
        self.schema_id = schema_id
        self.title = title

    def _meta(self) -> EmitMeta:
        return EmitMeta(id=self.schema_id, title=self.title)

    def _set_root(self, root: SisNode, n_records: int):
        self.sis_ = canonicalize(root)
        self.n_records_ = n_records
        self.schema_ = to_json_schema(self.sis_, self._meta())
        return self

    def fit(self, X: Iterable[dict], y=None):
        records = check_records(X)
        n_jobs = check_n_jobs(self.n_jobs)
        self.stats_ = None
        if n_jobs == 1 or len(records) < 2:
            local = compute_local_sis(records)
            return self._set_root(local.root, local.record_count)
        step = -(-len(records) // n_jobs)
        chunks = [(records[i : i + step], k) for k, i in enumerate(range(0, len(records), step))]
        with ProcessPoolExecutor(max_workers=n_jobs, mp_context=_mp_context()) as pool:
            locals_ = list(pool.map(_local, chunks))
        return self._set_root(merge_sis(locals_), sum(l.record_count for l in locals_))

    def partial_fit(self, X: Iterable[dict], y=None):
        records = check_records(X)
        local = compute_local_sis(records)
        if not hasattr(self, "sis_"):
            self.stats_ = None
            return self._set_root(local.root, local.record_count)
        return self._set_root(merge_nodes(self.sis_, local.root), self.n_records_ + local.record_count)

    def fit_files(self, paths, input_format="ndjson", lenient=False, split_seed=None):
        """Fit from NDJSON or JSON-array files through the partitioned pipeline."""
        cfg = RunConfig(
            paths,
            parallelism=check_n_jobs(self.n_jobs),
            input_format=input_format,
            meta=self._meta(),
            lenient=lenient,
            split_seed=split_seed,
        )
        root, stats = infer_sis(cfg)
        self._set_root(root, stats.records)
        self.stats_ = stats
        return self

    def transform(self, X=None) -> JsonSchemaDoc:
        """The emitted schema document (``X`` is ignored)."""
        check_is_fitted(self, "sis_")
        return self.schema_

    def fit_transform(self, X, y=None) -> JsonSchemaDoc:
        return self.fit(X).transform()

    def predict(self, X: Iterable[dict]) -> np.ndarray:
        """Boolean array: does each record conform to the fitted schema."""
        check_is_fitted(self, "sis_")
        records = check_records(X)
        return np.fromiter((conforms(r, self.sis_) for r in records), dtype=bool, count=len(records))

    def score(self, X: Iterable[dict], y=None) -> float:
        """Fraction of records that conform."""
        pred = self.predict(X)
        return float(pred.mean()) if pred.size else 1.0
