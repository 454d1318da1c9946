"""Two-phase JSON schema inference: per-partition local schemas merged into one JSON Schema."""

from .closed import DeclaredSchema, declared_to_sis, load_declared_schema
from .emit import EmitMeta, JsonSchemaDoc, from_json_schema, to_json_schema
from .errors import ConfigError, DecodeError, InvariantError, MetadataError, RecordError, SchemaError
from .infer import LocalSis, compute_local_sis, fold_record, node_from_value
from .merge import make_union, merge_nodes, merge_sis
from .runner import RunConfig, RunStats, partition_input, run_closed, run_open_inference
from .sis import (
    SisNode,
    TypeTag,
    canonicalize,
    check_invariants,
    deserialize_sis,
    kind_key,
    serialize_sis,
    sis_equal,
)
from .validate import conforms

__version__ = "0.1.0"


def __getattr__(name):
    # scikit-learn is slow to import; load the estimator only on demand
    if name == "SchemaInferrer":
        from .estimator import SchemaInferrer

        return SchemaInferrer
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
