"""Local phase: describe JSON values as SIS nodes and fold records into a partition schema."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Iterable

from .errors import RecordError
from .merge import make_union, merge_nodes
from .sis import BOOLEAN, INTEGER, NULL, NUMBER, STRING, SisNode, TypeTag, empty_object

# bool is its own type, so type() dispatch keeps it apart from int.
_SCALAR_NODES = {
    type(None): NULL,
    bool: BOOLEAN,
    int: INTEGER,
    float: NUMBER,
    str: STRING,
}
_VALUE_KIND = {
    type(None): TypeTag.NULL,
    bool: TypeTag.BOOLEAN,
    int: TypeTag.INTEGER,
    float: TypeTag.NUMBER,
    str: TypeTag.STRING,
    dict: TypeTag.OBJECT,
    list: TypeTag.ARRAY,
}


@dataclass(frozen=True)
class LocalSis:
    root: SisNode
    record_count: int = 0
    partition_id: int = 0
    skipped: int = 0
    duplicate_keys: int = 0


def empty_local(partition_id: int = 0) -> LocalSis:
    return LocalSis(empty_object(), 0, partition_id)


def node_from_value(v: Any) -> SisNode:
    """SIS node describing one JSON value; array elements share one merged item node."""
    t = type(v)
    scalar = _SCALAR_NODES.get(t)
    if scalar is not None:
        return scalar
    if t is dict:
        return SisNode(TypeTag.OBJECT, fields={k: node_from_value(x) for k, x in v.items()})
    if t is list:
        item = None
        for x in v:
            node = node_from_value(x)
            item = node if item is None else merge_nodes(item, node)
        return SisNode(TypeTag.ARRAY, item=item)
    raise TypeError(f"not a JSON value: {t.__name__}")


def absorb(node: SisNode, v: Any) -> SisNode:
    """Equivalent to ``merge_nodes(node, node_from_value(v))``, without building the value's tree.

    Returns ``node`` itself when ``v`` adds nothing, which is the common case
    once a partition's schema has settled.
    """
    t = type(v)
    kind = _VALUE_KIND.get(t)
    if kind is None:
        raise TypeError(f"not a JSON value: {t.__name__}")
    tag = node.tag
    if tag is kind:
        if t is dict:
            fields = node.fields
            changed = None
            for k, x in v.items():
                child = fields.get(k)
                if child is None:
                    new = node_from_value(x)
                elif _SCALAR_NODES.get(type(x)) is child:
                    continue
                else:
                    new = absorb(child, x)
                if new is not child:
                    if changed is None:
                        changed = dict(fields)
                    changed[k] = new
            return node if changed is None else SisNode(TypeTag.OBJECT, fields=changed)
        if t is list:
            item = old = node.item
            for x in v:
                if item is None:
                    item = node_from_value(x)
                elif _SCALAR_NODES.get(type(x)) is not item:
                    item = absorb(item, x)
            return node if item is old else SisNode(TypeTag.ARRAY, item=item)
        return node
    if tag is TypeTag.UNION:
        alts = node.alternatives
        for i, alt in enumerate(alts):
            if alt.tag is kind:
                new = absorb(alt, v)
                if new is alt:
                    return node
                return SisNode(TypeTag.UNION, alternatives=alts[:i] + (new,) + alts[i + 1 :])
        return SisNode(TypeTag.UNION, alternatives=alts + (node_from_value(v),))
    return make_union(node, node_from_value(v))


def fold_record(acc: LocalSis, record: Any) -> LocalSis:
    if type(record) is not dict:
        raise RecordError(
            f"record must be a JSON object, got {_json_kind(record)}",
            "not-object",
            ordinal=acc.record_count,
            partition_id=acc.partition_id,
        )
    return replace(acc, root=absorb(acc.root, record), record_count=acc.record_count + 1)


def compute_local_sis(records: Iterable[Any], partition_id: int = 0) -> LocalSis:
    """Single-pass fold of a record stream into a partition-local schema.

    Errors raised while iterating ``records`` (e.g. parse errors from a reader)
    get the partition id and record ordinal attached if they lack them.
    """
    root = empty_object()
    count = 0
    it = iter(records)
    while True:
        try:
            record = next(it)
        except StopIteration:
            break
        except RecordError as exc:
            if exc.ordinal is None:
                exc.ordinal = count
            if exc.partition_id is None:
                exc.partition_id = partition_id
            raise
        if type(record) is not dict:
            raise RecordError(
                f"record must be a JSON object, got {_json_kind(record)}",
                "not-object",
                ordinal=count,
                partition_id=partition_id,
            )
        root = absorb(root, record)
        count += 1
    return LocalSis(root, count, partition_id)


def _json_kind(v: Any) -> str:
    kind = _VALUE_KIND.get(type(v))
    return kind.value if kind is not None else type(v).__name__
