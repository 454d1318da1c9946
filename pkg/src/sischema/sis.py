"""The schema intermediate structure (SIS): a tree describing record shapes.

A node is one of

* a primitive (``null``, ``boolean``, ``integer``, ``number``, ``string``),
* an object with an ordered name -> node map,
* an array or multiset with an optional item node (``None`` when no element
  was ever observed),
* a flat union of two or more alternatives with pairwise-distinct kinds.

Nodes are immutable once built. Canonical ordering (sorted field names,
alternatives in kind order) is only imposed by :func:`canonicalize`; the
merge code does not bother keeping it.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Mapping

from .errors import DecodeError, InvariantError


class TypeTag(enum.Enum):
    NULL = "null"
    BOOLEAN = "boolean"
    INTEGER = "integer"
    NUMBER = "number"
    STRING = "string"
    OBJECT = "object"
    ARRAY = "array"
    MULTISET = "multiset"
    UNION = "union"


PRIMITIVE_TAGS = frozenset(
    {TypeTag.NULL, TypeTag.BOOLEAN, TypeTag.INTEGER, TypeTag.NUMBER, TypeTag.STRING}
)
COLLECTION_TAGS = frozenset({TypeTag.ARRAY, TypeTag.MULTISET})

# Total order on kind keys; Union has no rank.
KIND_ORDER = {
    tag: rank
    for rank, tag in enumerate(
        [
            TypeTag.NULL,
            TypeTag.BOOLEAN,
            TypeTag.INTEGER,
            TypeTag.NUMBER,
            TypeTag.STRING,
            TypeTag.OBJECT,
            TypeTag.ARRAY,
            TypeTag.MULTISET,
        ]
    )
}


@dataclass(frozen=True, slots=True)
class SisNode:
    tag: TypeTag
    fields: Mapping[str, SisNode] | None = None
    item: SisNode | None = None
    alternatives: tuple[SisNode, ...] | None = None

    __hash__ = None  # type: ignore[assignment]

    @property
    def is_union(self) -> bool:
        return self.tag is TypeTag.UNION

    def __repr__(self) -> str:
        return f"SisNode<{to_text(self)}>"


_PRIMITIVES = {tag: SisNode(tag) for tag in PRIMITIVE_TAGS}

NULL = _PRIMITIVES[TypeTag.NULL]
BOOLEAN = _PRIMITIVES[TypeTag.BOOLEAN]
INTEGER = _PRIMITIVES[TypeTag.INTEGER]
NUMBER = _PRIMITIVES[TypeTag.NUMBER]
STRING = _PRIMITIVES[TypeTag.STRING]


def primitive(tag: TypeTag) -> SisNode:
    try:
        return _PRIMITIVES[tag]
    except KeyError:
        raise InvariantError(f"{tag.value} is not a primitive tag") from None


def obj(fields: Mapping[str, SisNode] | None = None) -> SisNode:
    return SisNode(TypeTag.OBJECT, fields=dict(fields or {}))


def array(item: SisNode | None = None) -> SisNode:
    return SisNode(TypeTag.ARRAY, item=item)


def multiset(item: SisNode | None = None) -> SisNode:
    return SisNode(TypeTag.MULTISET, item=item)


def union(*alternatives: SisNode) -> SisNode:
    """Build a union directly. Alternatives must already be flat and kind-distinct."""
    node = SisNode(TypeTag.UNION, alternatives=tuple(alternatives))
    check_invariants(node)
    return node


def empty_object() -> SisNode:
    return SisNode(TypeTag.OBJECT, fields={})


def kind_key(node: SisNode) -> TypeTag:
    """Return the kind of a non-union node (its tag)."""
    if node.tag is TypeTag.UNION:
        raise InvariantError("a union node has no single kind")
    return node.tag


def check_invariants(node: SisNode) -> None:
    """Walk ``node`` and raise :class:`InvariantError` on the first violation."""
    tag = node.tag
    if not isinstance(tag, TypeTag):
        raise InvariantError(f"unknown tag {tag!r}")
    has_fields = node.fields is not None
    has_alts = node.alternatives is not None
    if has_fields != (tag is TypeTag.OBJECT):
        raise InvariantError(f"{tag.value} node: fields present iff object")
    if has_alts != (tag is TypeTag.UNION):
        raise InvariantError(f"{tag.value} node: alternatives present iff union")
    if node.item is not None and tag not in COLLECTION_TAGS:
        raise InvariantError(f"{tag.value} node cannot carry an item")

    if tag is TypeTag.OBJECT:
        for name, child in node.fields.items():
            if not isinstance(name, str):
                raise InvariantError(f"field name {name!r} is not a string")
            check_invariants(child)
    elif tag in COLLECTION_TAGS:
        if node.item is not None:
            check_invariants(node.item)
    elif tag is TypeTag.UNION:
        alts = node.alternatives
        if len(alts) < 2:
            raise InvariantError("union needs at least two alternatives")
        seen = set()
        for alt in alts:
            if alt.tag is TypeTag.UNION:
                raise InvariantError("nested union")
            if alt.tag in seen:
                raise InvariantError(f"union has two {alt.tag.value} alternatives")
            seen.add(alt.tag)
            check_invariants(alt)


def canonicalize(node: SisNode) -> SisNode:
    """Return an equal tree with sorted field names and kind-ordered alternatives."""
    tag = node.tag
    if tag in PRIMITIVE_TAGS:
        return node
    if tag is TypeTag.OBJECT:
        return SisNode(
            tag, fields={name: canonicalize(node.fields[name]) for name in sorted(node.fields)}
        )
    if tag in COLLECTION_TAGS:
        return SisNode(tag, item=None if node.item is None else canonicalize(node.item))
    alts = sorted(node.alternatives, key=lambda a: KIND_ORDER[a.tag])
    return SisNode(tag, alternatives=tuple(canonicalize(a) for a in alts))


def sis_equal(a: SisNode, b: SisNode) -> bool:
    return canonicalize(a) == canonicalize(b)


def count_nodes(node: SisNode) -> int:
    n = 1
    if node.fields:
        n += sum(count_nodes(c) for c in node.fields.values())
    if node.item is not None:
        n += count_nodes(node.item)
    if node.alternatives:
        n += sum(count_nodes(a) for a in node.alternatives)
    return n


# -- interchange format -------------------------------------------------------


def to_plain(node: SisNode) -> dict:
    """Canonical plain-dict form of the interchange encoding."""
    node = canonicalize(node)
    return _to_plain(node)


def _to_plain(node: SisNode) -> dict:
    out: dict = {"tag": node.tag.value}
    if node.fields is not None:
        out["fields"] = {name: _to_plain(child) for name, child in node.fields.items()}
    if node.item is not None:
        out["item"] = _to_plain(node.item)
    if node.alternatives is not None:
        out["alternatives"] = [_to_plain(a) for a in node.alternatives]
    return out


def serialize_sis(node: SisNode) -> bytes:
    """Encode ``node`` as compact canonical JSON (UTF-8, no trailing whitespace)."""
    return json.dumps(to_plain(node), ensure_ascii=False, separators=(",", ":")).encode(
        "utf-8"
    )


def to_text(node: SisNode) -> str:
    return serialize_sis(node).decode("utf-8")


_TAGS_BY_NAME = {tag.value: tag for tag in TypeTag}


def _no_duplicate_pairs(pairs):
    out = {}
    for key, value in pairs:
        if key in out:
            raise DecodeError(f"duplicate key {key!r}", "duplicate-field")
        out[key] = value
    return out


def deserialize_sis(data: bytes | str) -> SisNode:
    """Decode bytes produced by :func:`serialize_sis`; validates all invariants."""
    if isinstance(data, (bytes, bytearray)):
        try:
            data = bytes(data).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DecodeError(f"not UTF-8: {exc}", "malformed") from None
    try:
        plain = json.loads(data, object_pairs_hook=_no_duplicate_pairs)
    except json.JSONDecodeError as exc:
        raise DecodeError(f"not JSON: {exc}", "malformed") from None
    return from_plain(plain)


def from_plain(plain) -> SisNode:
    if not isinstance(plain, dict):
        raise DecodeError("node must be a JSON object", "bad-shape")
    tag_name = plain.get("tag")
    tag = _TAGS_BY_NAME.get(tag_name) if isinstance(tag_name, str) else None
    if tag is None:
        raise DecodeError(f"unknown tag {tag_name!r}", "unknown-tag")
    allowed = {"tag"}
    if tag is TypeTag.OBJECT:
        allowed.add("fields")
    elif tag in COLLECTION_TAGS:
        allowed.add("item")
    elif tag is TypeTag.UNION:
        allowed.add("alternatives")
    extra = set(plain) - allowed
    if extra:
        raise DecodeError(f"{tag.value} node has unexpected keys {sorted(extra)}", "bad-shape")

    if tag in PRIMITIVE_TAGS:
        return _PRIMITIVES[tag]
    if tag is TypeTag.OBJECT:
        fields = plain.get("fields")
        if not isinstance(fields, dict):
            raise DecodeError("object node needs a 'fields' object", "bad-shape")
        return SisNode(tag, fields={k: from_plain(v) for k, v in fields.items()})
    if tag in COLLECTION_TAGS:
        item = plain.get("item")
        return SisNode(tag, item=None if item is None else from_plain(item))

    alts = plain.get("alternatives")
    if not isinstance(alts, list):
        raise DecodeError("union node needs an 'alternatives' list", "bad-shape")
    nodes = tuple(from_plain(a) for a in alts)
    if len(nodes) < 2:
        raise DecodeError("union with fewer than two alternatives", "singleton-union")
    kinds = set()
    for alt in nodes:
        if alt.tag is TypeTag.UNION:
            raise DecodeError("union nested inside a union", "nested-union")
        if alt.tag in kinds:
            raise DecodeError(f"union repeats kind {alt.tag.value}", "duplicate-kind")
        kinds.add(alt.tag)
    return SisNode(tag, alternatives=nodes)
