"""SIS -> JSON Schema (draft 2020-12 keyword subset), and back.

Mapping, applied depth-first:

* primitive -> ``{"type": <name>}``
* object -> ``{"type": "object", "properties": {...}}``
* array -> ``{"type": "array", "items": {...}}`` (``items`` omitted if never observed)
* multiset -> the array form plus ``"x-collection": "multiset"``
* union -> ``{"oneOf": [...]}``

JSON Schema treats every integer as a number, so an ``integer`` and a
``number`` alternative inside ``oneOf`` would both match an integral value
and fail the exactly-one rule. Such a pair is emitted as the single member
``{"type": ["integer", "number"]}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import DecodeError
from .merge import make_union
from .sis import (
    COLLECTION_TAGS,
    PRIMITIVE_TAGS,
    SisNode,
    TypeTag,
    canonicalize,
    primitive,
)

DRAFT_2020_12 = "https://json-schema.org/draft/2020-12/schema"
MULTISET_ANNOTATION = "x-collection"

_KEYWORDS = {"$schema", "$id", "title", "type", "properties", "items", "oneOf", MULTISET_ANNOTATION}


@dataclass(frozen=True)
class EmitMeta:
    schema_uri: str = DRAFT_2020_12
    id: str | None = None
    title: str | None = None


@dataclass
class JsonSchemaDoc:
    body: dict
    meta: EmitMeta = field(default_factory=EmitMeta)

    def dumps(self) -> str:
        """2-space indented UTF-8 JSON with a trailing newline."""
        return dumps_schema(self.body)

    def to_bytes(self) -> bytes:
        return self.dumps().encode("utf-8")


def dumps_schema(body: dict) -> str:
    return json.dumps(body, indent=2, ensure_ascii=False) + "\n"


def node_schema(node: SisNode) -> dict:
    tag = node.tag
    if tag in PRIMITIVE_TAGS:
        return {"type": tag.value}
    if tag is TypeTag.OBJECT:
        return {
            "type": "object",
            "properties": {name: node_schema(node.fields[name]) for name in sorted(node.fields)},
        }
    if tag in COLLECTION_TAGS:
        out: dict = {"type": "array"}
        if node.item is not None:
            out["items"] = node_schema(node.item)
        if tag is TypeTag.MULTISET:
            out[MULTISET_ANNOTATION] = "multiset"
        return out

    kinds = {alt.tag for alt in node.alternatives}
    numeric_pair = TypeTag.INTEGER in kinds and TypeTag.NUMBER in kinds
    members = []
    for alt in canonicalize(node).alternatives:
        if numeric_pair and alt.tag is TypeTag.INTEGER:
            members.append({"type": ["integer", "number"]})
        elif numeric_pair and alt.tag is TypeTag.NUMBER:
            continue
        else:
            members.append(node_schema(alt))
    if len(members) == 1:
        return members[0]
    return {"oneOf": members}


def to_json_schema(root: SisNode, meta: EmitMeta | None = None) -> JsonSchemaDoc:
    meta = meta or EmitMeta()
    body: dict = {"$schema": meta.schema_uri}
    if meta.id is not None:
        body["$id"] = meta.id
    if meta.title is not None:
        body["title"] = meta.title
    body.update(node_schema(root))
    return JsonSchemaDoc(body, meta)


# -- reading the emitted subset back ------------------------------------------

_PRIMITIVES_BY_NAME = {tag.value: tag for tag in PRIMITIVE_TAGS}


def from_json_schema(schema: dict) -> SisNode:
    """Parse a schema in the emitted keyword subset into a SIS node.

    Anything outside the subset raises :class:`DecodeError`.
    """
    if not isinstance(schema, dict):
        raise DecodeError("schema must be a JSON object", "bad-shape")
    unknown = set(schema) - _KEYWORDS
    if unknown:
        raise DecodeError(f"unsupported keywords {sorted(unknown)}", "bad-shape")
    if "oneOf" in schema:
        members = schema["oneOf"]
        if "type" in schema or not isinstance(members, list) or len(members) < 2:
            raise DecodeError("oneOf must list at least two member schemas", "bad-shape")
        node = from_json_schema(members[0])
        for member in members[1:]:
            other = from_json_schema(member)
            if {a.tag for a in _alts(node)} & {a.tag for a in _alts(other)}:
                raise DecodeError("oneOf members overlap in kind", "duplicate-kind")
            node = make_union(node, other)
        return node

    typ = schema.get("type")
    if isinstance(typ, list):
        if sorted(typ) != ["integer", "number"]:
            raise DecodeError(f"unsupported type list {typ!r}", "bad-shape")
        return make_union(primitive(TypeTag.INTEGER), primitive(TypeTag.NUMBER))
    if typ in _PRIMITIVES_BY_NAME:
        return primitive(_PRIMITIVES_BY_NAME[typ])
    if typ == "object":
        props = schema.get("properties", {})
        if not isinstance(props, dict):
            raise DecodeError("properties must be an object", "bad-shape")
        return SisNode(TypeTag.OBJECT, fields={k: from_json_schema(v) for k, v in props.items()})
    if typ == "array":
        tag = TypeTag.MULTISET if schema.get(MULTISET_ANNOTATION) == "multiset" else TypeTag.ARRAY
        items = schema.get("items")
        return SisNode(tag, item=None if items is None else from_json_schema(items))
    raise DecodeError(f"unknown type {typ!r}", "unknown-tag")


def _alts(node: SisNode):
    return node.alternatives if node.tag is TypeTag.UNION else (node,)
