"""Declared-schema path: build a SIS from dataset metadata without reading records.

Metadata file format::

    {"dataset": "athlete",
     "openness": "open" | "closed",
     "type": <type>}

    <type> := {"kind": "null" | "boolean" | "integer" | "number" | "string"}
            | {"kind": "object", "fields": [{"name": str, "optional": bool, "type": <type>}, ...]}
            | {"kind": "array" | "multiset", "of": <type>}

``optional`` is accepted and ignored; emitted schemas carry no ``required``.
"""

from __future__ import annotations

import enum
import json
import os
from dataclasses import dataclass
from typing import Union

from .errors import MetadataError
from .sis import PRIMITIVE_TAGS, SisNode, TypeTag, primitive


class Openness(enum.Enum):
    OPEN = "open"
    CLOSED = "closed"


@dataclass(frozen=True)
class DeclaredPrimitive:
    tag: TypeTag


@dataclass(frozen=True)
class DeclaredField:
    name: str
    type: "DeclaredType"
    optional: bool = False


@dataclass(frozen=True)
class DeclaredObject:
    fields: tuple[DeclaredField, ...] = ()


@dataclass(frozen=True)
class DeclaredCollection:
    tag: TypeTag  # ARRAY or MULTISET
    of: "DeclaredType"


DeclaredType = Union[DeclaredPrimitive, DeclaredObject, DeclaredCollection]


@dataclass(frozen=True)
class DeclaredSchema:
    dataset_name: str
    openness: Openness
    root: DeclaredType


_PRIMITIVE_KINDS = {tag.value: tag for tag in PRIMITIVE_TAGS}


def _parse_type(raw, where: str) -> DeclaredType:
    if not isinstance(raw, dict):
        raise MetadataError(f"{where}: type must be an object", "bad-shape")
    kind = raw.get("kind")
    if not isinstance(kind, str):
        raise MetadataError(f"{where}: type needs a string 'kind'", "bad-shape")
    if kind in _PRIMITIVE_KINDS:
        return DeclaredPrimitive(_PRIMITIVE_KINDS[kind])
    if kind == "object":
        raw_fields = raw.get("fields", [])
        if not isinstance(raw_fields, list):
            raise MetadataError(f"{where}: 'fields' must be a list", "bad-shape")
        seen = set()
        fields = []
        for i, f in enumerate(raw_fields):
            if not isinstance(f, dict) or not isinstance(f.get("name"), str) or "type" not in f:
                raise MetadataError(f"{where}.fields[{i}]: needs 'name' and 'type'", "bad-shape")
            name = f["name"]
            if name in seen:
                raise MetadataError(f"{where}: duplicate field {name!r}", "duplicate-field")
            seen.add(name)
            optional = f.get("optional", False)
            if not isinstance(optional, bool):
                raise MetadataError(f"{where}.{name}: 'optional' must be a boolean", "bad-shape")
            fields.append(DeclaredField(name, _parse_type(f["type"], f"{where}.{name}"), optional))
        return DeclaredObject(tuple(fields))
    if kind in ("array", "multiset"):
        if "of" not in raw:
            raise MetadataError(f"{where}: {kind} needs an 'of' element type", "bad-shape")
        tag = TypeTag.ARRAY if kind == "array" else TypeTag.MULTISET
        return DeclaredCollection(tag, _parse_type(raw["of"], f"{where}[]"))
    raise MetadataError(f"{where}: unknown type name {kind!r}", "unknown-type")


def parse_declared_schema(text: str) -> DeclaredSchema:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MetadataError(
            f"metadata is not valid JSON: {exc.msg}", "parse", line=exc.lineno, column=exc.colno
        ) from None
    if not isinstance(doc, dict):
        raise MetadataError("metadata must be a JSON object", "bad-shape")
    name = doc.get("dataset")
    if not isinstance(name, str) or not name:
        raise MetadataError("'dataset' must be a non-empty string", "bad-shape")
    try:
        openness = Openness(doc.get("openness"))
    except ValueError:
        raise MetadataError("'openness' must be 'open' or 'closed'", "bad-shape") from None
    if "type" not in doc:
        raise MetadataError("metadata needs a 'type'", "bad-shape")
    return DeclaredSchema(name, openness, _parse_type(doc["type"], name))


def load_declared_schema(path: str | os.PathLike) -> DeclaredSchema:
    with open(path, encoding="utf-8") as fh:
        return parse_declared_schema(fh.read())


def declared_to_sis(d: DeclaredSchema | DeclaredType) -> SisNode:
    t = d.root if isinstance(d, DeclaredSchema) else d
    if isinstance(t, DeclaredPrimitive):
        return primitive(t.tag)
    if isinstance(t, DeclaredObject):
        return SisNode(TypeTag.OBJECT, fields={f.name: declared_to_sis(f.type) for f in t.fields})
    return SisNode(t.tag, item=declared_to_sis(t.of))


def declared_type_to_plain(t: DeclaredType) -> dict:
    if isinstance(t, DeclaredPrimitive):
        return {"kind": t.tag.value}
    if isinstance(t, DeclaredObject):
        return {
            "kind": "object",
            "fields": [
                {"name": f.name, "optional": f.optional, "type": declared_type_to_plain(f.type)}
                for f in t.fields
            ],
        }
    return {"kind": t.tag.value, "of": declared_type_to_plain(t.of)}


def dump_declared_schema(d: DeclaredSchema) -> str:
    plain = {"dataset": d.dataset_name, "openness": d.openness.value, "type": declared_type_to_plain(d.root)}
    return json.dumps(plain, indent=2) + "\n"
