"""Check JSON values against a SIS node.

Matching is strict on numbers: a float never matches ``integer`` and an int
never matches ``number``. Object fields are all optional.
"""

from __future__ import annotations

from typing import Any, Iterator

from .sis import SisNode, TypeTag

_SCALAR_TAG = {
    type(None): TypeTag.NULL,
    bool: TypeTag.BOOLEAN,
    int: TypeTag.INTEGER,
    float: TypeTag.NUMBER,
    str: TypeTag.STRING,
}


def conforms(v: Any, s: SisNode) -> bool:
    tag = s.tag
    if tag is TypeTag.UNION:
        return any(conforms(v, alt) for alt in s.alternatives)
    t = type(v)
    scalar = _SCALAR_TAG.get(t)
    if scalar is not None:
        return scalar is tag
    if t is dict:
        if tag is not TypeTag.OBJECT:
            return False
        fields = s.fields
        for k, x in v.items():
            child = fields.get(k)
            if child is None or not conforms(x, child):
                return False
        return True
    if t is list:
        if tag is not TypeTag.ARRAY and tag is not TypeTag.MULTISET:
            return False
        if s.item is None:
            return not v
        return all(conforms(x, s.item) for x in v)
    return False


def violations(v: Any, s: SisNode, path: str = "$") -> Iterator[str]:
    """Describe why ``v`` does not conform to ``s``; yields nothing when it does."""
    if conforms(v, s):
        return
    tag = s.tag
    t = type(v)
    if tag is TypeTag.OBJECT and t is dict:
        for k, x in v.items():
            child = s.fields.get(k)
            if child is None:
                yield f"{path}.{k}: unexpected field"
            else:
                yield from violations(x, child, f"{path}.{k}")
        return
    if tag in (TypeTag.ARRAY, TypeTag.MULTISET) and t is list:
        if s.item is None:
            yield f"{path}: expected an empty array"
            return
        for i, x in enumerate(v):
            yield from violations(x, s.item, f"{path}[{i}]")
        return
    if tag is TypeTag.UNION:
        kinds = ", ".join(alt.tag.value for alt in s.alternatives)
        yield f"{path}: {describe(v)} matches none of [{kinds}]"
        return
    yield f"{path}: expected {tag.value}, got {describe(v)}"


def describe(v: Any) -> str:
    tag = _SCALAR_TAG.get(type(v))
    if tag is not None:
        return tag.value
    if isinstance(v, dict):
        return "object"
    if isinstance(v, list):
        return "array"
    return type(v).__name__
