"""Pairwise merging of SIS nodes and the global merge of partition-local results.

``merge_nodes`` is a join: commutative, associative and idempotent up to
canonical form. Unions are kept flat and keyed by kind, so two objects that
meet inside a union are deep-merged rather than listed side by side.
"""

from __future__ import annotations

from typing import Iterable

from .sis import PRIMITIVE_TAGS, SisNode, TypeTag, canonicalize, empty_object


def _alternatives(node: SisNode) -> tuple[SisNode, ...]:
    return node.alternatives if node.tag is TypeTag.UNION else (node,)


def make_union(a: SisNode, b: SisNode) -> SisNode:
    """Union of the kind-keyed alternative sets of ``a`` and ``b``.

    Alternatives sharing a kind are merged with :func:`merge_nodes`. A result
    with a single alternative is returned as that alternative.
    """
    by_kind: dict[TypeTag, SisNode] = {}
    for alt in _alternatives(a) + _alternatives(b):
        seen = by_kind.get(alt.tag)
        by_kind[alt.tag] = alt if seen is None else merge_nodes(seen, alt)
    if len(by_kind) == 1:
        return next(iter(by_kind.values()))
    return SisNode(TypeTag.UNION, alternatives=tuple(by_kind.values()))


def merge_nodes(a: SisNode, b: SisNode) -> SisNode:
    if a is b:
        return a
    tag = a.tag
    if tag is not b.tag or tag is TypeTag.UNION:
        return make_union(a, b)
    if tag in PRIMITIVE_TAGS:
        return a
    if tag is TypeTag.OBJECT:
        fields = dict(a.fields)
        for name, child in b.fields.items():
            mine = fields.get(name)
            fields[name] = child if mine is None else merge_nodes(mine, child)
        return SisNode(tag, fields=fields)
    # array / multiset; an absent item is the identity
    if a.item is None:
        return b
    if b.item is None:
        return a
    return SisNode(tag, item=merge_nodes(a.item, b.item))


def merge_all(nodes: Iterable[SisNode]) -> SisNode | None:
    acc = None
    for node in nodes:
        acc = node if acc is None else merge_nodes(acc, node)
    return acc


def merge_sis(locals_) -> SisNode:
    """Fold the roots of partition-local results into one canonical global root.

    Accepts ``LocalSis`` values (anything with a ``root``) or bare nodes.
    """
    acc = empty_object()
    for local in locals_:
        root = getattr(local, "root", local)
        acc = merge_nodes(acc, root)
    return canonicalize(acc)
