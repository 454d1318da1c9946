"""Random SIS trees / JSON values and independent reference implementations.

The references work on a "kind map" normal form that never builds union
nodes: a schema is a dict kind -> payload, where an object payload is a dict
name -> kind map, a collection payload is a kind map (or None), and a
primitive payload is None. Merging two kind maps is plain recursive dict
union, so it shares no code with the package's merge.
"""

from __future__ import annotations

import json
import random
import string
from pathlib import Path

from hypothesis import strategies as st

from sischema.sis import PRIMITIVE_TAGS, SisNode, TypeTag

DATA = Path(__file__).parent / "data"

PRIMS = sorted(PRIMITIVE_TAGS, key=lambda t: t.value)
NAMES = ["a", "b", "c", "id", "x", "y", "zz", "Peeve"]


# -- kind-map reference -----------------------------------------------------------


def to_kindmap(node: SisNode | None):
    if node is None:
        return None
    if node.tag is TypeTag.UNION:
        out = {}
        for alt in node.alternatives:
            out.update(to_kindmap(alt))
        return out
    if node.tag is TypeTag.OBJECT:
        return {"object": {k: to_kindmap(v) for k, v in node.fields.items()}}
    if node.tag in (TypeTag.ARRAY, TypeTag.MULTISET):
        return {node.tag.value: to_kindmap(node.item)}
    return {node.tag.value: None}


def kindmap_merge(a, b):
    if a is None:
        return b
    if b is None:
        return a
    out = dict(a)
    for kind, payload in b.items():
        if kind not in out:
            out[kind] = payload
        elif kind == "object":
            fields = dict(out[kind])
            for name, sub in payload.items():
                fields[name] = kindmap_merge(fields.get(name), sub) if name in fields else sub
            out[kind] = fields
        elif kind in ("array", "multiset"):
            out[kind] = kindmap_merge(out[kind], payload)
    return out


def kindmap_of_value(v):
    if v is None:
        return {"null": None}
    if isinstance(v, bool):
        return {"boolean": None}
    if isinstance(v, int):
        return {"integer": None}
    if isinstance(v, float):
        return {"number": None}
    if isinstance(v, str):
        return {"string": None}
    if isinstance(v, dict):
        return {"object": {k: kindmap_of_value(x) for k, x in v.items()}}
    item = None
    for x in v:
        item = kindmap_merge(item, kindmap_of_value(x))
    return {"array": item}


def kindmap_of_records(records):
    acc = {"object": {}}
    for r in records:
        acc = kindmap_merge(acc, kindmap_of_value(r))
    return acc


def kinds_of(node: SisNode) -> set[TypeTag]:
    if node.tag is TypeTag.UNION:
        return {a.tag for a in node.alternatives}
    return {node.tag}


def assert_flat(node: SisNode) -> None:
    """No nested unions, no duplicate kinds, no singleton unions, anywhere."""
    if node.tag is TypeTag.UNION:
        tags = [a.tag for a in node.alternatives]
        assert len(tags) >= 2
        assert TypeTag.UNION not in tags
        assert len(set(tags)) == len(tags)
        for a in node.alternatives:
            assert_flat(a)
    elif node.tag is TypeTag.OBJECT:
        for c in node.fields.values():
            assert_flat(c)
    elif node.item is not None:
        assert_flat(node.item)


# -- random generation (plain random, for high-count loops) -------------------------


def random_sis(rng: random.Random, depth: int = 3, allow_union: bool = True) -> SisNode:
    roll = rng.random()
    if depth <= 0 or roll < 0.35:
        return SisNode(rng.choice(PRIMS))
    if roll < 0.6:
        n = rng.randint(0, 4)
        names = rng.sample(NAMES, n)
        return SisNode(TypeTag.OBJECT, fields={k: random_sis(rng, depth - 1) for k in names})
    if roll < 0.75:
        tag = TypeTag.ARRAY if rng.random() < 0.8 else TypeTag.MULTISET
        item = None if rng.random() < 0.15 else random_sis(rng, depth - 1)
        return SisNode(tag, item=item)
    if not allow_union:
        return SisNode(rng.choice(PRIMS))
    kinds = rng.sample(
        PRIMS + [TypeTag.OBJECT, TypeTag.ARRAY, TypeTag.MULTISET], rng.randint(2, 4)
    )
    alts = []
    for kind in kinds:
        if kind in PRIMITIVE_TAGS:
            alts.append(SisNode(kind))
        elif kind is TypeTag.OBJECT:
            names = rng.sample(NAMES, rng.randint(0, 3))
            alts.append(SisNode(kind, fields={k: random_sis(rng, depth - 1) for k in names}))
        else:
            alts.append(SisNode(kind, item=random_sis(rng, depth - 1)))
    rng.shuffle(alts)
    return SisNode(TypeTag.UNION, alternatives=tuple(alts))


def random_value(rng: random.Random, depth: int = 3):
    roll = rng.random()
    if depth <= 0 or roll < 0.5:
        return rng.choice(
            [
                None,
                rng.random() < 0.5,
                rng.randint(-50, 50),
                rng.randint(-500, 500) / 10 + 0.05,
                "".join(rng.choices(string.ascii_letters, k=rng.randint(0, 5))),
            ]
        )
    if roll < 0.8:
        return {k: random_value(rng, depth - 1) for k in rng.sample(NAMES, rng.randint(0, 4))}
    return [random_value(rng, depth - 1) for _ in range(rng.randint(0, 3))]


def random_record(rng: random.Random, depth: int = 3) -> dict:
    return {k: random_value(rng, depth - 1) for k in rng.sample(NAMES, rng.randint(0, 5))}


def write_ndjson(path, records) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r) + "\n")


# -- hypothesis strategies ----------------------------------------------------------


@st.composite
def sis_nodes(draw, depth: int = 3):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_sis(random.Random(seed), depth)


json_scalars = st.one_of(
    st.none(),
    st.booleans(),
    st.integers(-(2**40), 2**40),
    st.floats(allow_nan=False, allow_infinity=False),
    st.text(max_size=6),
)
json_values = st.recursive(
    json_scalars,
    lambda children: st.one_of(
        st.lists(children, max_size=4),
        st.dictionaries(st.sampled_from(NAMES), children, max_size=4),
    ),
    max_leaves=12,
)
json_records = st.dictionaries(st.sampled_from(NAMES), json_values, max_size=5)
