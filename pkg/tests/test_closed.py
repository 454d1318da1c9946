import json

import pytest

from helpers import DATA
from sischema.closed import (
    DeclaredCollection,
    DeclaredObject,
    DeclaredPrimitive,
    Openness,
    declared_to_sis,
    dump_declared_schema,
    load_declared_schema,
    parse_declared_schema,
)
from sischema.emit import from_json_schema, to_json_schema
from sischema.errors import MetadataError
from sischema.sis import INTEGER, STRING, TypeTag, array, check_invariants, multiset, obj, sis_equal


def meta(type_, openness="closed", name="ds"):
    return json.dumps({"dataset": name, "openness": openness, "type": type_})


def test_load_athlete():
    d = load_declared_schema(DATA / "athlete.meta.json")
    assert d.dataset_name == "athlete"
    assert d.openness is Openness.CLOSED
    assert isinstance(d.root, DeclaredObject)
    assert [f.name for f in d.root.fields] == ["id", "name"]


def test_athlete_to_sis():
    d = load_declared_schema(DATA / "athlete.meta.json")
    assert sis_equal(declared_to_sis(d), obj({"id": INTEGER, "name": STRING}))


def test_athlete_round_trips_through_emit():
    d = load_declared_schema(DATA / "athlete.meta.json")
    node = declared_to_sis(d)
    body = json.loads(to_json_schema(node).dumps())
    body.pop("$schema")
    assert sis_equal(from_json_schema(body), node)
    assert parse_declared_schema(dump_declared_schema(d)) == d


def test_duplicate_field():
    text = meta({"kind": "object", "fields": [
        {"name": "id", "type": {"kind": "integer"}},
        {"name": "id", "type": {"kind": "string"}},
    ]})
    with pytest.raises(MetadataError) as info:
        parse_declared_schema(text)
    assert info.value.code == "duplicate-field"


def test_empty_object_type():
    d = parse_declared_schema(meta({"kind": "object", "fields": []}))
    assert d.root == DeclaredObject(())
    assert declared_to_sis(d) == obj({})


def test_unknown_type_name():
    with pytest.raises(MetadataError) as info:
        parse_declared_schema(meta({"kind": "object", "fields": [{"name": "p", "type": {"kind": "point"}}]}))
    assert info.value.code == "unknown-type"


def test_parse_error_has_position():
    with pytest.raises(MetadataError) as info:
        parse_declared_schema('{\n  "dataset": "x",\n  "openness": }')
    assert info.value.code == "parse"
    assert (info.value.line, info.value.column) == (3, 15)


@pytest.mark.parametrize(
    "text",
    [
        "[]",
        json.dumps({"dataset": "", "openness": "closed", "type": {"kind": "string"}}),
        json.dumps({"dataset": "x", "openness": "ajar", "type": {"kind": "string"}}),
        json.dumps({"dataset": "x", "openness": "open"}),
        meta({"kind": "array"}),
        meta({"kind": "object", "fields": [{"type": {"kind": "string"}}]}),
        meta({"kind": "object", "fields": [{"name": "a", "optional": "yes", "type": {"kind": "string"}}]}),
        meta({"kind": "object", "fields": {}}),
        meta("string"),
    ],
)
def test_bad_shape(text):
    with pytest.raises(MetadataError) as info:
        parse_declared_schema(text)
    assert info.value.code == "bad-shape"


def test_array_and_multiset():
    arr = parse_declared_schema(meta({"kind": "array", "of": {"kind": "string"}}))
    assert isinstance(arr.root, DeclaredCollection)
    assert declared_to_sis(arr) == array(STRING)
    ms = parse_declared_schema(meta({"kind": "multiset", "of": {"kind": "integer"}}))
    assert declared_to_sis(ms) == multiset(INTEGER)


def test_optional_flag_parsed_but_not_emitted():
    d = parse_declared_schema(meta({"kind": "object", "fields": [
        {"name": "a", "optional": True, "type": {"kind": "string"}}]}))
    assert d.root.fields[0].optional is True
    assert "required" not in to_json_schema(declared_to_sis(d)).dumps()


def test_declared_sis_never_has_unions():
    d = parse_declared_schema(meta({"kind": "object", "fields": [
        {"name": "a", "type": {"kind": "multiset", "of": {"kind": "object", "fields": [
            {"name": "b", "type": {"kind": "null"}},
            {"name": "c", "type": {"kind": "array", "of": {"kind": "number"}}}]}}},
        {"name": "d", "type": {"kind": "boolean"}}]}))
    node = declared_to_sis(d)
    check_invariants(node)
    assert TypeTag.UNION.value not in json.dumps(to_json_schema(node).body)
    assert '"union"' not in node.__repr__()


def test_primitive_root():
    d = parse_declared_schema(meta({"kind": "string"}, openness="open"))
    assert d.root == DeclaredPrimitive(TypeTag.STRING)
    assert d.openness is Openness.OPEN
