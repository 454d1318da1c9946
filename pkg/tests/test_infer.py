import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import (
    json_records,
    json_values,
    kindmap_of_records,
    kindmap_of_value,
    random_record,
    to_kindmap,
)
from sischema.errors import RecordError
from sischema.infer import LocalSis, absorb, compute_local_sis, empty_local, fold_record, node_from_value
from sischema.merge import make_union, merge_nodes
from sischema.sis import (
    INTEGER,
    NUMBER,
    STRING,
    TypeTag,
    array,
    check_invariants,
    count_nodes,
    empty_object,
    obj,
    sis_equal,
    union,
)
from sischema.validate import conforms

PRODUCT = {"productId": 1, "productName": "Ice sculpture", "price": 12.50, "tags": ["cold", "ice"]}


def naive_local(records):
    """Reference: merge node_from_value of each record, one at a time."""
    acc = empty_object()
    for r in records:
        acc = merge_nodes(acc, node_from_value(r))
    return acc


def test_product_record():
    expected = obj({"price": NUMBER, "productId": INTEGER, "productName": STRING, "tags": array(STRING)})
    assert sis_equal(node_from_value(PRODUCT), expected)


def test_empty_record():
    assert node_from_value({}) == empty_object()


def test_mixed_array_items():
    out = node_from_value([1, "x"])
    assert sis_equal(out, array(union(INTEGER, STRING)))
    # brute force: pairwise merge of the element nodes
    assert sis_equal(out, array(make_union(node_from_value(1), node_from_value("x"))))


def test_empty_array_has_no_item():
    assert node_from_value([]).item is None


@pytest.mark.parametrize(
    "value, tag",
    [(None, TypeTag.NULL), (True, TypeTag.BOOLEAN), (0, TypeTag.INTEGER), (1.0, TypeTag.NUMBER), ("", TypeTag.STRING)],
)
def test_scalar_tags(value, tag):
    assert node_from_value(value).tag is tag


def test_bool_is_not_integer():
    assert sis_equal(node_from_value([True, 1]), array(union(node_from_value(True), INTEGER)))


def test_non_json_value_rejected():
    with pytest.raises(TypeError):
        node_from_value({"a": (1, 2)})


def test_fold_peeve_conflict():
    acc = fold_record(empty_local(), {"Peeve": 1})
    acc = fold_record(acc, {"Peeve": "noise"})
    assert sis_equal(acc.root.fields["Peeve"], union(INTEGER, STRING))
    assert acc.record_count == 2


def test_fold_first_record():
    acc = fold_record(empty_local(), PRODUCT)
    assert sis_equal(acc.root, node_from_value(PRODUCT))
    assert acc.record_count == 1


def test_fold_same_record_twice():
    once = fold_record(empty_local(), PRODUCT)
    twice = fold_record(once, PRODUCT)
    assert sis_equal(twice.root, once.root)
    assert twice.record_count == 2
    assert sis_equal(twice.root, naive_local([PRODUCT, PRODUCT]))


def test_fold_rejects_non_object():
    with pytest.raises(RecordError) as info:
        fold_record(empty_local(3), [1, 2])
    assert info.value.code == "not-object"
    assert info.value.partition_id == 3


def test_fold_deep_merges_nested_objects():
    acc = fold_record(empty_local(), {"f": {"a": 1}})
    acc = fold_record(acc, {"f": {"b": "x"}})
    assert sis_equal(acc.root, obj({"f": obj({"a": INTEGER, "b": STRING})}))


def test_homogeneous_stream():
    local = compute_local_sis([PRODUCT] * 3)
    assert sis_equal(local.root, node_from_value(PRODUCT))
    assert local.record_count == 3


def test_empty_stream():
    local = compute_local_sis([], partition_id=5)
    assert local == LocalSis(empty_object(), 0, 5)


def test_compute_attaches_ordinal():
    with pytest.raises(RecordError) as info:
        compute_local_sis([{"a": 1}, {"a": 2}, "oops"], partition_id=2)
    assert info.value.ordinal == 2
    assert info.value.partition_id == 2


def test_reader_errors_get_ordinal():
    def stream():
        yield {"a": 1}
        raise RecordError("bad line", "malformed", offset=10)

    with pytest.raises(RecordError) as info:
        compute_local_sis(stream(), partition_id=1)
    assert (info.value.ordinal, info.value.partition_id, info.value.offset) == (1, 1, 10)


def test_compute_matches_naive_on_random_corpus():
    rng = random.Random(5)
    for _ in range(30):
        records = [random_record(rng, depth=4) for _ in range(rng.randint(0, 200))]
        local = compute_local_sis(records)
        assert sis_equal(local.root, naive_local(records))
        assert to_kindmap(local.root) == kindmap_of_records(records)


@settings(max_examples=300)
@given(json_values)
def test_node_from_value_matches_reference(v):
    node = node_from_value(v)
    check_invariants(node)
    assert to_kindmap(node) == kindmap_of_value(v)
    assert conforms(v, node)


@settings(max_examples=300)
@given(st.lists(json_values, max_size=4), json_values)
def test_absorb_equals_merge(prefix, v):
    node = node_from_value(prefix)  # an array node; exercise absorb on its item too
    assert sis_equal(absorb(node, v), merge_nodes(node, node_from_value(v)))
    seed = node_from_value(prefix[0]) if prefix else node_from_value(None)
    assert sis_equal(absorb(seed, v), merge_nodes(seed, node_from_value(v)))


@given(st.lists(json_records, max_size=12), st.randoms(use_true_random=False))
def test_order_insensitive(records, rnd):
    base = compute_local_sis(records).root
    shuffled = records[:]
    rnd.shuffle(shuffled)
    assert sis_equal(compute_local_sis(shuffled).root, base)


@given(st.lists(json_records, max_size=12))
def test_soundness(records):
    root = compute_local_sis(records).root
    assert all(conforms(r, root) for r in records)


def test_node_count_bounded_by_distinct_paths():
    rng = random.Random(9)
    records = [random_record(rng) for _ in range(50)]
    size_50 = count_nodes(compute_local_sis(records).root)
    size_5000 = count_nodes(compute_local_sis(records * 100).root)
    assert size_50 == size_5000


def test_absorb_returns_same_node_when_nothing_new():
    local = compute_local_sis([PRODUCT])
    assert absorb(local.root, PRODUCT) is local.root
