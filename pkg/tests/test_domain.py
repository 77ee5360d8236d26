import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kclones.domain import (BudgetError, CentralSpec, InputError, OperationTable, Relation, apply,
                            find_violation, image_of_relation, preserves, projection, rank, rel_contains,
                            unrank)
from kclones.oracle import binary_witness
from kclones.rosenberg import HRegularFamily, catalog, make_central, make_regular


def literal_preserves(f, rho):
    """Enumerate every choice of f.arity member tuples straight from the definition."""
    members = sorted(rho.tuples())
    for cols in itertools.product(members, repeat=f.arity):
        image = tuple(f(*row) for row in zip(*cols))
        if image not in rho:
            return False
    return True


def central_by_definition(size, h, center, tail=()):
    tail = {tuple(sorted(t)) for t in tail}
    return {t for t in itertools.product(range(size), repeat=h)
            if len(set(t)) < h or set(t) & set(center) or tuple(sorted(t)) in tail}


def test_rel_contains_diagonal():
    d = Relation.diagonal(3)
    assert rel_contains(d, (1, 1))
    assert not rel_contains(d, (1, 2))


def test_rel_contains_central_pair():
    # rho = Delta + {(0, x), (x, 0)}
    rho = make_central(3, 2, [0])
    assert rho.tuples() == {(x, x) for x in range(3)} | {(0, 1), (1, 0), (0, 2), (2, 0)}
    assert not rel_contains(rho, (1, 2))


def test_rel_contains_errors():
    d = Relation.diagonal(3)
    with pytest.raises(InputError):
        rel_contains(d, (1, 1, 1))
    with pytest.raises(InputError):
        rel_contains(d, (1, 3))


def test_apply_examples():
    assert apply(projection(3, 2, 1), (2, 0)) == 2
    assert apply(OperationTable.constant(3, 2, 0), (1, 2)) == 0
    with pytest.raises(InputError):
        apply(projection(3, 2, 1), (1,))


def test_apply_order_f_top_is_identity():
    order = Relation(3, 2, [(0, 0), (1, 1), (2, 2), (0, 2), (0, 1), (2, 1)])  # 0 < 2 < 1, top 1
    f = binary_witness("order_f", 3, order=order)
    assert all(apply(f, (x, 1)) == x for x in range(3))


def test_rank_is_lexicographic():
    every = list(itertools.product(range(4), repeat=3))
    assert [rank(t, 4) for t in every] == list(range(64))
    assert all(unrank(rank(t, 4), 4, 3) == t for t in every)


def test_projection():
    ident = projection(3, 1, 1)
    assert ident.table.tolist() == [0, 1, 2]
    p = projection(3, 2, 2)
    assert all(p(a, b) == b for a in range(3) for b in range(3))
    with pytest.raises(InputError):
        projection(3, 2, 3)
    with pytest.raises(InputError):
        projection(3, 2, 0)


def test_projection_preserves_whole_catalog():
    p = projection(3, 2, 1)
    assert all(preserves(p, e.relation) for e in catalog(3, 4))


def test_any_operation_preserves_diagonal(rng):
    d = Relation.diagonal(3)
    for _ in range(30):
        f = OperationTable(3, 2, rng.integers(0, 3, 9))
        assert preserves(f, d)


def test_order_f_breaks_central_with_top_center():
    order = Relation(4, 2, [(0, 0), (1, 1), (2, 2), (3, 3), (0, 1), (0, 2), (0, 3), (1, 3), (2, 3)])
    f = binary_witness("order_f", 4, order=order)
    sigma = make_central(4, 2, [3])
    assert not preserves(f, sigma)
    v = find_violation(f, sigma)
    assert all(tuple(c) in sigma for c in v.columns)
    assert f.rowwise(v.columns) == v.image and v.image not in sigma


def test_preserves_domain_mismatch():
    with pytest.raises(InputError):
        preserves(projection(3, 1, 1), Relation.diagonal(4))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_preserves_matches_literal_enumeration(data):
    rels = [e.relation for e in catalog(3, 3)]
    rho = data.draw(st.sampled_from(rels))
    k = data.draw(st.integers(1, 2))
    if len(rho) ** k > 5000:
        k = 1
    table = data.draw(st.lists(st.integers(0, 2), min_size=3**k, max_size=3**k))
    f = OperationTable(3, k, table)
    assert preserves(f, rho) == literal_preserves(f, rho)


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_central_search_matches_column_search(data):
    size = data.draw(st.integers(3, 5))
    h = data.draw(st.integers(1, size - 1))
    z = data.draw(st.integers(1, size - 1))
    center = list(range(z))
    rest = list(range(z, size))
    subsets = list(itertools.combinations(rest, h)) if h > 1 else []
    tail = data.draw(st.lists(st.sampled_from(subsets), max_size=2)) if subsets else []
    try:
        rho = make_central(size, h, center, tail)
    except InputError:
        return
    explicit = Relation(size, h, rho.tuples())
    k = data.draw(st.integers(1, 2))
    table = data.draw(st.lists(st.integers(0, size - 1), min_size=size**k, max_size=size**k))
    f = OperationTable(size, k, table)
    assert preserves(f, rho) == preserves(f, explicit)


def test_unary_preservation_is_image_inclusion(rng):
    for entry in catalog(3, 3):
        theta = entry.relation
        for table in itertools.product(range(3), repeat=3):
            f = OperationTable(3, 1, table)
            assert preserves(f, theta) == (image_of_relation(f, theta) <= theta.tuples())


@pytest.mark.parametrize("size", range(3, 7))
def test_implicit_central_agrees_with_definition(size):
    for h in range(1, min(size - 1, 5) + 1):
        center = [0] if h > 1 else [0, 1]
        rho = make_central(size, h, center)
        assert rho.tuples() == central_by_definition(size, h, center)
        for t in itertools.islice(itertools.product(range(size), repeat=h), 500):
            assert (t in rho) == (t in central_by_definition(size, h, center))


def test_implicit_central_with_tail_agrees():
    rho = make_central(5, 3, [0], [(1, 2, 3)])
    assert rho.tuples() == central_by_definition(5, 3, [0], [(1, 2, 3)])
    assert (3, 1, 2) in rho and (1, 2, 4) not in rho


def test_implicit_regular_agrees_with_definition():
    fam = HRegularFamily(4, 3, [[[0, 1], [2], [3]]])
    rho = make_regular(fam)
    block = {0: 0, 1: 0, 2: 1, 3: 2}
    expected = {t for t in itertools.product(range(4), repeat=3)
                if len({block[x] for x in t}) < 3}
    assert rho.tuples() == expected


def test_explicit_and_descriptor_must_agree():
    with pytest.raises(InputError):
        Relation(3, 2, [(0, 0)], spec=CentralSpec(frozenset({0})))


def test_large_implicit_relation_stays_implicit():
    rho = make_central(6, 4, [0])
    assert not rho.is_explicit
    assert (1, 2, 3, 4) not in rho
    assert (1, 1, 3, 4) in rho
    assert not rho.is_explicit
    big = make_central(12, 9, [0], budget=10**6)
    assert (1, 2, 3, 4, 5, 6, 7, 8, 0) in big
    with pytest.raises(BudgetError):
        big.mask()


def test_documents_round_trip():
    rho = make_central(5, 3, [0], [(1, 2, 3)])
    again = Relation.from_doc(rho.to_doc())
    assert again == rho
    explicit = Relation(3, 2, [(0, 1), (1, 2)], label="x")
    assert Relation.from_doc(explicit.to_doc()) == explicit
    f = OperationTable(3, 2, [i % 3 for i in range(9)])
    assert OperationTable.from_doc(f.to_doc()) == f


def test_bad_documents():
    with pytest.raises(InputError):
        Relation.from_doc({"domain_size": 3, "arity": 2})
    with pytest.raises(InputError):
        Relation.from_doc({"domain_size": 3, "arity": 2, "tuples": [[0, 5]]})
    with pytest.raises(InputError):
        OperationTable.from_doc({"domain_size": 3, "arity": 2, "table": [0, 1]})


def test_operation_table_validation():
    with pytest.raises(InputError):
        OperationTable(3, 1, [0, 1, 3])
    f = OperationTable(3, 1, [0, 1, 2])
    with pytest.raises(ValueError):
        f.table[0] = 2
    assert np.array_equal(f.table, [0, 1, 2])
