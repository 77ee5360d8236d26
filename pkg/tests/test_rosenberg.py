import itertools
from collections import Counter

import numpy as np
import pytest

from kclones.domain import InputError, OperationTable, Relation
from kclones.oracle import EnumerationBudget, iter_tables, preserving_mask
from kclones.rosenberg import (AbelianGroupStructure, HRegularFamily, NotCentralError, catalog,
                               central_decompose, classify, group_structures, is_central, make_affine,
                               make_central, make_regular)

Z3 = AbelianGroupStructure(OperationTable(3, 2, [(x + y) % 3 for x in range(3) for y in range(3)]), 0)


def tags(rho):
    return [c.tag for c in classify(rho)]


def test_classify_chain():
    chain = Relation(3, 2, [(x, y) for x in range(3) for y in range(3) if x <= y])
    (cls,) = classify(chain)
    assert cls.tag == "BoundedOrder"
    assert (cls.params["least"], cls.params["greatest"]) == (0, 2)


def test_classify_three_cycle():
    (cls,) = classify(Relation(3, 2, [(0, 1), (1, 2), (2, 0)]))
    assert cls.tag == "Permutational" and cls.params["p"] == 3
    assert cls.params["permutation"] == [1, 2, 0]


def test_classify_diagonal_is_nothing():
    assert classify(Relation.diagonal(3)) == []


def test_classify_rejects_composite_cycle_length():
    # a 4-cycle: length 4 is not prime
    assert tags(Relation(4, 2, [(0, 1), (1, 2), (2, 3), (3, 0)])) == []
    # two 2-cycles are fine
    assert tags(Relation(4, 2, [(0, 1), (1, 0), (2, 3), (3, 2)])) == ["Permutational"]


def test_classify_equivalence_and_unbounded_order():
    assert tags(Relation(3, 2, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0)])) == ["NontrivialEquivalence"]
    # 0 < 1 and 0 < 2 has no greatest element
    assert tags(Relation(3, 2, [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2)])) == []


def test_affine_z3_examples():
    lam = make_affine(Z3)
    assert (0, 0, 0, 0) in lam
    assert len(lam) == 27
    f = lambda x: (x + 1) % 3
    assert all(f((x + y) % 3) == (f(x) + f(y) - f(0)) % 3 for x in range(3) for y in range(3))
    assert tags(lam) == ["Affine"]


def test_affine_rejects_non_groups():
    with pytest.raises(InputError):
        make_affine(AbelianGroupStructure(OperationTable(3, 2, [0] * 9), 0))
    cyclic4 = AbelianGroupStructure(OperationTable(4, 2, [(x + y) % 4 for x in range(4) for y in range(4)]), 0)
    with pytest.raises(InputError):
        make_affine(cyclic4)


def group_tables_by_search(n):
    """Every binary table on n elements satisfying the abelian group axioms, by exhaustion."""
    found = []
    for table in itertools.product(range(n), repeat=n * n):
        add = lambda x, y: table[x * n + y]
        for e in range(n):
            if all(add(x, e) == x for x in range(n)):
                break
        else:
            continue
        if any(add(x, y) != add(y, x) for x in range(n) for y in range(n)):
            continue
        if any(add(add(x, y), z) != add(x, add(y, z)) for x, y, z in itertools.product(range(n), repeat=3)):
            continue
        if all(any(add(x, y) == e for y in range(n)) for x in range(n)):
            found.append((table, e))
    return found


def test_group_structures_match_exhaustive_search():
    searched = group_tables_by_search(3)
    assert len(searched) == 3
    assert sorted(tuple(g.plus.table.tolist()) for g in group_structures(3)) == sorted(t for t, _ in searched)
    for table, e in searched:
        g = AbelianGroupStructure(OperationTable(3, 2, table), e)
        lam = make_affine(g)
        for x, y, u, v in itertools.product(range(3), repeat=4):
            assert ((x, y, u, v) in lam) == (table[3 * x + y] == table[3 * u + v])


def test_binary_affine_polymorphisms_satisfy_identity():
    lam = make_affine(Z3)
    add = lambda x, y: (x + y) % 3
    every = np.array(list(itertools.product(range(3), repeat=2)))
    for _, tables in iter_tables(3, 2, EnumerationBudget()):
        ok = preserving_mask(tables, lam, 2)
        for t, keep in zip(tables, ok):
            f = lambda a, b: int(t[3 * a + b])
            identity = all(f(add(x1, y1), add(x2, y2)) == (f(x1, x2) + f(y1, y2) - f(0, 0)) % 3
                           for (x1, x2), (y1, y2) in itertools.product(every.tolist(), repeat=2))
            assert keep == identity


def test_central_decompose_example():
    rho = Relation(3, 2, [(x, x) for x in range(3)] + [(0, 1), (1, 0), (0, 2), (2, 0)])
    dec = central_decompose(rho)
    assert dec.center == {0}
    assert len(dec.central_part) == 4
    assert dec.reflexive_part == {(x, x) for x in range(3)}
    assert dec.tail == frozenset()


def test_central_decompose_negatives():
    with pytest.raises(NotCentralError, match="A\\^2"):
        central_decompose(Relation.full(3, 2))
    with pytest.raises(NotCentralError, match="reflexive"):
        central_decompose(Relation(3, 2, [(0, 1)]))
    with pytest.raises(NotCentralError, match="symmetric"):
        central_decompose(Relation(3, 2, [(x, x) for x in range(3)] + [(0, 1), (0, 2)]))
    with pytest.raises(NotCentralError, match="central element"):
        central_decompose(Relation.diagonal(3))


def test_make_central_examples():
    assert len(make_central(3, 2, [0])) == 7
    rho = make_central(6, 4, [0])
    assert not rho.is_explicit
    assert (1, 2, 3, 4) not in rho and (1, 1, 3, 4) in rho
    with pytest.raises(InputError):
        make_central(3, 2, [0, 1])


def test_make_central_rejects_partial_center():
    # with tail {12, 13} element 1 is central too
    with pytest.raises(InputError, match="full center"):
        make_central(4, 2, [0], [(1, 2), (1, 3)])


def test_make_central_symmetrizes_tail():
    rho = make_central(5, 3, [0], [(3, 1, 2)])
    assert all(p in rho for p in itertools.permutations((1, 2, 3)))


def test_decomposition_partition_laws():
    for entry in catalog(4, 3):
        if entry.tag != "CentralRelation":
            continue
        rho = entry.relation
        dec = central_decompose(Relation(rho.size, rho.arity, rho.tuples()))
        C, R, T = dec.central_part, dec.reflexive_part, dec.tail_part
        if rho.arity == 1:
            R = set()
        assert not (C & R) and not (C & T) and not (R & T)
        assert C | R | T == rho.tuples()
        assert all(len(set(t)) < len(t) for t in R)
        assert all(len(set(t)) == len(t) and set(t) & dec.center for t in C)
        assert all(len(set(t)) == len(t) and not set(t) & dec.center for t in T)
        assert dec.center and not Relation(rho.size, rho.arity, rho.tuples()).mask().all()


def test_decompose_inverts_make_central():
    cases = [(4, 2, [0], []), (4, 2, [0], [(1, 2)]), (5, 3, [1], [(0, 2, 3)]), (5, 2, [0, 1], [(2, 3)]),
             (6, 4, [0], []), (4, 1, [0, 2], [])]
    for size, h, z, t in cases:
        rho = make_central(size, h, z, t)
        dec = central_decompose(Relation(size, h, rho.tuples()))
        assert dec.center == frozenset(z)
        assert dec.tail == frozenset(tuple(sorted(x)) for x in t)


def test_make_regular_examples():
    delta = HRegularFamily(3, 3, [[[0], [1], [2]]])
    rho = make_regular(delta)
    assert len(rho) == 21
    fam = HRegularFamily(4, 3, [[[0, 1], [2], [3]]])
    rho = make_regular(fam)
    assert (0, 1, 2) in rho and (0, 2, 3) not in rho
    assert all(t in rho for t in itertools.product(range(4), repeat=3) if len(set(t)) < 3)


def test_make_regular_rejects_invalid_families():
    with pytest.raises(InputError):
        make_regular(HRegularFamily(4, 3, [[[0, 1], [2, 3]]]))
    with pytest.raises(InputError):
        make_regular(HRegularFamily(4, 3, [[[0, 1], [2], [3]], [[2, 3], [0], [1]]]))


def test_regular_relations_totally_reflexive_and_symmetric():
    for size in (3, 4):
        for entry in catalog(size, size):
            if entry.tag != "HRegular":
                continue
            rho = entry.relation
            ts = rho.tuples()
            h = rho.arity
            assert all(t in ts for t in itertools.product(range(size), repeat=h) if len(set(t)) < h)
            assert all(p in ts for t in ts for p in itertools.permutations(t))


def test_catalog_counts_on_three_elements():
    count = Counter((e.tag, e.relation.arity) for e in catalog(3, 3))
    assert count["NontrivialEquivalence", 2] == 3
    assert count["Permutational", 2] == 2
    assert count["CentralRelation", 1] == 6
    assert count["BoundedOrder", 2] == 6


def test_catalog_classification_round_trip():
    for size in (3, 4):
        for entry in catalog(size, 4):
            assert tags(entry.relation) == [entry.tag], entry.label


def test_catalog_is_deduplicated_and_bounded():
    entries = catalog(4, 4)
    assert len({e.relation for e in entries}) == len(entries)
    assert len({e.label for e in entries}) == len(entries)
    with pytest.raises(Exception):
        catalog(5, 2)


def test_is_central():
    assert is_central(make_central(4, 3, [0]))
    assert not is_central(Relation.diagonal(4))
