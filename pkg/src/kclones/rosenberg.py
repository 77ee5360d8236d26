"""The six Rosenberg relation classes: constructors, validators, classifier, catalog."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from sympy import isprime
from sympy.utilities.iterables import multiset_partitions

from .domain import (DEFAULT_BUDGET, BudgetError, CentralSpec, InputError, OperationTable,
                     RegularSpec, Relation, all_tuples, check_size, has_repeat, ranks_of)

TAGS = ("BoundedOrder", "NontrivialEquivalence", "Permutational", "Affine",
        "CentralRelation", "HRegular")


class NotCentralError(InputError):
    """Raised by :func:`central_decompose`; ``reason`` names the first failed condition."""

    def __init__(self, reason: str):
        super().__init__(f"not central: {reason}")
        self.reason = reason


# ---------------------------------------------------------------------------
# central relations


@dataclass(frozen=True)
class CentralDecomposition:
    size: int
    arity: int
    center: frozenset
    tail: frozenset

    def _distinct(self) -> np.ndarray:
        every = all_tuples(self.size, self.arity)
        return every[~has_repeat(every)]

    @property
    def central_part(self) -> set:
        d = self._distinct()
        hit = np.isin(d, sorted(self.center)).any(axis=1)
        return {tuple(int(x) for x in t) for t in d[hit]}

    @property
    def reflexive_part(self) -> set:
        every = all_tuples(self.size, self.arity)
        return {tuple(int(x) for x in t) for t in every[has_repeat(every)]}

    @property
    def tail_part(self) -> set:
        return {p for t in self.tail for p in itertools.permutations(t)}


def _symmetrize_tail(size: int, h: int, center: frozenset, tail: Iterable[Sequence[int]]) -> frozenset:
    out = set()
    for t in tail:
        t = tuple(int(x) for x in t)
        if len(t) != h:
            raise InputError(f"tail tuple {t} does not have arity {h}")
        if any(not 0 <= x < size for x in t):
            raise InputError(f"tail tuple {t} has entries outside the domain")
        if len(set(t)) < h:
            raise InputError(f"tail tuple {t} has repeated entries")
        if any(x in center for x in t):
            raise InputError(f"tail tuple {t} contains a central element")
        out.add(tuple(sorted(t)))
    return frozenset(out)


def make_central(size: int, h: int, center: Iterable[int], tail: Iterable[Sequence[int]] = (),
                 label: str | None = None, budget: int = DEFAULT_BUDGET) -> Relation:
    """Central relation with exactly the given center; the tail is closed under permutations."""
    size = check_size(size)
    center = frozenset(int(c) for c in center)
    if not center:
        raise InputError("center must be nonempty")
    if any(not 0 <= c < size for c in center):
        raise InputError(f"center {sorted(center)} outside the domain")
    if h < 1:
        raise InputError("arity must be positive")
    tail = _symmetrize_tail(size, h, center, tail)
    noncentral = [x for x in range(size) if x not in center]
    subsets = set(itertools.combinations(noncentral, h))
    if subsets <= tail:
        raise InputError(f"center {sorted(center)} with this tail gives the full relation A^{h}")
    for y in noncentral:
        if all(s in tail for s in subsets if y in s):
            raise InputError(f"element {y} is central as well; the supplied center is not the full center")
    if label is None:
        label = f"central{h}[Z={','.join(map(str, sorted(center)))}" + (f";T={len(tail)}]" if tail else "]")
    return Relation(size, h, spec=CentralSpec(center, tail), label=label, budget=budget)


def central_decompose(rho: Relation) -> CentralDecomposition:
    """Center and tail of a central relation, or :class:`NotCentralError`."""
    size, h = rho.size, rho.arity
    if isinstance(rho.spec, CentralSpec):
        return CentralDecomposition(size, h, rho.spec.center, rho.spec.tail)
    if not rho.materializable:
        raise BudgetError(f"{size}^{h} tuples exceeds the materialization budget")
    mask = rho.mask()
    if mask.all():
        raise NotCentralError(f"relation is all of A^{h}")
    if h == 1:
        center = frozenset(int(x) for x in np.flatnonzero(mask))
        if not center:
            raise NotCentralError("relation is empty, no central element")
        return CentralDecomposition(size, 1, center, frozenset())
    every = all_tuples(size, h)
    if not mask[has_repeat(every)].all():
        raise NotCentralError("not totally reflexive")
    # a transposition and an h-cycle generate all coordinate permutations
    for perm in ([1, 0] + list(range(2, h)), list(range(1, h)) + [0]):
        if not np.array_equal(mask, mask[ranks_of(every[:, perm], size)]):
            raise NotCentralError("not totally symmetric")
    center = frozenset(c for c in range(size) if mask.reshape(size, -1)[c].all())
    if not center:
        raise NotCentralError("no central element")
    distinct = every[mask & ~has_repeat(every)]
    rest = distinct[~np.isin(distinct, sorted(center)).any(axis=1)]
    tail = frozenset(tuple(sorted(int(x) for x in t)) for t in rest)
    return CentralDecomposition(size, h, center, tail)


def is_central(rho: Relation) -> bool:
    try:
        central_decompose(rho)
    except NotCentralError:
        return False
    return True


# ---------------------------------------------------------------------------
# regular relations


def _labels(size: int, blocks: Sequence[Iterable[int]]) -> tuple:
    lab = [-1] * size
    for b, block in enumerate(blocks):
        for x in block:
            if not 0 <= x < size or lab[x] != -1:
                raise InputError(f"blocks {blocks} do not partition the domain")
            lab[x] = b
    if -1 in lab:
        raise InputError(f"blocks {blocks} do not cover the domain")
    return tuple(lab)


@dataclass(frozen=True)
class HRegularFamily:
    """A family of partitions of the domain, each with exactly ``h`` blocks."""

    size: int
    h: int
    partitions: tuple

    def __post_init__(self):
        parts = tuple(tuple(tuple(sorted(b)) for b in sorted(p, key=min)) for p in self.partitions)
        object.__setattr__(self, "partitions", parts)

    def validate(self) -> None:
        if self.h < 3:
            raise InputError("h-regular relations need h >= 3")
        if not self.partitions:
            raise InputError("family must be nonempty")
        labels = [_labels(self.size, p) for p in self.partitions]
        for p in self.partitions:
            if len(p) != self.h:
                raise InputError(f"partition {p} does not have exactly {self.h} blocks")
        for choice in itertools.product(range(self.h), repeat=len(labels)):
            if not any(all(lab[x] == c for lab, c in zip(labels, choice)) for x in range(self.size)):
                raise InputError(f"blocks {choice} of the family have empty intersection")

    @property
    def labels(self) -> tuple:
        return tuple(_labels(self.size, p) for p in self.partitions)


def make_regular(fam: HRegularFamily) -> Relation:
    fam.validate()
    label = "regular" + str(fam.h) + "[" + "|".join(
        "/".join("".join(map(str, b)) for b in p) for p in fam.partitions) + "]"
    return Relation(fam.size, fam.h, spec=RegularSpec(fam.labels), label=label)


def _regular_family(rho: Relation) -> HRegularFamily | None:
    size, h = rho.size, rho.arity
    if h < 3 or h > size:
        return None
    mask = rho.mask()
    if mask.all():
        return None
    every = all_tuples(size, h)
    candidates = []
    for p in multiset_partitions(list(range(size)), h):
        spec = RegularSpec((_labels(size, p),))
        if not (mask & ~spec.contains_array(every, size)).any():
            candidates.append(p)
    if len(candidates) > 16:
        raise BudgetError(f"{len(candidates)} candidate partitions; family search too large")
    for r in range(1, len(candidates) + 1):
        for fam in itertools.combinations(candidates, r):
            family = HRegularFamily(size, h, fam)
            try:
                family.validate()
            except InputError:
                continue
            if np.array_equal(RegularSpec(family.labels).contains_array(every, size), mask):
                return family
    return None


# ---------------------------------------------------------------------------
# affine relations


@dataclass(frozen=True)
class AbelianGroupStructure:
    """A binary operation on the domain together with its neutral element."""

    plus: OperationTable
    zero: int = 0

    @property
    def size(self) -> int:
        return self.plus.size

    def add(self, x: int, y: int) -> int:
        return int(self.plus.table[x * self.size + y])

    def neg(self, x: int) -> int:
        return next(y for y in range(self.size) if self.add(x, y) == self.zero)

    def minus(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def validate(self) -> int:
        """Check the elementary abelian group axioms and return the exponent ``p``."""
        n, add, e = self.size, self.add, self.zero
        if self.plus.arity != 2:
            raise InputError("group operation must be binary")
        if not 0 <= e < n:
            raise InputError("neutral element outside the domain")
        for x in range(n):
            if add(x, e) != x or add(e, x) != x:
                raise InputError(f"{e} is not neutral for {x}")
            if not any(add(x, y) == e for y in range(n)):
                raise InputError(f"{x} has no inverse")
            for y in range(n):
                if add(x, y) != add(y, x):
                    raise InputError("operation is not commutative")
                for z in range(n):
                    if add(add(x, y), z) != add(x, add(y, z)):
                        raise InputError("operation is not associative")
        orders = set()
        for x in range(n):
            if x == e:
                continue
            acc, order = x, 1
            while acc != e:
                acc, order = add(acc, x), order + 1
            orders.add(order)
        if len(orders) != 1 or not isprime(next(iter(orders))):
            raise InputError(f"group is not elementary abelian (element orders {sorted(orders)})")
        return next(iter(orders))

    @property
    def exponent(self) -> int:
        return self.validate()


def group_structures(size: int) -> list[AbelianGroupStructure]:
    """All elementary abelian group structures on ``{0..size-1}`` (small sizes only)."""
    size = check_size(size)
    p = next(q for q in range(2, size + 1) if size % q == 0)
    d, rest = 0, size
    while rest % p == 0:
        rest, d = rest // p, d + 1
    if rest != 1:
        return []
    vectors = list(itertools.product(range(p), repeat=d))
    seen, out = set(), []
    for perm in itertools.permutations(range(size)):
        # perm maps a vector index to a domain element
        back = {v: perm[i] for i, v in enumerate(vectors)}
        fwd = {perm[i]: v for i, v in enumerate(vectors)}
        table = tuple(back[tuple((a + b) % p for a, b in zip(fwd[x], fwd[y]))]
                      for x in range(size) for y in range(size))
        if table not in seen:
            seen.add(table)
            out.append(AbelianGroupStructure(OperationTable(size, 2, table), back[(0,) * d]))
    return out


def make_affine(g: AbelianGroupStructure) -> Relation:
    """The 4-ary relation ``{(x, y, u, v) : x + y = u + v}``."""
    g.validate()
    n = g.size
    plus = g.plus.table.reshape(n, n)
    every = all_tuples(n, 4).astype(np.int64)
    keep = plus[every[:, 0], every[:, 1]] == plus[every[:, 2], every[:, 3]]
    return Relation(n, 4, every[keep], label="affine")


def _affine_group(rho: Relation) -> AbelianGroupStructure | None:
    # lambda does not depend on which element is neutral, so x + y can be read
    # off as the unique v with (x, y, 0, v) in rho
    n = rho.size
    if rho.arity != 4 or len(rho) != n**3:
        return None
    m = rho.mask().reshape(n, n, n, n)
    table = []
    for x in range(n):
        for y in range(n):
            vs = np.flatnonzero(m[x, y, 0])
            if len(vs) != 1:
                return None
            table.append(int(vs[0]))
    g = AbelianGroupStructure(OperationTable(n, 2, table), 0)
    try:
        g.validate()
    except InputError:
        return None
    return g if make_affine(g) == rho else None


# ---------------------------------------------------------------------------
# classification


@dataclass
class RosenbergClass:
    tag: str
    params: dict = field(default_factory=dict)

    def to_doc(self) -> dict:
        return {"tag": self.tag, **self.params}


def _binary_props(rho: Relation):
    n = rho.size
    m = rho.mask().reshape(n, n)
    reflexive = bool(np.diag(m).all())
    symmetric = bool((m == m.T).all())
    antisym = not (m & m.T & ~np.eye(n, dtype=bool)).any()
    mi = m.astype(np.int64)
    transitive = not ((mi @ mi > 0) & ~m).any()
    return m, reflexive, symmetric, antisym, transitive


def classify(rho: Relation) -> list[RosenbergClass]:
    """Every Rosenberg class whose definition ``rho`` satisfies, with parameters."""
    if not rho.materializable:
        raise BudgetError(f"{rho.size}^{rho.arity} tuples exceeds the materialization budget")
    n, h = rho.size, rho.arity
    out = []
    if h == 2:
        m, refl, sym, antisym, trans = _binary_props(rho)
        if refl and antisym and trans:
            least = [x for x in range(n) if m[x].all()]
            greatest = [x for x in range(n) if m[:, x].all()]
            if least and greatest:
                out.append(RosenbergClass("BoundedOrder", {"least": least[0], "greatest": greatest[0]}))
        if refl and sym and trans and not m.all() and m.sum() > n:
            blocks = sorted({tuple(np.flatnonzero(m[x]).tolist()) for x in range(n)})
            out.append(RosenbergClass("NontrivialEquivalence", {"blocks": [list(b) for b in blocks]}))
        succ = [np.flatnonzero(m[x]) for x in range(n)]
        if all(len(s) == 1 for s in succ):
            pi = [int(s[0]) for s in succ]
            if sorted(pi) == list(range(n)) and all(pi[x] != x for x in range(n)):
                lengths = set()
                for x in range(n):
                    y, length = pi[x], 1
                    while y != x:
                        y, length = pi[y], length + 1
                    lengths.add(length)
                if len(lengths) == 1 and isprime(next(iter(lengths))):
                    out.append(RosenbergClass("Permutational", {"p": lengths.pop(), "permutation": pi}))
    if h == 4:
        g = _affine_group(rho)
        if g is not None:
            out.append(RosenbergClass("Affine", {"p": g.exponent, "zero": g.zero,
                                                 "plus": g.plus.table.tolist()}))
    try:
        dec = central_decompose(rho)
    except NotCentralError:
        pass
    else:
        out.append(RosenbergClass("CentralRelation", {"arity": h, "center": sorted(dec.center),
                                                      "tail": [list(t) for t in sorted(dec.tail)]}))
    fam = _regular_family(rho)
    if fam is not None:
        out.append(RosenbergClass("HRegular", {"h": h, "partitions": [[list(b) for b in p]
                                                                      for p in fam.partitions]}))
    return out


# ---------------------------------------------------------------------------
# catalog


@dataclass
class CatalogEntry:
    tag: str
    relation: Relation

    @property
    def label(self) -> str:
        return self.relation.label

    def to_doc(self) -> dict:
        return {**self.relation.to_doc(), "class": self.tag}


def _bounded_orders(n: int) -> Iterable[Relation]:
    off = [(x, y) for x in range(n) for y in range(n) if x != y]
    for bits in itertools.product((0, 1), repeat=len(off)):
        pairs = [(x, x) for x in range(n)] + [p for p, b in zip(off, bits) if b]
        rel = Relation(n, 2, pairs)
        _, refl, _, antisym, trans = _binary_props(rel)
        if antisym and trans:
            m = rel.mask().reshape(n, n)
            if any(m[x].all() for x in range(n)) and any(m[:, x].all() for x in range(n)):
                yield rel


def catalog(size: int, max_arity: int = 3) -> list[CatalogEntry]:
    """All Rosenberg relations on a domain of at most 4 elements, up to ``max_arity``."""
    size = check_size(size)
    if size > 4:
        raise BudgetError(f"catalog enumeration is limited to |A| <= 4, got {size}")
    entries: list[CatalogEntry] = []
    seen: set = set()
    counters: dict = {}

    def add(tag: str, rel: Relation, label: str) -> None:
        if rel in seen:
            return
        seen.add(rel)
        i = counters.setdefault(label, 0)
        counters[label] += 1
        rel.label = f"{label}{i}"
        entries.append(CatalogEntry(tag, rel))

    dom = list(range(size))
    if max_arity >= 2:
        for rel in _bounded_orders(size):
            add("BoundedOrder", rel, "order")
        for blocks in range(2, size):
            for p in multiset_partitions(dom, blocks):
                pairs = [(x, y) for b in p for x in b for y in b]
                add("NontrivialEquivalence", Relation(size, 2, pairs), "equiv")
        for pi in itertools.permutations(dom):
            rel = Relation(size, 2, [(x, pi[x]) for x in dom])
            if any(c.tag == "Permutational" for c in classify(rel)):
                add("Permutational", rel, "perm")
    if max_arity >= 4:
        for g in group_structures(size):
            add("Affine", make_affine(g), "affine")
    for h in range(1, min(max_arity, size - 1) + 1):
        for zs in range(1, size):
            for center in itertools.combinations(dom, zs):
                rest = [x for x in dom if x not in center]
                subsets = list(itertools.combinations(rest, h)) if h > 1 else []
                for r in range(len(subsets) + 1):
                    for tail in itertools.combinations(subsets, r):
                        try:
                            rel = make_central(size, h, center, tail)
                        except InputError:
                            continue
                        add("CentralRelation", rel, f"central{h}_")
    for h in range(3, min(max_arity, size) + 1):
        parts = list(multiset_partitions(dom, h))
        for r in range(1, len(parts) + 1):
            for fam in itertools.combinations(parts, r):
                family = HRegularFamily(size, h, fam)
                try:
                    rel = make_regular(family)
                except InputError:
                    continue
                if not rel.mask().all():
                    add("HRegular", rel, f"regular{h}_")
    return entries
