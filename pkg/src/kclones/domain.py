"""Finite domains, relations, operation tables and the preservation predicate.

Elements of a domain of size ``n`` are the integers ``0..n-1``.  Tuples are
ranked lexicographically with the leftmost coordinate most significant, so
an operation of arity ``k`` is a flat table of ``n**k`` values and a relation
of arity ``h`` has a boolean membership mask of length ``n**h``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_BUDGET = 10**7
"""Largest ``|A|**h`` for which a relation is materialized."""

SELECTION_BUDGET = 10**8
"""Largest number of column selections examined by a preservation check."""

_CHUNK = 1 << 18


class InputError(ValueError):
    """Malformed or inconsistent input."""


class BudgetError(RuntimeError):
    """A computation would exceed its configured budget."""


class ScopeError(ValueError):
    """Input lies outside the hypotheses of the result being applied."""


def check_size(size: int, minimum: int = 2) -> int:
    if not isinstance(size, (int, np.integer)) or size < minimum:
        raise InputError(f"domain size must be an integer >= {minimum}, got {size!r}")
    return int(size)


def _dtype(size: int):
    return np.uint8 if size <= 255 else np.int32


def powers(size: int, arity: int) -> np.ndarray:
    return size ** np.arange(arity - 1, -1, -1, dtype=np.int64)


def rank(t: Sequence[int], size: int) -> int:
    r = 0
    for x in t:
        r = r * size + int(x)
    return r


def unrank(r: int, size: int, arity: int) -> tuple[int, ...]:
    out = []
    for _ in range(arity):
        r, x = divmod(r, size)
        out.append(x)
    return tuple(reversed(out))


def ranks_of(arr: np.ndarray, size: int) -> np.ndarray:
    """Ranks of the rows of an ``(N, h)`` integer array."""
    arr = np.asarray(arr)
    return arr.astype(np.int64) @ powers(size, arr.shape[-1])


def tuples_from_ranks(ranks: np.ndarray, size: int, arity: int) -> np.ndarray:
    ranks = np.asarray(ranks, dtype=np.int64)
    return ((ranks[:, None] // powers(size, arity)) % size).astype(_dtype(size))


def all_tuples(size: int, arity: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Every tuple of ``A**arity`` in rank order, as an ``(size**arity, arity)`` array."""
    total = size**arity
    if total > budget:
        raise BudgetError(f"{size}^{arity} = {total} tuples exceeds the budget of {budget}")
    return tuples_from_ranks(np.arange(total, dtype=np.int64), size, arity)


def has_repeat(arr: np.ndarray) -> np.ndarray:
    """Row-wise: does the row contain two equal entries?"""
    if arr.shape[1] < 2:
        return np.zeros(len(arr), dtype=bool)
    s = np.sort(arr, axis=1)
    return (s[:, 1:] == s[:, :-1]).any(axis=1)


# ---------------------------------------------------------------------------
# implicit membership descriptors


@dataclass(frozen=True)
class CentralSpec:
    """Membership of a central relation: reflexive tuples, tuples meeting the
    center, and the (permutation closed) tail, stored as sorted tuples."""

    center: frozenset
    tail: frozenset = frozenset()

    def contains(self, t: Sequence[int]) -> bool:
        if len(set(t)) < len(t):
            return True
        if any(x in self.center for x in t):
            return True
        return tuple(sorted(t)) in self.tail

    def contains_array(self, arr: np.ndarray, size: int) -> np.ndarray:
        out = has_repeat(arr)
        out |= np.isin(arr, np.fromiter(self.center, dtype=np.int64)).any(axis=1)
        if self.tail:
            rest = ~out
            if rest.any():
                tail_ranks = np.array([rank(t, size) for t in self.tail], dtype=np.int64)
                srt = np.sort(arr[rest], axis=1)
                out[rest] = np.isin(ranks_of(srt, size), tail_ranks)
        return out

    def to_doc(self) -> dict:
        return {"center": sorted(self.center), "tail": [list(t) for t in sorted(self.tail)]}


@dataclass(frozen=True)
class RegularSpec:
    """Membership of ``R_Theta``: for each partition some two coordinates share a block.

    Each partition is a tuple mapping element -> block index."""

    labels: tuple

    def contains(self, t: Sequence[int]) -> bool:
        return all(len({lab[x] for x in t}) < len(t) for lab in self.labels)

    def contains_array(self, arr: np.ndarray, size: int) -> np.ndarray:
        out = np.ones(len(arr), dtype=bool)
        for lab in self.labels:
            out &= has_repeat(np.asarray(lab)[arr])
        return out


# ---------------------------------------------------------------------------
# relations


class Relation:
    """A finitary relation on ``{0..size-1}``.

    Either ``tuples`` (explicit) or ``spec`` (implicit membership descriptor)
    must be given; both may be present.  Implicit relations are materialized
    lazily and only while ``size**arity`` stays within ``budget``.
    """

    def __init__(self, size: int, arity: int, tuples: Iterable[Sequence[int]] | None = None,
                 spec=None, label: str | None = None, budget: int = DEFAULT_BUDGET):
        self.size = check_size(size, 1)
        if arity < 1:
            raise InputError(f"arity must be positive, got {arity}")
        self.arity = int(arity)
        self.label = label
        self.spec = spec
        self.budget = budget
        self._mask = None
        self._members = None
        if tuples is None and spec is None:
            raise InputError("relation needs tuples or a membership descriptor")
        if tuples is not None:
            ts = set()
            for t in tuples:
                t = tuple(int(x) for x in t)
                if len(t) != self.arity:
                    raise InputError(f"tuple {t} does not have arity {self.arity}")
                if any(x < 0 or x >= self.size for x in t):
                    raise InputError(f"tuple {t} has entries outside the domain of size {self.size}")
                ts.add(t)
            mask = np.zeros(self.size**self.arity, dtype=bool)
            if ts:
                mask[[rank(t, self.size) for t in ts]] = True
            self._mask = mask
            if spec is not None:
                every = all_tuples(self.size, self.arity, budget)
                if not np.array_equal(spec.contains_array(every, self.size), mask):
                    raise InputError("explicit tuples disagree with the membership descriptor")

    @classmethod
    def diagonal(cls, size: int) -> "Relation":
        return cls(size, 2, [(x, x) for x in range(size)], label="Delta")

    @classmethod
    def full(cls, size: int, arity: int) -> "Relation":
        return cls(size, arity, itertools.product(range(size), repeat=arity), label="full")

    @property
    def is_explicit(self) -> bool:
        return self._mask is not None

    @property
    def materializable(self) -> bool:
        return self._mask is not None or self.size**self.arity <= self.budget

    def _check(self, t: Sequence[int]) -> tuple:
        t = tuple(t)
        if len(t) != self.arity:
            raise InputError(f"tuple {t} has length {len(t)}, relation has arity {self.arity}")
        if any(not 0 <= x < self.size for x in t):
            raise InputError(f"tuple {t} has entries outside the domain of size {self.size}")
        return t

    def __contains__(self, t: Sequence[int]) -> bool:
        t = self._check(t)
        if self._mask is not None:
            return bool(self._mask[rank(t, self.size)])
        return bool(self.spec.contains(t))

    def contains_array(self, arr: np.ndarray) -> np.ndarray:
        """Membership of every row of an ``(N, arity)`` array."""
        if self._mask is not None:
            return self._mask[ranks_of(arr, self.size)]
        return self.spec.contains_array(np.asarray(arr), self.size)

    def mask(self) -> np.ndarray:
        if self._mask is None:
            every = all_tuples(self.size, self.arity, self.budget)
            self._mask = self.spec.contains_array(every, self.size)
        return self._mask

    def members(self) -> np.ndarray:
        """Member tuples as an ``(|rho|, arity)`` array in rank order."""
        if self._members is None:
            self._members = tuples_from_ranks(np.flatnonzero(self.mask()), self.size, self.arity)
        return self._members

    def tuples(self) -> set:
        return {tuple(int(x) for x in row) for row in self.members()}

    def __len__(self) -> int:
        return int(self.mask().sum())

    def _key(self):
        if self.materializable:
            return (self.size, self.arity, self.mask().tobytes())
        return (self.size, self.arity, self.spec)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Relation):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        name = self.label or "Relation"
        return f"<{name}: |A|={self.size}, arity {self.arity}>"

    def to_doc(self) -> dict:
        doc = {"domain_size": self.size, "arity": self.arity}
        if isinstance(self.spec, CentralSpec):
            doc["central"] = self.spec.to_doc()
        else:
            doc["tuples"] = [list(t) for t in sorted(self.tuples())]
        if self.label:
            doc["label"] = self.label
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "Relation":
        try:
            size, arity = int(doc["domain_size"]), int(doc["arity"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"relation document needs integer domain_size and arity: {exc}") from None
        if ("tuples" in doc) == ("central" in doc):
            raise InputError("relation document needs exactly one of 'tuples' or 'central'")
        if "tuples" in doc:
            return cls(size, arity, doc["tuples"], label=doc.get("label"))
        from .rosenberg import make_central
        central = doc["central"]
        rel = make_central(size, arity, central.get("center", []), central.get("tail", []))
        rel.label = doc.get("label", rel.label)
        return rel


def rel_contains(rho: Relation, t: Sequence[int]) -> bool:
    return t in rho


# ---------------------------------------------------------------------------
# operations


class OperationTable:
    """A total ``arity``-ary operation stored as its flat value table."""

    def __init__(self, size: int, arity: int, table: Sequence[int], label: str | None = None):
        self.size = check_size(size, 1)
        if arity < 1:
            raise InputError(f"arity must be positive, got {arity}")
        self.arity = int(arity)
        table = np.asarray(table, dtype=np.int64)
        if table.shape != (self.size**self.arity,):
            raise InputError(f"table must have {self.size}^{self.arity} = {self.size**self.arity} entries")
        if table.size and (table.min() < 0 or table.max() >= self.size):
            raise InputError("table values must lie in the domain")
        table.flags.writeable = False
        self.table = table
        self.label = label

    @classmethod
    def from_function(cls, size: int, arity: int, fn, label: str | None = None) -> "OperationTable":
        return cls(size, arity, [fn(*args) for args in itertools.product(range(size), repeat=arity)], label)

    @classmethod
    def constant(cls, size: int, arity: int, value: int) -> "OperationTable":
        return cls(size, arity, [value] * size**arity, label=f"const{value}")

    def __call__(self, *args: int) -> int:
        return apply(self, args)

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperationTable):
            return NotImplemented
        return (self.size, self.arity) == (other.size, other.arity) and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash((self.size, self.arity, self.table.tobytes()))

    def __repr__(self) -> str:
        return f"OperationTable(size={self.size}, arity={self.arity}, table={self.table.tolist()})"

    def rowwise(self, columns: Sequence[Sequence[int]]) -> tuple:
        """Apply to ``arity`` equally long tuples coordinate by coordinate."""
        if len(columns) != self.arity:
            raise InputError(f"expected {self.arity} tuples, got {len(columns)}")
        return tuple(apply(self, row) for row in zip(*columns))

    def to_doc(self) -> dict:
        return {"domain_size": self.size, "arity": self.arity, "table": self.table.tolist()}

    @classmethod
    def from_doc(cls, doc: dict) -> "OperationTable":
        try:
            return cls(int(doc["domain_size"]), int(doc["arity"]), doc["table"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"operation document needs domain_size, arity and table: {exc}") from None


def apply(f: OperationTable, args: Sequence[int]) -> int:
    if len(args) != f.arity:
        raise InputError(f"operation of arity {f.arity} applied to {len(args)} arguments")
    if any(not 0 <= x < f.size for x in args):
        raise InputError(f"arguments {tuple(args)} outside the domain")
    return int(f.table[rank(args, f.size)])


def projection(size: int, n: int, i: int) -> OperationTable:
    """The projection onto the ``i``-th of ``n`` arguments (1-based)."""
    if not 1 <= i <= n:
        raise InputError(f"projection index {i} out of range 1..{n}")
    every = all_tuples(size, n)
    return OperationTable(size, n, every[:, i - 1], label=f"pi{n}_{i}")


def image_of_relation(f: OperationTable, rho: Relation) -> set:
    """``f(rho)`` for a unary ``f``, computed tuple by tuple."""
    if f.arity != 1:
        raise InputError("image_of_relation needs a unary operation")
    return {tuple(int(f.table[x]) for x in t) for t in rho.tuples()}


# ---------------------------------------------------------------------------
# preservation


@dataclass(frozen=True)
class Violation:
    """Member tuples ``columns`` (one per argument of ``f``) whose rowwise image is not a member."""

    columns: tuple
    image: tuple

    def to_doc(self) -> dict:
        return {"columns": [list(c) for c in self.columns], "image": list(self.image)}


def _check_same_domain(f: OperationTable, rho: Relation) -> None:
    if f.size != rho.size:
        raise InputError(f"operation on a {f.size}-element domain vs relation on {rho.size} elements")


def find_violation(f: OperationTable, rho: Relation,
                   max_selections: int = SELECTION_BUDGET) -> Violation | None:
    """First witness that ``f`` does not preserve ``rho``, or ``None``."""
    _check_same_domain(f, rho)
    if isinstance(rho.spec, CentralSpec):
        return _central_violation(f, rho, max_selections)
    return _column_violation(f, rho, max_selections)


def preserves(f: OperationTable, rho: Relation, max_selections: int = SELECTION_BUDGET) -> bool:
    return find_violation(f, rho, max_selections) is None


def _column_violation(f: OperationTable, rho: Relation, max_selections: int) -> Violation | None:
    # every choice of f.arity member tuples, vectorized in chunks
    members = rho.members().astype(np.int64)
    count, k, h = len(members), f.arity, rho.arity
    if count == 0:
        return None
    total = count**k
    if total > max_selections:
        raise BudgetError(f"{count}^{k} = {total} column selections exceeds the budget of {max_selections}")
    weights = powers(f.size, k)
    sel_pow = count ** np.arange(k - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        choice = (idx[:, None] // sel_pow) % count            # (N, k)
        cols = members[choice]                                  # (N, k, h)
        args = np.einsum("nkh,k->nh", cols, weights)            # (N, h)
        image = f.table[args]
        ok = rho.contains_array(image)
        if not ok.all():
            bad = int(np.argmin(ok))
            return Violation(tuple(tuple(int(x) for x in c) for c in cols[bad]),
                             tuple(int(x) for x in image[bad]))
    return None


def _central_violation(f: OperationTable, rho: Relation, max_selections: int) -> Violation | None:
    # A non-member image has distinct non-central entries outside the tail.
    # rho is totally symmetric, so search image value sets in increasing order
    # and pick one argument row per value.
    spec, h, size, k = rho.spec, rho.arity, f.size, f.arity
    rows = all_tuples(size, k).astype(np.int64)
    noncentral = [v for v in range(size) if v not in spec.center]
    classes = {v: np.flatnonzero(f.table == v) for v in noncentral}
    spent = 0
    for vals in itertools.combinations(noncentral, h):
        if vals in spec.tail:
            continue
        groups = [classes[v] for v in vals]
        sizes = [len(g) for g in groups]
        total = math.prod(sizes)
        if total == 0:
            continue
        spent += total
        if spent > max_selections:
            raise BudgetError(f"central preservation search exceeds the budget of {max_selections} selections")
        gpow = np.array([math.prod(sizes[i + 1:]) for i in range(h)], dtype=np.int64)
        for start in range(0, total, _CHUNK):
            idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
            pick = (idx[:, None] // gpow) % np.array(sizes, dtype=np.int64)
            chosen = np.stack([groups[i][pick[:, i]] for i in range(h)], axis=1)   # (N, h) row ranks
            cols = rows[chosen].transpose(0, 2, 1)                                  # (N, k, h)
            ok = spec.contains_array(cols.reshape(-1, h), size).reshape(-1, k).all(axis=1)
            if ok.any():
                hit = int(np.argmax(ok))
                return Violation(tuple(tuple(int(x) for x in c) for c in cols[hit]), tuple(vals))
    return None
