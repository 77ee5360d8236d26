"""Types of tuples with respect to a central relation and the containment criterion.

For an ``n``-ary central relation ``rho`` and ``a`` in ``A**m`` the type of
``a`` is the pair (index ``n``-subsets whose entries form a ``rho``-tuple,
index pairs with equal entries).  ``Pol_k rho`` is contained in ``Pol_k sigma``
exactly when no meet of ``k`` types of ``sigma``-members lies below the type
of a non-member; :func:`decide_containment` searches that condition over
distinct type signatures (packed bit rows) rather than raw tuples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .domain import (DEFAULT_BUDGET, BudgetError, InputError, OperationTable, Relation, ScopeError,
                     all_tuples, check_size, find_violation, rank)
from .rosenberg import central_decompose

MEET_BUDGET = 5 * 10**6


@dataclass(frozen=True)
class TypePair:
    """``tau1``: increasing 1-based index n-tuples; ``tau2``: 1-based index pairs ``i < j``."""

    n: int
    m: int
    tau1: frozenset
    tau2: frozenset

    @classmethod
    def full(cls, n: int, m: int) -> "TypePair":
        return cls(n, m, frozenset(itertools.combinations(range(1, m + 1), n)),
                   frozenset(itertools.combinations(range(1, m + 1), 2)))

    @classmethod
    def empty(cls, n: int, m: int) -> "TypePair":
        return cls(n, m, frozenset(), frozenset())

    def __and__(self, other: "TypePair") -> "TypePair":
        return type_meet(self, other)

    def __le__(self, other: "TypePair") -> bool:
        return type_leq(self, other)

    def is_empty(self) -> bool:
        return not self.tau1 and not self.tau2

    def to_doc(self) -> dict:
        return {"n": self.n, "m": self.m, "tau1": sorted(map(list, self.tau1)),
                "tau2": sorted(map(list, self.tau2))}


def _same_shape(t1: TypePair, t2: TypePair) -> None:
    if (t1.n, t1.m) != (t2.n, t2.m):
        raise InputError(f"type shapes differ: (n, m) = {(t1.n, t1.m)} vs {(t2.n, t2.m)}")


def type_meet(t1: TypePair, t2: TypePair) -> TypePair:
    _same_shape(t1, t2)
    return TypePair(t1.n, t1.m, t1.tau1 & t2.tau1, t1.tau2 & t2.tau2)


def type_leq(t1: TypePair, t2: TypePair) -> bool:
    _same_shape(t1, t2)
    return t1.tau1 <= t2.tau1 and t1.tau2 <= t2.tau2


def _layout(n: int, m: int) -> tuple[list, list]:
    return list(itertools.combinations(range(m), n)), list(itertools.combinations(range(m), 2))


def _type_bits(rho: Relation, arr: np.ndarray) -> np.ndarray:
    """Bool matrix ``(N, C(m, n) + C(m, 2))``; tau1 bits first.  ``n > m`` gives no tau1 bits."""
    m = arr.shape[1]
    subsets, pairs = _layout(rho.arity, m)
    cols = [rho.contains_array(arr[:, list(s)]) for s in subsets]
    cols += [arr[:, i] == arr[:, j] for i, j in pairs]
    if not cols:
        return np.zeros((len(arr), 0), dtype=bool)
    return np.stack(cols, axis=1)


def _bits_to_type(bits: np.ndarray, n: int, m: int) -> TypePair:
    subsets, pairs = _layout(n, m)
    bits = np.asarray(bits, dtype=bool)
    t1 = frozenset(tuple(i + 1 for i in s) for s, b in zip(subsets, bits[:len(subsets)]) if b)
    t2 = frozenset((i + 1, j + 1) for (i, j), b in zip(pairs, bits[len(subsets):]) if b)
    return TypePair(n, m, t1, t2)


def _type(rho: Relation, a) -> TypePair:
    a = tuple(int(x) for x in a)
    if any(not 0 <= x < rho.size for x in a):
        raise InputError(f"tuple {a} has entries outside the domain")
    bits = _type_bits(rho, np.array([a], dtype=np.int64))[0]
    return _bits_to_type(bits, rho.arity, len(a))


def type_of(rho: Relation, a) -> TypePair:
    """Type of the tuple ``a`` with respect to the central relation ``rho``."""
    central_decompose(rho)
    if rho.arity > len(a):
        raise InputError(f"relation arity {rho.arity} exceeds tuple length {len(a)}")
    return _type(rho, a)


def _meet_all(types) -> TypePair:
    types = list(types)
    out = types[0]
    for t in types[1:]:
        out = type_meet(out, t)
    return out


# ---------------------------------------------------------------------------
# interpolation and certificates


def interpolant(rho: Relation, a_tuples, b) -> OperationTable:
    """The k-ary operation sending row ``i`` of the ``a``'s to ``b_i`` and everything else to a central element."""
    dec = central_decompose(rho)
    a_tuples = [tuple(int(x) for x in a) for a in a_tuples]
    b = tuple(int(x) for x in b)
    if not a_tuples:
        raise InputError("need at least one tuple")
    if any(len(a) != len(b) for a in a_tuples):
        raise InputError("all tuples must have the same length as b")
    meet = _meet_all(_type(rho, a) for a in a_tuples)
    if not type_leq(meet, _type(rho, b)):
        raise InputError("type meet of the a-tuples is not below the type of b")
    size, k = rho.size, len(a_tuples)
    table = np.full(size**k, min(dec.center), dtype=np.int64)
    for i, row in enumerate(zip(*a_tuples)):
        table[rank(row, size)] = b[i]
    return OperationTable(size, k, table, label="interpolant")


@dataclass
class CriterionPass:
    """Statistics of a successful criterion search."""

    signatures: int
    minimal_signatures: int
    meets: int
    outside_types: int
    obligations: int

    def to_doc(self) -> dict:
        return {"signatures": self.signatures, "minimal_signatures": self.minimal_signatures,
                "meets": self.meets, "outside_types": self.outside_types,
                "obligations": self.obligations}


@dataclass
class Separation:
    """Members ``a_tuples`` of sigma and a non-member ``b`` with ``f(a_1..a_k) = b`` for an ``f`` preserving rho."""

    a_tuples: tuple
    b: tuple
    operation: OperationTable

    def problems(self, rho: Relation, sigma: Relation) -> list[str]:
        """Re-check every separation condition; an empty list means the certificate is valid."""
        out = []
        for a in self.a_tuples:
            if tuple(a) not in sigma:
                out.append(f"{tuple(a)} is not in sigma")
        if tuple(self.b) in sigma:
            out.append(f"b = {tuple(self.b)} is in sigma")
        meet = _meet_all(_type(rho, a) for a in self.a_tuples)
        if not type_leq(meet, _type(rho, self.b)):
            out.append("type meet is not below type(b)")
        if self.operation.arity != len(self.a_tuples):
            out.append("operation arity differs from the number of a-tuples")
        elif self.operation.rowwise(self.a_tuples) != tuple(self.b):
            out.append("operation does not map the a-tuples to b")
        violation = find_violation(self.operation, rho)
        if violation is not None:
            out.append(f"operation does not preserve rho: {violation}")
        return out

    def to_doc(self) -> dict:
        return {"a_tuples": [list(a) for a in self.a_tuples], "b": list(self.b),
                "interpolant": self.operation.to_doc()}

    @classmethod
    def from_doc(cls, doc: dict) -> "Separation":
        try:
            return cls(tuple(tuple(a) for a in doc["a_tuples"]), tuple(doc["b"]),
                       OperationTable.from_doc(doc["interpolant"]))
        except KeyError as exc:
            raise InputError(f"separation certificate lacks {exc}") from None


@dataclass
class ContainmentVerdict:
    contained: bool
    method: str = "criterion"
    certificate: CriterionPass | Separation | None = field(default=None)

    def __bool__(self) -> bool:
        return self.contained

    def to_doc(self) -> dict:
        doc = {"contained": self.contained, "method": self.method}
        if isinstance(self.certificate, Separation):
            doc["separation"] = self.certificate.to_doc()
        elif isinstance(self.certificate, CriterionPass):
            doc["statistics"] = self.certificate.to_doc()
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "ContainmentVerdict":
        cert = None
        if "separation" in doc:
            cert = Separation.from_doc(doc["separation"])
        elif "statistics" in doc:
            cert = CriterionPass(**doc["statistics"])
        return cls(bool(doc["contained"]), doc.get("method", "criterion"), cert)


# ---------------------------------------------------------------------------
# antichains of packed bit rows


def _popcount(rows: np.ndarray) -> np.ndarray:
    return np.unpackbits(rows, axis=1).sum(axis=1)


def _subset_any(rows: np.ndarray, of: np.ndarray, chunk: int = 1 << 22) -> np.ndarray:
    """For each row: is some row of ``of`` a subset of it?"""
    out = np.zeros(len(rows), dtype=bool)
    if len(of) == 0 or len(rows) == 0:
        return out
    step = max(1, chunk // (len(of) * rows.shape[1] + 1))
    for s in range(0, len(rows), step):
        r = rows[s:s + step]
        out[s:s + step] = ((of[None, :, :] & ~r[:, None, :]) == 0).all(axis=2).any(axis=1)
    return out


def _minimal(rows: np.ndarray) -> np.ndarray:
    """Indices of the inclusion-minimal rows among distinct ``rows``."""
    pop = _popcount(rows)
    kept = np.empty(0, dtype=np.int64)
    for p in np.unique(pop):
        layer = np.flatnonzero(pop == p)
        layer = layer[~_subset_any(rows[layer], rows[kept])]
        kept = np.concatenate([kept, layer])
    return kept


def _maximal(rows: np.ndarray) -> np.ndarray:
    return _minimal(~rows)


def _first_below(meets: np.ndarray, outs: np.ndarray, chunk: int = 1 << 22):
    """First pair ``(i, j)`` with ``meets[i]`` a subset of ``outs[j]``."""
    step = max(1, chunk // (len(outs) * meets.shape[1] + 1))
    for s in range(0, len(meets), step):
        r = meets[s:s + step]
        below = ((r[:, None, :] & ~outs[None, :, :]) == 0).all(axis=2)
        if below.any():
            i, j = np.argwhere(below)[0]
            return s + int(i), int(j)
    return None


# ---------------------------------------------------------------------------
# the decision procedure


def decide_containment(rho: Relation, sigma: Relation, k: int,
                       budget: int = DEFAULT_BUDGET, max_meets: int = MEET_BUDGET) -> ContainmentVerdict:
    """Decide ``Pol_k rho <= Pol_k sigma`` for central ``rho`` and arbitrary ``sigma``."""
    central_decompose(rho)
    size = check_size(rho.size, 3)
    if sigma.size != size:
        raise InputError("rho and sigma live on different domains")
    if k < 1:
        raise InputError(f"k must be at least 1, got {k}")
    m = sigma.arity
    every = all_tuples(size, m, budget)
    inside = sigma.contains_array(every)
    if inside.all() or not inside.any():
        return ContainmentVerdict(True, "criterion", CriterionPass(int(inside.any()), 0, 0, 0, 0))

    packed = np.packbits(_type_bits(rho, every), axis=1)
    sig, sig_first = np.unique(packed[inside], axis=0, return_index=True)
    reps = every[inside][sig_first]
    outs, out_first = np.unique(packed[~inside], axis=0, return_index=True)
    out_reps = every[~inside][out_first]

    base = _minimal(sig)
    S = sig[base]
    top = _maximal(outs)
    Q = outs[top]

    # meets of up to k signatures; prov rows list the signatures used, padded by repetition
    meets = S
    prov = np.repeat(base[:, None], k, axis=1)
    for j in range(1, k):
        if not _popcount(meets).all():
            break
        if len(meets) * len(S) > max_meets:
            raise BudgetError(f"meet closure frontier {len(meets)} x {len(S)} exceeds {max_meets} "
                              f"(level {j + 1} of {k})")
        cand = (meets[:, None, :] & S[None, :, :]).reshape(-1, meets.shape[1])
        cprov = np.repeat(prov, len(S), axis=0)
        cprov[:, j] = np.tile(base, len(meets))
        allm = np.concatenate([meets, cand])
        allp = np.concatenate([prov, cprov])
        uniq, first = np.unique(allm, axis=0, return_index=True)
        keep = _minimal(uniq)
        new_meets, new_prov = uniq[keep], allp[first[keep]]
        if len(new_meets) == len(meets) and (np.unique(new_meets, axis=0) == np.unique(meets, axis=0)).all():
            break
        meets, prov = new_meets, new_prov

    hit = _first_below(meets, Q)
    if hit is None:
        return ContainmentVerdict(True, "criterion", CriterionPass(
            len(sig), len(S), len(meets), len(Q), len(meets) * len(Q)))
    i, j = hit
    a_tuples = tuple(tuple(int(x) for x in reps[s]) for s in prov[i])
    b = tuple(int(x) for x in out_reps[top[j]])
    return ContainmentVerdict(False, "criterion", Separation(a_tuples, b, interpolant(rho, a_tuples, b)))


def theorem_predicate(rho: Relation, sigma: Relation, k: int) -> bool:
    """Arity/center/tail condition characterizing containment for distinct central relations with empty tail on rho."""
    dr, ds = central_decompose(rho), central_decompose(sigma)
    size = check_size(rho.size, 3)
    if sigma.size != size:
        raise InputError("rho and sigma live on different domains")
    if k < 2:
        raise InputError(f"the arity condition needs k >= 2, got {k}")
    if dr.tail:
        raise ScopeError("rho has a nonempty tail; use decide_containment")
    if (dr.arity, dr.center, dr.tail) == (ds.arity, ds.center, ds.tail):
        raise InputError("rho and sigma must be distinct")
    return (2 * k <= dr.arity < ds.arity <= size - 1 and dr.center == ds.center and not ds.tail)


def empty_type_family(sigma: Relation, n: int, k: int) -> list[tuple]:
    """``k`` members of ``sigma`` whose types w.r.t. the ``n``-ary central relation
    with the same center and empty tail meet to ``(empty, empty)``."""
    ds = central_decompose(sigma)
    size, m = check_size(sigma.size, 3), sigma.arity
    if ds.tail:
        raise InputError("sigma must have an empty tail")
    if k < 2:
        # with k = 1 only n = 1 qualifies, and every member of sigma has a nonempty type
        raise InputError(f"need k >= 2, got k={k}")
    if not 1 <= n < m:
        raise InputError(f"need 1 <= n < m, got n={n}, m={m}")
    if not n < 2 * k:
        raise InputError(f"need n < 2k, got n={n}, k={k}")
    noncentral = [x for x in range(size) if x not in ds.center]
    if len(noncentral) < m:
        raise InputError(f"only {len(noncentral)} non-central elements for length {m}")
    b = noncentral[:m]
    c = min(ds.center)
    half = n // 2
    special = n % 2 == 0 and m == n + 1
    out = []
    for i in range(half if special else half + 1):
        others = iter(b[:i] + b[i + 1:])
        out.append(tuple(b[i] if p in (2 * i, 2 * i + 1) else next(others) for p in range(m)))
    if special or n == 1:
        # for n = 1 a single repeated pair would survive the meet
        out.append(tuple(b[:m - 1]) + (c,))
    while len(out) < k:
        out.append(out[0])
    return out
