"""Brute-force ground truth on small domains and the binary witness operations
separating k-ary parts of non-central Rosenberg clones."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .domain import (BudgetError, InputError, OperationTable, Relation, Violation, check_size,
                     find_violation, powers)
from .rosenberg import classify

SELECTION_LIMIT = 10**6


@dataclass(frozen=True)
class EnumerationBudget:
    max_tables: int = 10**8
    max_seconds: float = 600

    def __post_init__(self):
        if self.max_tables <= 0 or self.max_seconds <= 0:
            raise InputError("budget limits must be positive")


def table_count(size: int, k: int) -> int:
    return size ** (size**k)


def check_feasible(size: int, k: int, budget: EnumerationBudget) -> int:
    total = table_count(size, k)
    if total > budget.max_tables:
        raise BudgetError(f"enumerating {size}^{size**k} = {total} tables of arity {k} exceeds "
                          f"max_tables = {budget.max_tables}")
    return total


def iter_tables(size: int, k: int, budget: EnumerationBudget,
                chunk: int = 1 << 15) -> Iterator[tuple[int, np.ndarray]]:
    """All k-ary tables in lexicographic order of the flat table, in chunks ``(start, tables)``."""
    total = check_feasible(size, k, budget)
    width = size**k
    pw = powers(size, width)
    t0 = time.monotonic()
    for start in range(0, total, chunk):
        if time.monotonic() - t0 > budget.max_seconds:
            raise BudgetError(f"enumeration exceeded max_seconds = {budget.max_seconds} at table {start}")
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        yield start, (idx[:, None] // pw) % size


def _argument_ranks(rho: Relation, k: int) -> np.ndarray:
    # one row per choice of k member tuples: the argument rank at each coordinate
    members = rho.members().astype(np.int64)
    count = len(members)
    if count**k > SELECTION_LIMIT:
        raise BudgetError(f"{count}^{k} column selections exceeds {SELECTION_LIMIT}")
    grids = np.stack(np.meshgrid(*[np.arange(count)] * k, indexing="ij"), axis=-1).reshape(-1, k)
    args = np.einsum("ckh,k->ch", members[grids], powers(rho.size, k))
    return np.unique(args, axis=0)


def preserving_mask(tables: np.ndarray, rho: Relation, k: int) -> np.ndarray:
    """Which rows of a batch of k-ary tables preserve ``rho``."""
    ok = np.ones(len(tables), dtype=bool)
    if len(tables) == 0 or len(rho.members()) == 0:
        return ok
    args = _argument_ranks(rho, k)
    mask = rho.mask()
    pw = powers(rho.size, rho.arity)
    step = max(1, (1 << 22) // args.size)
    for s in range(0, len(tables), step):
        images = tables[s:s + step][:, args]          # (N, C, h)
        ok[s:s + step] = mask[images @ pw].all(axis=1)
    return ok


@dataclass
class PolkCount:
    count: int
    tables: np.ndarray | None = None


def enumerate_polk(rho: Relation, k: int, budget: EnumerationBudget = EnumerationBudget(),
                   materialize: bool = False) -> PolkCount:
    """Count (and optionally collect) all k-ary tables preserving ``rho``."""
    if k < 1:
        raise InputError(f"k must be at least 1, got {k}")
    count, kept = 0, []
    for _, tables in iter_tables(rho.size, k, budget):
        ok = preserving_mask(tables, rho, k)
        count += int(ok.sum())
        if materialize:
            kept.append(tables[ok])
    return PolkCount(count, np.concatenate(kept) if materialize else None)


@dataclass
class BruteVerdict:
    contained: bool
    witness: OperationTable | None = None
    violation: Violation | None = None
    method: str = "enumeration"

    def __bool__(self) -> bool:
        return self.contained

    def to_doc(self) -> dict:
        doc = {"contained": self.contained, "method": self.method}
        if self.witness is not None:
            doc["witness"] = witness_doc(self.witness, self.violation)
        return doc


def witness_doc(f: OperationTable, violation: Violation | None) -> dict:
    doc = f.to_doc()
    if violation is not None:
        doc["violation"] = violation.to_doc()
    return doc


def brute_containment(rho: Relation, sigma: Relation, k: int,
                      budget: EnumerationBudget = EnumerationBudget(),
                      delegate: bool = False) -> BruteVerdict:
    """``Pol_k rho <= Pol_k sigma`` by enumerating every k-ary table.

    On failure the lexicographically first separating table is returned.  With
    ``delegate`` an infeasible enumeration falls back to a criterion separation
    certificate, verified directly; positive answers are never delegated.
    """
    if rho.size != sigma.size:
        raise InputError("rho and sigma live on different domains")
    if k < 1:
        raise InputError(f"k must be at least 1, got {k}")
    try:
        check_feasible(rho.size, k, budget)
    except BudgetError:
        if not delegate:
            raise
        return _delegated(rho, sigma, k)
    for _, tables in iter_tables(rho.size, k, budget):
        cand = tables[preserving_mask(tables, rho, k)]
        bad = ~preserving_mask(cand, sigma, k)
        if bad.any():
            w = OperationTable(rho.size, k, cand[int(np.argmax(bad))], label="witness")
            return BruteVerdict(False, w, find_violation(w, sigma))
    return BruteVerdict(True)


def _delegated(rho: Relation, sigma: Relation, k: int) -> BruteVerdict:
    from .typecalc import decide_containment

    verdict = decide_containment(rho, sigma, k)
    if verdict.contained:
        raise BudgetError("enumeration infeasible and the criterion reports containment; "
                          "no checkable negative certificate")
    cert = verdict.certificate
    problems = cert.problems(rho, sigma)
    if problems:
        raise RuntimeError(f"separation certificate failed verification: {problems}")
    image = cert.operation.rowwise(cert.a_tuples)
    return BruteVerdict(False, cert.operation, Violation(tuple(cert.a_tuples), image), "certificate")


# ---------------------------------------------------------------------------
# witness operations for non-containment


WITNESS_KINDS = ("order_f", "order_g", "order_threshold", "equiv_star", "regular_star",
                 "unary_central_star")


def _bounds(order: Relation) -> tuple[int, int, np.ndarray]:
    for c in classify(order):
        if c.tag == "BoundedOrder":
            n = order.size
            return c.params["least"], c.params["greatest"], order.mask().reshape(n, n)
    raise InputError("relation is not a bounded partial order")


def binary_witness(kind: str, size: int, *, order: Relation | None = None, a: int | None = None,
                   b: int | None = None, c1: int | None = None, center=None, unary=None) -> OperationTable:
    """Binary witness operations.

    ``order_f``, ``order_g`` and ``order_threshold`` (with ``a``, ``b``) need the
    bounded ``order``; ``equiv_star`` needs ``c1``; ``regular_star`` the center
    ``center`` of the central relation; ``unary_central_star`` the set ``unary``.
    """
    size = check_size(size, 3)
    if kind in ("order_f", "order_g", "order_threshold"):
        if order is None or order.size != size:
            raise InputError(f"{kind} needs a bounded order on the same domain")
        bot, top, le = _bounds(order)
        if kind == "order_f":
            fn = lambda x, y: x if y == top else (y if x == top else bot)
        elif kind == "order_g":
            fn = lambda x, y: x if y == bot else (y if x == bot else top)
        else:
            if a is None or b is None or not (0 <= a < size and 0 <= b < size):
                raise InputError("order_threshold needs a and b in the domain")
            fn = lambda x, y: bot if le[x, a] and le[y, b] else x
    elif kind == "equiv_star":
        if c1 is None or not 0 <= c1 < size:
            raise InputError("equiv_star needs c1 in the domain")
        fn = lambda x, y: c1 if x == c1 else y
    elif kind == "regular_star":
        z = set(center or ())
        if not z or any(not 0 <= c < size for c in z):
            raise InputError("regular_star needs a nonempty center")
        fn = lambda x, y: y if y in z else x
    elif kind == "unary_central_star":
        u = set(unary or ())
        if not u or len(u) == size or any(not 0 <= c < size for c in u):
            raise InputError("unary_central_star needs a proper nonempty subset")
        fn = lambda x, y: y if x in u else x
    else:
        raise InputError(f"unknown witness kind {kind!r}; expected one of {WITNESS_KINDS}")
    return OperationTable.from_function(size, 2, fn, label=kind)
