"""Containment posets of k-ary parts, the central-relation chain, and diagram export."""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import networkx as nx

from .domain import DEFAULT_BUDGET, BudgetError, InputError, Relation, ScopeError, check_size
from .oracle import EnumerationBudget, brute_containment, check_feasible
from .rosenberg import NotCentralError, central_decompose, classify, make_central
from .typecalc import decide_containment, theorem_predicate

STRATEGIES = ("auto", "criterion-only", "brute-only", "theorem-only")
CONTAINED, NOT_CONTAINED, UNKNOWN = "contained", "not-contained", "unknown"


@dataclass
class Entry:
    status: str
    method: str | None = None
    certificate: dict | None = None

    def to_doc(self) -> dict:
        doc = {"status": self.status, "method": self.method}
        if self.certificate is not None:
            doc["certificate"] = self.certificate
        return doc


@dataclass
class ContainmentMatrix:
    relations: list
    k: int
    entries: dict = field(default_factory=dict)

    @property
    def labels(self) -> list[str]:
        return [r.label for r in self.relations]

    def status(self, i: int, j: int) -> str:
        return self.entries[i, j].status

    def contained_graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self.relations)))
        g.add_edges_from((i, j) for (i, j), e in self.entries.items() if i != j and e.status == CONTAINED)
        return g

    def preorder_violations(self) -> list[tuple]:
        """Diagonal entries not contained, and triples breaking transitivity."""
        n = len(self.relations)
        bad = [(i, i) for i in range(n) if self.status(i, i) != CONTAINED]
        for a, b, c in itertools.permutations(range(n), 3):
            if (self.status(a, b) == CONTAINED and self.status(b, c) == CONTAINED
                    and self.status(a, c) == NOT_CONTAINED):
                bad.append((a, b, c))
        return bad

    def hasse(self) -> nx.DiGraph:
        """Covering graph of the parts; mutually contained relations share one node.

        Nodes carry ``members`` (relation indices) and ``label``."""
        cond = nx.condensation(self.contained_graph())
        red = nx.transitive_reduction(cond)
        for v in red.nodes:
            members = sorted(cond.nodes[v]["members"])
            red.nodes[v]["members"] = members
            red.nodes[v]["label"] = " = ".join(self.relations[i].label for i in members)
        return red

    def height(self) -> int:
        """Number of parts in a longest chain."""
        h = self.hasse()
        return nx.dag_longest_path_length(h) + 1 if len(h) else 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, ContainmentMatrix):
            return NotImplemented
        return (self.k == other.k and self.labels == other.labels
                and all(a == b for a, b in zip(self.relations, other.relations))
                and self.entries == other.entries)


# ---------------------------------------------------------------------------
# pair decisions


def _central(rel: Relation):
    try:
        return central_decompose(rel)
    except (NotCentralError, BudgetError):
        return None


def same_clone(rho: Relation, sigma: Relation) -> bool:
    """Known cases of distinct relations defining the same clone: converses
    of binary relations and powers of a permutational relation."""
    if rho.arity != 2 or sigma.arity != 2 or rho.size != sigma.size:
        return False
    n = rho.size
    m, s = rho.mask().reshape(n, n), sigma.mask().reshape(n, n)
    if (m.T == s).all():
        return True
    perm = {c.tag: c.params for c in classify(rho)}.get("Permutational")
    other = {c.tag: c.params for c in classify(sigma)}.get("Permutational")
    if perm is None or other is None:
        return False
    pi, power = perm["permutation"], list(range(n))
    for _ in range(perm["p"] - 1):
        power = [pi[x] for x in power]
        if power == other["permutation"]:
            return True
    return False


def _theorem(rho, sigma, k, dr, ds):
    if k < 2 or dr is None or ds is None or dr.tail:
        return None
    try:
        ok = theorem_predicate(rho, sigma, k)
    except (ScopeError, InputError):
        return None
    return Entry(CONTAINED if ok else NOT_CONTAINED, "theorem")


def _criterion(rho, sigma, k, dr, materialize_budget):
    if dr is None or rho.size < 3:
        return None
    try:
        v = decide_containment(rho, sigma, k, budget=materialize_budget)
    except BudgetError:
        return None
    return Entry(CONTAINED if v.contained else NOT_CONTAINED, "criterion",
                 None if v.contained else v.to_doc()["separation"])


def _brute(rho, sigma, k, budget):
    try:
        check_feasible(rho.size, k, budget)
        v = brute_containment(rho, sigma, k, budget)
    except BudgetError:
        return None
    return Entry(CONTAINED if v.contained else NOT_CONTAINED, "brute",
                 None if v.contained else v.to_doc()["witness"])


def _negative_rule(rho, sigma, k, dr, ds):
    # only nontrivial containments for k >= 2 are between at least binary central relations
    if k < 2 or not classify(rho) or not classify(sigma):
        return None
    if dr is not None and ds is not None and rho.arity >= 2 and sigma.arity >= 2:
        return None
    if same_clone(rho, sigma):
        return Entry(CONTAINED, "same-clone")
    return Entry(NOT_CONTAINED, "non-central")


def decide_pair(rho: Relation, sigma: Relation, k: int, strategy: str = "auto",
                budget: EnumerationBudget = EnumerationBudget(),
                materialize_budget: int = DEFAULT_BUDGET) -> Entry:
    if strategy not in STRATEGIES:
        raise InputError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if rho == sigma:
        return Entry(CONTAINED, "equal")
    dr, ds = _central(rho), _central(sigma)
    steps = {
        "theorem-only": [lambda: _theorem(rho, sigma, k, dr, ds)],
        "criterion-only": [lambda: _criterion(rho, sigma, k, dr, materialize_budget)],
        "brute-only": [lambda: _brute(rho, sigma, k, budget)],
    }
    steps["auto"] = (steps["theorem-only"] + steps["criterion-only"] + steps["brute-only"]
                     + [lambda: _negative_rule(rho, sigma, k, dr, ds)])
    for step in steps[strategy]:
        entry = step()
        if entry is not None:
            return entry
    return Entry(UNKNOWN)


def _job(args):
    return decide_pair(*args)


def build_poset(relations, k: int, strategy: str = "auto",
                budget: EnumerationBudget = EnumerationBudget(),
                materialize_budget: int = DEFAULT_BUDGET, jobs: int = 1) -> ContainmentMatrix:
    """Decide every ordered pair of ``relations`` for ``Pol_k`` containment."""
    relations = list(relations)
    if not relations:
        raise InputError("need at least one relation")
    if len({r.size for r in relations}) != 1:
        raise InputError("all relations must share a domain")
    if k < 1:
        raise InputError(f"k must be at least 1, got {k}")
    if strategy not in STRATEGIES:
        raise InputError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    seen: dict = {}
    for i, r in enumerate(relations):
        if not r.label:
            r.label = f"rel{i}"
        if r.label in seen:
            seen[r.label] += 1
            r.label = f"{r.label}_{seen[r.label]}"
        seen.setdefault(r.label, 0)
    n = len(relations)
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    args = [(relations[i], relations[j], k, strategy, budget, materialize_budget) for i, j in pairs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_job, args))
    else:
        results = [_job(a) for a in args]
    entries = {(i, i): Entry(CONTAINED, "reflexive") for i in range(n)}
    entries.update(zip(pairs, results))
    return ContainmentMatrix(relations, k, entries)


# ---------------------------------------------------------------------------
# the central chain


def central_chain(size: int, k: int, c: int = 0) -> list[Relation]:
    """Central relations of arities ``2k, ..., |A|-1`` with center ``{c}`` and empty tail."""
    size = check_size(size, 3)
    if k < 1:
        raise InputError(f"k must be at least 1, got {k}")
    if size < 2 * k + 1:
        raise InputError(f"the chain needs |A| >= 2k + 1 = {2 * k + 1}, got {size}")
    return [make_central(size, 2 * k + i, [c]) for i in range(size - 2 * k)]


@dataclass
class LinkCheck:
    lower: str
    upper: str
    forward_theorem: bool | None = None
    forward_criterion: bool | None = None
    reverse_theorem: bool | None = None
    reverse_criterion: bool | None = None
    reverse_certificate: dict | None = None
    problems: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems


@dataclass
class ChainReport:
    k: int
    links: list
    height: int
    edges: int

    @property
    def ok(self) -> bool:
        return all(link.ok for link in self.links)

    @property
    def failing(self) -> LinkCheck | None:
        return next((link for link in self.links if not link.ok), None)

    def to_doc(self) -> dict:
        return {"k": self.k, "ok": self.ok, "height": self.height, "edges": self.edges,
                "links": [link.__dict__ | {"ok": link.ok} for link in self.links]}


def _safe_theorem(rho, sigma, k, problems, what):
    try:
        return theorem_predicate(rho, sigma, k)
    except (InputError, ScopeError) as exc:
        problems.append(f"{what}: {exc}")
        return None


def verify_chain(chain, k: int, budget: int = DEFAULT_BUDGET, criterion: bool = True) -> ChainReport:
    """Check each consecutive link forward (contained) and backward (not contained).

    The criterion search runs wherever ``|A|**arity`` fits ``budget``; reverse
    separations are re-validated."""
    chain = list(chain)
    links = []
    for lo, hi in zip(chain, chain[1:]):
        link = LinkCheck(lo.label, hi.label)
        p = link.problems
        link.forward_theorem = _safe_theorem(lo, hi, k, p, "forward theorem")
        if link.forward_theorem is False:
            p.append("forward theorem condition fails")
        link.reverse_theorem = _safe_theorem(hi, lo, k, p, "reverse theorem")
        if link.reverse_theorem:
            p.append("reverse theorem condition holds; link is not strict")
        if criterion and hi.size**hi.arity <= budget:
            link.forward_criterion = decide_containment(lo, hi, k, budget).contained
            if not link.forward_criterion:
                p.append("criterion finds no forward containment")
        if criterion and lo.size**lo.arity <= budget:
            v = decide_containment(hi, lo, k, budget)
            link.reverse_criterion = v.contained
            if v.contained:
                p.append("criterion finds reverse containment")
            else:
                link.reverse_certificate = v.to_doc()["separation"]
                p.extend(f"reverse certificate: {q}" for q in v.certificate.problems(hi, lo))
        links.append(link)
    height = build_poset(chain, k, "theorem-only").height() if chain else 0
    return ChainReport(k, links, height, max(height - 1, 0))


# ---------------------------------------------------------------------------
# export


def export(matrix: ContainmentMatrix, fmt: str = "json") -> str:
    if fmt == "dot":
        h = matrix.hasse()
        lines = ["digraph poset {", "  rankdir=BT;"]
        for v in sorted(h.nodes):
            lines.append(f'  n{v} [label="{h.nodes[v]["label"]}"];')
        for u, v in sorted(h.edges):
            lines.append(f"  n{u} -> n{v};")
        lines.append("}")
        return "\n".join(lines) + "\n"
    if fmt == "json":
        labels = matrix.labels
        doc = {
            "k": matrix.k,
            "nodes": [{"label": r.label, "relation": r.to_doc()} for r in matrix.relations],
            "entries": [{"from": labels[i], "to": labels[j], **e.to_doc()}
                        for (i, j), e in sorted(matrix.entries.items())],
        }
        return json.dumps(doc, indent=2)
    raise InputError(f"unknown export format {fmt!r}; expected 'dot' or 'json'")


def load_matrix(text: str) -> ContainmentMatrix:
    doc = json.loads(text)
    relations = []
    for node in doc["nodes"]:
        rel = Relation.from_doc(node["relation"])
        rel.label = node["label"]
        relations.append(rel)
    index = {r.label: i for i, r in enumerate(relations)}
    entries = {(index[e["from"]], index[e["to"]]): Entry(e["status"], e.get("method"), e.get("certificate"))
               for e in doc["entries"]}
    return ContainmentMatrix(relations, int(doc["k"]), entries)
