"""Command line front end.

Exit status: 0 when a result was decided (including "not contained"), 2 when
the answer is unknown or a budget refused the job, 1 on input errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .domain import DEFAULT_BUDGET, BudgetError, InputError, OperationTable, Relation, ScopeError, find_violation
from .oracle import EnumerationBudget, brute_containment
from .poset import UNKNOWN, build_poset, central_chain, export, verify_chain, STRATEGIES
from .rosenberg import catalog, central_decompose, classify
from .typecalc import ContainmentVerdict, Separation, decide_containment, theorem_predicate, type_of

COMMANDS = ("classify", "preserves", "type", "decide", "brute", "chain", "poset", "catalog")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _tuple(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def _load(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _relation(path: str) -> Relation:
    return Relation.from_doc(_load(path))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kclones", description="k-ary parts of maximal clones on a finite set")
    p.add_argument("--output", "-o", help="write the result here instead of standard output")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify", help="Rosenberg classes of a relation")
    c.add_argument("--rho", required=True)

    c = sub.add_parser("preserves", help="does an operation preserve a relation")
    c.add_argument("--op", required=True)
    c.add_argument("--rho", required=True)

    c = sub.add_parser("type", help="type of a tuple w.r.t. a central relation")
    c.add_argument("--rho", required=True)
    c.add_argument("--tuple", required=True, type=_tuple)

    c = sub.add_parser("decide", help="decide Pol_k rho <= Pol_k sigma for central rho")
    c.add_argument("--rho", required=True)
    c.add_argument("--sigma", required=True)
    c.add_argument("--k", required=True, type=_positive)
    c.add_argument("--method", choices=("auto", "criterion", "theorem"), default="auto")
    c.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET, help="materialization budget")
    c.add_argument("--check-certificate", metavar="VERDICT",
                   help="re-validate a previously emitted verdict instead of deciding")

    c = sub.add_parser("brute", help="containment by enumerating every k-ary table")
    c.add_argument("--rho", required=True)
    c.add_argument("--sigma", required=True)
    c.add_argument("--k", required=True, type=_positive)
    c.add_argument("--max-tables", type=_positive, default=EnumerationBudget.max_tables)
    c.add_argument("--max-seconds", type=_positive, default=EnumerationBudget.max_seconds)

    c = sub.add_parser("chain", help="the central-relation chain")
    c.add_argument("--domain", required=True, type=_positive)
    c.add_argument("--k", required=True, type=_positive)
    c.add_argument("--center", type=int, default=0)
    c.add_argument("--verify", action="store_true")

    c = sub.add_parser("poset", help="containment poset of k-ary parts")
    src = c.add_mutually_exclusive_group(required=True)
    src.add_argument("--relations", help="JSON array of relation documents")
    src.add_argument("--catalog", type=_positive, metavar="N", help="use the catalog on N elements")
    c.add_argument("--max-arity", type=_positive, default=3)
    c.add_argument("--k", required=True, type=_positive)
    c.add_argument("--strategy", choices=STRATEGIES, default="auto")
    c.add_argument("--format", choices=("json", "dot"), default="json")
    c.add_argument("--max-tables", type=_positive, default=EnumerationBudget.max_tables)
    c.add_argument("--max-seconds", type=_positive, default=EnumerationBudget.max_seconds)
    c.add_argument("--jobs", type=_positive, default=1)

    c = sub.add_parser("catalog", help="all Rosenberg relations on a small domain")
    c.add_argument("--domain", required=True, type=_positive)
    c.add_argument("--max-arity", type=_positive, default=3)
    return p


def parse(argv) -> argparse.Namespace:
    return build_parser().parse_args(argv)


# ---------------------------------------------------------------------------


def _decide(inv) -> tuple[int, dict]:
    rho, sigma = _relation(inv.rho), _relation(inv.sigma)
    if inv.check_certificate:
        verdict = ContainmentVerdict.from_doc(_load(inv.check_certificate))
        if not isinstance(verdict.certificate, Separation):
            raise InputError("verdict carries no separation certificate")
        problems = verdict.certificate.problems(rho, sigma)
        return (0 if not problems else 1), {"valid": not problems, "problems": problems}
    if inv.method in ("auto", "criterion"):
        try:
            return 0, decide_containment(rho, sigma, inv.k, budget=inv.budget).to_doc()
        except BudgetError:
            if inv.method == "criterion":
                raise
    try:
        return 0, {"contained": theorem_predicate(rho, sigma, inv.k), "method": "theorem"}
    except ScopeError as exc:
        return 2, {"contained": None, "method": "theorem", "note": str(exc)}


def execute(inv: argparse.Namespace) -> tuple[int, str]:
    """Run a parsed invocation; returns the exit status and the text to emit."""
    cmd = inv.command
    status = 0
    if cmd == "classify":
        doc = {"classes": [c.to_doc() for c in classify(_relation(inv.rho))]}
    elif cmd == "preserves":
        f, rho = OperationTable.from_doc(_load(inv.op)), _relation(inv.rho)
        v = find_violation(f, rho)
        doc = {"preserves": v is None}
        if v is not None:
            doc["violation"] = v.to_doc()
    elif cmd == "type":
        doc = type_of(_relation(inv.rho), inv.tuple).to_doc()
    elif cmd == "decide":
        status, doc = _decide(inv)
    elif cmd == "brute":
        budget = EnumerationBudget(inv.max_tables, inv.max_seconds)
        doc = brute_containment(_relation(inv.rho), _relation(inv.sigma), inv.k, budget).to_doc()
    elif cmd == "chain":
        chain = central_chain(inv.domain, inv.k, inv.center)
        doc = {"relations": [r.to_doc() for r in chain]}
        if inv.verify:
            report = verify_chain(chain, inv.k)
            doc["verification"] = report.to_doc()
            status = 0 if report.ok else 1
    elif cmd == "poset":
        if inv.relations:
            docs = _load(inv.relations)
            if not isinstance(docs, list):
                raise InputError("--relations must hold a JSON array of relation documents")
            rels = [Relation.from_doc(d) for d in docs]
        else:
            rels = [e.relation for e in catalog(inv.catalog, inv.max_arity)]
        budget = EnumerationBudget(inv.max_tables, inv.max_seconds)
        matrix = build_poset(rels, inv.k, inv.strategy, budget, jobs=inv.jobs)
        if any(e.status == UNKNOWN for e in matrix.entries.values()):
            status = 2
        return status, export(matrix, inv.format)
    elif cmd == "catalog":
        doc = [e.to_doc() for e in catalog(inv.domain, inv.max_arity)]
    else:  # pragma: no cover - argparse restricts the choices
        raise InputError(f"unknown command {cmd!r}")
    return status, json.dumps(doc, indent=2)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        inv = parse(argv)
        status, text = execute(inv)
    except BudgetError as exc:
        status, text = 2, json.dumps({"error": str(exc), "kind": "budget"})
    except (InputError, ScopeError) as exc:
        status, text = 1, json.dumps({"error": str(exc), "kind": "input"})
    out = getattr(locals().get("inv"), "output", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
