import json

import pytest

from kclones.cli import main, parse
from kclones.domain import InputError, Relation
from kclones.rosenberg import make_central


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)
    return write


def run(argv, capsys):
    status = main(argv)
    return status, capsys.readouterr().out


def test_parse_examples():
    inv = parse(["decide", "--rho", "rho.json", "--sigma", "sigma.json", "--k", "2", "--method", "auto"])
    assert (inv.command, inv.k, inv.method) == ("decide", 2, "auto")
    inv = parse(["chain", "--domain", "8", "--k", "2", "--center", "0", "--verify"])
    assert (inv.command, inv.domain, inv.k, inv.center, inv.verify) == ("chain", 8, 2, 0, True)
    with pytest.raises(InputError, match="--k"):
        parse(["decide", "--rho", "a", "--sigma", "b", "--k", "0"])
    with pytest.raises(InputError):
        parse(["frobnicate"])


def test_decide_positive(files, capsys):
    rho = files("rho.json", make_central(6, 4, [0]).to_doc())
    sigma = files("sigma.json", make_central(6, 5, [0]).to_doc())
    status, out = run(["decide", "--rho", rho, "--sigma", sigma, "--k", "2"], capsys)
    doc = json.loads(out)
    assert status == 0
    assert doc["contained"] is True and doc["method"] == "criterion"


def test_decide_theorem_method(files, capsys):
    rho = files("rho.json", make_central(6, 4, [0]).to_doc())
    sigma = files("sigma.json", make_central(6, 5, [0]).to_doc())
    status, out = run(["decide", "--rho", rho, "--sigma", sigma, "--k", "2", "--method", "theorem"], capsys)
    assert status == 0 and json.loads(out) == {"contained": True, "method": "theorem"}


def test_decide_negative_and_check_certificate(files, capsys, tmp_path):
    rho = files("rho.json", make_central(4, 2, [0]).to_doc())
    sigma = files("sigma.json", make_central(4, 3, [0]).to_doc())
    verdict = str(tmp_path / "verdict.json")
    status, _ = run(["-o", verdict, "decide", "--rho", rho, "--sigma", sigma, "--k", "2"], capsys)
    assert status == 0
    doc = json.loads(open(verdict).read())
    assert doc["contained"] is False and "interpolant" in doc["separation"]
    status, out = run(["decide", "--rho", rho, "--sigma", sigma, "--k", "2", "--check-certificate", verdict],
                      capsys)
    assert status == 0 and json.loads(out)["valid"] is True
    doc["separation"]["b"] = doc["separation"]["a_tuples"][0]
    bad = files("bad.json", doc)
    status, out = run(["decide", "--rho", rho, "--sigma", sigma, "--k", "2", "--check-certificate", bad],
                      capsys)
    assert status == 1 and json.loads(out)["valid"] is False


def test_brute_refuses_without_budget(files, capsys):
    rho = files("rho.json", make_central(4, 2, [0]).to_doc())
    sigma = files("sigma.json", make_central(4, 3, [0]).to_doc())
    status, out = run(["brute", "--rho", rho, "--sigma", sigma, "--k", "2"], capsys)
    doc = json.loads(out)
    assert status == 2 and doc["kind"] == "budget" and "4^16" in doc["error"]


def test_brute_small(files, capsys):
    rho = files("rho.json", make_central(3, 2, [0]).to_doc())
    sigma = files("sigma.json", Relation(3, 2, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0)]).to_doc())
    status, out = run(["brute", "--rho", rho, "--sigma", sigma, "--k", "1"], capsys)
    doc = json.loads(out)
    assert status == 0 and doc["contained"] is False
    assert doc["witness"]["table"] == [0, 2, 0]


def test_classify_three_cycle(files, capsys):
    rho = files("cycle.json", {"domain_size": 3, "arity": 2, "tuples": [[0, 1], [1, 2], [2, 0]]})
    status, out = run(["classify", "--rho", rho], capsys)
    (cls,) = json.loads(out)["classes"]
    assert status == 0 and cls["tag"] == "Permutational" and cls["p"] == 3


def test_preserves_and_type(files, capsys):
    rho = files("rho.json", make_central(3, 2, [0]).to_doc())
    op = files("op.json", {"domain_size": 3, "arity": 1, "table": [0, 2, 1]})
    status, out = run(["preserves", "--op", op, "--rho", rho], capsys)
    assert status == 0 and json.loads(out) == {"preserves": True}
    status, out = run(["type", "--rho", rho, "--tuple", "1,0,1"], capsys)
    doc = json.loads(out)
    assert doc["tau1"] == [[1, 2], [1, 3], [2, 3]] and doc["tau2"] == [[1, 3]]


def test_input_errors(files, capsys, tmp_path):
    status, out = run(["decide", "--rho", "x", "--sigma", "y", "--k", "0"], capsys)
    assert status == 1 and json.loads(out)["kind"] == "input"
    status, out = run(["classify", "--rho", str(tmp_path / "missing.json")], capsys)
    assert status == 1
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    status, _ = run(["classify", "--rho", str(broken)], capsys)
    assert status == 1
    diag = files("diag.json", Relation.diagonal(3).to_doc())
    status, out = run(["decide", "--rho", diag, "--sigma", diag, "--k", "1"], capsys)
    assert status == 1


def test_decide_out_of_scope_is_unknown(files, capsys):
    rho = files("rho.json", make_central(5, 2, [0], [(1, 2)]).to_doc())
    sigma = files("sigma.json", make_central(5, 3, [0]).to_doc())
    status, out = run(["decide", "--rho", rho, "--sigma", sigma, "--k", "2", "--method", "theorem"], capsys)
    assert status == 2 and json.loads(out)["contained"] is None


def test_chain_verify(capsys):
    status, out = run(["chain", "--domain", "6", "--k", "2", "--verify"], capsys)
    doc = json.loads(out)
    assert status == 0 and len(doc["relations"]) == 2 and doc["verification"]["ok"]
    status, _ = run(["chain", "--domain", "4", "--k", "2"], capsys)
    assert status == 1


def test_poset_and_catalog(capsys, files):
    status, out = run(["poset", "--catalog", "3", "--max-arity", "2", "--k", "1", "--format", "dot"], capsys)
    assert status == 0 and out.startswith("digraph")
    status, out = run(["catalog", "--domain", "3", "--max-arity", "2"], capsys)
    assert status == 0 and len(json.loads(out)) == 20
    eq = Relation(4, 2, [(x, x) for x in range(4)] + [(0, 1), (1, 0)])
    rels = files("rels.json", [eq.to_doc(), make_central(4, 2, [0]).to_doc()])
    status, _ = run(["poset", "--relations", rels, "--k", "2", "--strategy", "theorem-only"], capsys)
    assert status == 2
