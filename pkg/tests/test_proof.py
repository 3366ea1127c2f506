import random
from dataclasses import replace
from itertools import product

import pytest

from birellab.formula import And, BOTTOM, Implies, Or, Var, parse
from birellab.model import FrameClass
from birellab.proof import (SHIPPED_PROOFS, AxiomInstance, AxiomName, IntTaut, MP, Nec, Proof,
                            ProofFormatError, check_entailment_certificate, check_proof,
                            dump_proof, ipc_decide, logic_axioms, parse_proof, shipped_proof)

from conftest import random_formula
from oracles import IpcOracle

C = FrameClass
A = AxiomName


def test_axiom_sets():
    assert len(logic_axioms(C.CS4)) == 6
    assert logic_axioms(C.GS4c) == logic_axioms(C.CS4) | {A.DP, A.N, A.FS2, A.GD, A.CD}
    assert logic_axioms(C.S4I) == logic_axioms(C.CS4) | {A.DP, A.N, A.CD}
    assert logic_axioms(C.IS4) == logic_axioms(C.CS4) | {A.DP, A.N, A.FS2}
    assert logic_axioms(C.GS4) == logic_axioms(C.IS4) | {A.GD}
    with pytest.raises(ValueError):
        logic_axioms(C.Birelational)


def test_ipc_examples():
    assert ipc_decide(parse("p -> q -> p"))
    assert not ipc_decide(parse("(p -> q) | (q -> p)"))
    assert ipc_decide(parse("<>p -> <>p"))
    assert not ipc_decide(parse("p | ~p"))
    assert ipc_decide(parse("~~(p | ~p)"))
    # modal atoms are opaque
    assert not ipc_decide(parse("[]p -> p"))
    assert ipc_decide(parse("[](p & q) -> [](p & q) | r"))


def _all_formulas(depth, leaves):
    if depth == 0:
        return list(leaves)
    smaller = _all_formulas(depth - 1, leaves)
    out = list(smaller)
    seen = set(out)
    for a, b in product(smaller, repeat=2):
        for op in (And, Or, Implies):
            f = op(a, b)
            if f not in seen:
                seen.add(f)
                out.append(f)
    return out


@pytest.fixture(scope="module")
def oracle():
    return IpcOracle(["p", "q"], max_n=4)


def test_ipc_agrees_with_kripke_oracle_depth2(oracle):
    fs = _all_formulas(2, [Var("p"), Var("q"), BOTTOM])
    assert len(fs) > 2000
    mismatches = [f for f in fs if ipc_decide(f) != oracle.valid(f)]
    assert mismatches == []


def test_ipc_agrees_with_kripke_oracle_depth3_sample(oracle):
    rng = random.Random(7)
    for _ in range(1500):
        f = random_formula(rng, 3, ("p", "q"), modal=False)
        assert ipc_decide(f) == oracle.valid(f), f


def test_single_axiom_proof():
    pr = Proof(C.CS4, ((parse("[](q & r) -> q & r"), AxiomInstance(A.T_BOX)),))
    assert check_proof(pr) is None


def test_axiom_not_in_logic():
    pr = Proof(C.CS4, ((parse("(p -> q) | (q -> p)"), AxiomInstance(A.GD)),))
    rej = check_proof(pr)
    assert rej.line == 1 and rej.reason == "GD not available in CS4"
    assert check_proof(replace(pr, logic=C.GS4)) is None


def test_rule_failures():
    p, q = Var("p"), Var("q")
    bad_mp = Proof(C.CS4, ((Implies(p, q), IntTaut()),))
    assert check_proof(bad_mp).reason == "not an intuitionistic tautology"
    lines = ((Implies(p, p), IntTaut()), (Implies(q, q), IntTaut()), (p, MP(1, 2)))
    assert "antecedent" in check_proof(Proof(C.CS4, lines)).reason
    lines = ((Implies(p, p), IntTaut()), (Implies(p, p), Nec(1)))
    assert check_proof(Proof(C.CS4, lines)).line == 2
    lines = ((Implies(p, p), MP(1, 1)),)
    assert "earlier" in check_proof(Proof(C.CS4, lines)).reason


@pytest.mark.parametrize("name", SHIPPED_PROOFS)
def test_shipped_proofs_accepted(name):
    pr = shipped_proof(name)
    assert pr.logic is C.CS4
    assert check_proof(pr) is None
    assert parse_proof(dump_proof(pr)) == pr


def mutations(pr):
    """Every single-line change of a justification."""
    names = list(AxiomName)
    for k, (f, j) in enumerate(pr.lines):
        alts = []
        if isinstance(j, MP):
            alts += [MP(j.j, j.i)] if j.i != j.j else []
            alts += [MP(i, j.j) for i in range(1, k + 1) if i != j.i]
            alts += [MP(j.i, i) for i in range(1, k + 1) if i != j.j]
        elif isinstance(j, Nec):
            alts += [Nec(i) for i in range(1, k + 1) if i != j.i]
        elif isinstance(j, AxiomInstance):
            alts += [AxiomInstance(n) for n in names if n != j.name]
        for alt in alts:
            lines = list(pr.lines)
            lines[k] = (f, alt)
            yield k + 1, Proof(pr.logic, tuple(lines))


@pytest.mark.parametrize("name", SHIPPED_PROOFS)
def test_mutations_rejected(name):
    count = 0
    for line, mutant in mutations(shipped_proof(name)):
        rej = check_proof(mutant)
        assert rej is not None and rej.line == line
        count += 1
    assert count > 20


def test_entailment_certificates():
    p = Var("p")
    pr = Proof(C.CS4, ((Implies(p, p), IntTaut()),))
    assert check_entailment_certificate([p], [p], pr) is None
    t_box = parse("[]p -> p")
    top = Implies(BOTTOM, BOTTOM)
    pr = Proof(C.CS4, ((t_box, AxiomInstance(A.T_BOX)),
                       (Implies(t_box, Implies(top, t_box)), IntTaut()),
                       (Implies(top, t_box), MP(2, 1))))
    assert check_entailment_certificate([], [t_box], pr) is None
    q, r = Var("q"), Var("r")
    left_assoc = Implies(And(And(p, q), r), p)
    pr = Proof(C.CS4, ((left_assoc, IntTaut()),))
    rej = check_entailment_certificate([p, q, r], [p], pr)
    assert rej is not None and "does not match" in rej.reason


def test_proof_file_errors():
    with pytest.raises(ProofFormatError):
        parse_proof("proof v1\nlogic CS4\n2 taut :: p -> p\n")
    with pytest.raises(ProofFormatError):
        parse_proof("proof v1\nlogic XS4\n")
    with pytest.raises(ProofFormatError, match="column"):
        parse_proof("proof v1\nlogic CS4\n1 taut :: p ->\n")
