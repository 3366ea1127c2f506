import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from birellab.formula import And, BOTTOM, Box, Dia, Implies, Or, Var, parse, subformula_closure
from birellab.fuzzy import (FuzzyModel, FuzzyModelError, dump_fuzzy_model, fuzzy_eval,
                            fuzzy_eval_all, fuzzy_frame_check, fuzzy_local_consequence,
                            parse_fuzzy_model)

from conftest import formulas

GRID = sorted({F(a, b) for b in range(1, 5) for a in range(b + 1)})
HALF = FuzzyModel.build(1, {(0, 0): 1}, {"p": {0: F(1, 2)}})


def random_fuzzy(rng, n, crisp=False, crisp_val=False, props=("p", "q")):
    """Reflexive transitive fuzzy model: random matrix closed under min-max."""
    grid = [F(0), F(1)] if crisp else GRID
    R = [[rng.choice(grid) for _ in range(n)] for _ in range(n)]
    for w in range(n):
        R[w][w] = F(1)
    changed = True
    while changed:
        changed = False
        for u in range(n):
            for v in range(n):
                for w in range(n):
                    x = min(R[u][v], R[v][w])
                    if R[u][w] < x:
                        R[u][w] = x
                        changed = True
    vgrid = [F(0), F(1)] if crisp_val else GRID
    val = {p: tuple(rng.choice(vgrid) for _ in range(n)) for p in props}
    return FuzzyModel(n, tuple(map(tuple, R)), val)


def test_half_model_values():
    assert fuzzy_eval(HALF, parse("p | ~p")) == [F(1, 2)]
    assert fuzzy_eval(HALF, parse("[]p")) == [F(1, 2)]
    assert fuzzy_eval(HALF, parse("~p")) == [F(0)]


def test_frame_check_examples():
    ident = FuzzyModel.build(3, {(i, i): 1 for i in range(3)})
    rep = fuzzy_frame_check(ident)
    assert rep.is_reflexive and rep.is_transitive and rep.is_crisp
    m = FuzzyModel.build(3, {(0, 1): 1, (1, 2): 1, (0, 2): F(1, 2)})
    rep = fuzzy_frame_check(m)
    assert not rep.is_transitive and rep.transitive == (0, 1, 2)
    assert not fuzzy_frame_check(FuzzyModel.build(2, {(0, 1): F(1, 3)})).is_crisp


def test_absent_entries_default_to_zero():
    m = FuzzyModel.build(2, {(0, 1): 1})
    assert m.R[0][0] == 0
    assert not fuzzy_frame_check(m).is_reflexive


def test_local_consequence_examples():
    p = Var("p")
    assert fuzzy_local_consequence(HALF, [p], p) is None
    assert fuzzy_local_consequence(HALF, [], parse("p | ~p")) == 0
    assert fuzzy_local_consequence(HALF, [], parse("(p -> q) | (q -> p)")) is None


def test_values_must_be_exact():
    with pytest.raises(FuzzyModelError):
        FuzzyModel(1, ((0.5,),))
    with pytest.raises(FuzzyModelError):
        FuzzyModel.build(1, {(0, 0): F(3, 2)})
    with pytest.raises(FuzzyModelError, match="num/den"):
        parse_fuzzy_model("fuzzy v1\nworld a\nr a a 0.5\n")


def test_file_roundtrip():
    m = FuzzyModel.build(2, {(0, 0): 1, (0, 1): F(1, 3), (1, 1): 1},
                         {"p": {1: F(3, 4)}}, names=["a", "b"])
    assert parse_fuzzy_model(dump_fuzzy_model(m)) == m


@given(st.integers(0, 10 ** 9), formulas(("p", "q")))
def test_values_stay_in_input_set(seed, f):
    rng = random.Random(seed)
    m = random_fuzzy(rng, rng.randint(1, 4))
    allowed = {F(0), F(1)} | {x for vs in m.val.values() for x in vs}
    allowed |= {x for row in m.R for x in row}
    for vs in fuzzy_eval_all(m, [f]).values():
        assert set(vs) <= allowed


@given(st.integers(0, 10 ** 9), formulas(("p", "q")))
def test_crisp_frame_values_stay_in_atomic_set(seed, f):
    rng = random.Random(seed)
    m = random_fuzzy(rng, rng.randint(1, 4), crisp=True)
    allowed = {F(0), F(1)} | {x for vs in m.val.values() for x in vs}
    for vs in fuzzy_eval_all(m, [f]).values():
        assert set(vs) <= allowed


def classical_s4(m, f, w):
    if isinstance(f, Var):
        return m.val[f.name][w] == 1
    if f == BOTTOM:
        return False
    if isinstance(f, And):
        return classical_s4(m, f.left, w) and classical_s4(m, f.right, w)
    if isinstance(f, Or):
        return classical_s4(m, f.left, w) or classical_s4(m, f.right, w)
    if isinstance(f, Implies):
        return not classical_s4(m, f.left, w) or classical_s4(m, f.right, w)
    succ = [v for v in range(m.n) if m.R[w][v] == 1]
    if isinstance(f, Box):
        return all(classical_s4(m, f.arg, v) for v in succ)
    assert isinstance(f, Dia)
    return any(classical_s4(m, f.arg, v) for v in succ)


@given(st.integers(0, 10 ** 9), formulas(("p", "q")))
def test_crisp_degenerates_to_classical(seed, f):
    rng = random.Random(seed)
    m = random_fuzzy(rng, rng.randint(1, 4), crisp=True, crisp_val=True)
    vals = fuzzy_eval(m, f)
    assert vals == [F(int(classical_s4(m, f, w))) for w in range(m.n)]
