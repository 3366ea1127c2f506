import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from birellab.formula import Var, parse
from birellab.model import FrameClass, classify, isomorphic, make_model, well_formed
from birellab.search import (CAP_ENV, CapExceeded, check_entailment_bounded, complete_bound,
                             enumerate_frames, enumerate_valuations, find_countermodel,
                             find_satisfying, preorders, random_model)
from birellab.semantics import eval

from oracles import naive_frame_counts

C = FrameClass
GD = parse("(p -> q) | (q -> p)")

# labeled frame counts per class, frozen from the naive all-matrices oracle
FRAME_COUNTS = {
    1: {"CS4": 2, "IS4": 1, "S4I": 1, "GS4": 1, "GS4c": 1, "BiIntuitionistic": 2},
    2: {"CS4": 40, "IS4": 16, "S4I": 16, "GS4": 16, "GS4c": 16, "BiIntuitionistic": 40},
    3: {"CS4": 2204, "IS4": 589, "S4I": 589, "GS4": 550, "GS4c": 457,
        "BiIntuitionistic": 2546},
}


def test_preorder_counts():
    assert [len(preorders(n)) for n in range(1, 6)] == [1, 4, 29, 355, 6942]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_frame_counts_match_oracle(n):
    got = {c.value: sum(1 for _ in enumerate_frames(n, c)) for c in
           (C.CS4, C.IS4, C.S4I, C.GS4, C.GS4c, C.BiIntuitionistic)}
    assert got == FRAME_COUNTS[n]


def test_oracle_still_gives_frozen_counts():
    for n in (1, 2, 3):
        assert naive_frame_counts(n)[0] == FRAME_COUNTS[n]


def test_frames_are_distinct_and_in_class():
    seen = set()
    for m in enumerate_frames(2, C.GS4):
        assert C.GS4 in classify(m)
        key = (m.pre.rows, m.mod.rows, m.fallible)
        assert key not in seen
        seen.add(key)


def test_valuation_counts():
    antichain = make_model(2)
    assert len(list(enumerate_valuations(antichain, ["p"]))) == 4
    chain = make_model(2, pre=[(0, 1)])
    assert len(list(enumerate_valuations(chain, ["p"]))) == 3
    all_fallible = make_model(2, fallible=[0, 1])
    assert len(list(enumerate_valuations(all_fallible, ["p", "q"]))) == 1


@given(st.integers(0, 10 ** 9))
def test_enumerated_models_well_formed(seed):
    rng = random.Random(seed)
    cls = rng.choice([C.CS4, C.S4I, C.GS4c])
    frames = list(enumerate_frames(rng.randint(1, 3), cls))
    frame = rng.choice(frames)
    for val in enumerate_valuations(frame, ["p"]):
        m = frame.with_val(val)
        assert well_formed(m).ok and cls in classify(m)


def test_countermodel_examples():
    res = find_countermodel(GD, C.IS4, 3)
    assert res.found and res.model.n == 3
    assert res.world not in eval(res.model, GD)
    assert set(res.model.val) == {"p", "q"}
    assert not find_countermodel(parse("[]p -> p"), C.CS4, 3).found


def test_satisfiability_examples():
    assert not find_satisfying(parse("p & ~p"), C.IS4, 3).found
    res = find_satisfying(parse("<>false"), C.CS4, 3)
    assert res.found and res.model.n == 2
    assert not res.model.fallible >> res.world & 1
    assert not find_satisfying(parse("<>false"), C.IS4, 3).found


def test_entailment_examples():
    p = Var("p")
    assert not check_entailment_bounded([parse("[]p")], p, C.CS4, 3).found
    assert not check_entailment_bounded([], GD, C.GS4, 3).found
    res = check_entailment_bounded([parse("p -> q"), parse("q -> p")], p, C.IS4, 3)
    assert res.found and res.model.n == 1


def test_cap(monkeypatch):
    with pytest.raises(CapExceeded):
        find_countermodel(GD, C.IS4, 4)
    monkeypatch.setenv(CAP_ENV, "4")
    assert find_countermodel(GD, C.IS4, 4).found
    with pytest.raises(CapExceeded):
        find_countermodel(GD, C.IS4, 7, exhaustive=False)


def test_sampled_mode_is_reproducible():
    a = find_countermodel(GD, C.IS4, 5, exhaustive=False, samples=300, seed=11)
    b = find_countermodel(GD, C.IS4, 5, exhaustive=False, samples=300, seed=11)
    assert a.found and a.seed == 11
    assert a.model == b.model and a.world == b.world
    none = find_countermodel(parse("[]p -> p"), C.IS4, 5, exhaustive=False, samples=50, seed=3)
    assert none.verdict("X", "Y") == "NONE-FOUND-IN-SAMPLE"


def test_jobs_do_not_change_the_answer():
    fs2 = parse("(<>p -> []q) -> [](p -> q)")
    one = find_countermodel(fs2, C.S4I, 3)
    three = find_countermodel(fs2, C.S4I, 3, jobs=3)
    assert one.model == three.model and one.world == three.world


@given(st.integers(0, 10 ** 9))
def test_random_models_in_class(seed):
    rng = random.Random(seed)
    cls = rng.choice([C.CS4, C.IS4, C.S4I, C.GS4, C.GS4c])
    m = random_model(rng.randint(1, 6), cls, ["p"], rng)
    assert well_formed(m).ok and cls in classify(m)


def test_complete_bound():
    assert complete_bound(Var("p")) == 16
    assert complete_bound(parse("[]p")) == 384
