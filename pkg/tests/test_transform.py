import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from birellab.formula import parse, subformula_closure
from birellab.model import (FrameClass, Relation, classify, fixture_model, frame_properties,
                            make_model, pointwise_convex_witness, transitive_closure)
from birellab.search import random_model, random_preorder
from birellab.semantics import eval, extensions
from birellab.transform import (BoundExceeded, TransformError, convex_closure, convexify,
                                depth, linearize_gs4, linearize_gs4c, step_inequality,
                                superexp, tower_le)

from conftest import random_formula
from oracles import brute_depth

C = FrameClass
CD = parse("[](p | q) -> []p | <>q")


def gs4c_model(seed, convex=True):
    rng = random.Random(seed)
    m = random_model(rng.randint(1, 5), C.GS4c, ["p", "q", "r"], rng)
    return convexify(m) if convex else m


def test_convex_closure_examples():
    pre = make_model(4, pre=[(1, 2), (2, 3)]).pre  # chain 1 <= 2 <= 3, 0 apart
    r = Relation.from_pairs(4, [(0, 1), (0, 3)])
    assert set(convex_closure(pre, r).pairs()) == {(0, 1), (0, 2), (0, 3)}
    already = Relation.from_pairs(4, [(0, 1), (0, 2), (0, 3)])
    assert convex_closure(pre, already) == already


@given(st.integers(0, 10 ** 9))
def test_convex_closure_is_convex_and_contains_r(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    pre = random_preorder(n, rng)
    r = Relation.from_pairs(n, [(a, b) for a in range(n) for b in range(n) if rng.random() < 0.3])
    cc = convex_closure(pre, r)
    assert pointwise_convex_witness(pre, cc) is None
    assert r <= cc


@given(st.integers(0, 10 ** 9))
def test_convex_closure_of_confluent_relation_is_transitive(seed):
    m = gs4c_model(seed, convex=False)
    cc = convex_closure(m.pre, m.mod)
    assert transitive_closure(cc) == cc


@given(st.integers(0, 10 ** 9))
def test_convexified_gs4c_keeps_truth_and_class(seed):
    m = gs4c_model(seed, convex=False)
    c = convexify(m)
    assert C.GS4c in classify(c)
    f = random_formula(random.Random(seed), 4)
    a, b = extensions(m, [f]), extensions(c, [f])
    assert a == b


def test_linearize_linear_model():
    m = make_model(3, pre=[(0, 1), (1, 2)], val={"p": [2]})
    out, index = linearize_gs4(m)
    assert out.n == 3 + 2 + 1
    assert len(index) == out.n


def test_linearize_requires_gs4():
    with pytest.raises(TransformError):
        linearize_gs4(fixture_model("gd_fork"))
    with pytest.raises(TransformError):
        linearize_gs4c(fixture_model("cd_gs4"))


def test_cd_survives_linearization():
    m = fixture_model("cd_gs4")
    out, index = linearize_gs4(m)
    a = m.world_index("a")
    assert index[(a, a)] not in eval(out, CD)
    assert frame_properties(out).downward_linear


def test_gs4c_trivial_modal_relation():
    m = make_model(3, pre=[(0, 1), (0, 2), (1, 2)])
    out, index = linearize_gs4c(m)
    assert out.mod == Relation.identity(out.n)


@given(st.integers(0, 10 ** 9))
def test_linearize_gs4_properties(seed):
    rng = random.Random(seed)
    m = random_model(rng.randint(1, 5), C.GS4, ["p", "q", "r"], rng)
    out, index = linearize_gs4(m)
    assert out.n == sum(bin(r).count("1") for r in m.pre.rows)
    assert frame_properties(out).downward_linear
    assert C.GS4 in classify(out)
    f = random_formula(rng, 4)
    for g in subformula_closure(f):
        e, e2 = eval(m, g), eval(out, g)
        assert all((w in e) == (i in e2) for (v, w), i in index.items())


@given(st.integers(0, 10 ** 9))
def test_linearize_gs4c_properties(seed):
    m = gs4c_model(seed)
    out, index = linearize_gs4c(m)
    props = frame_properties(out)
    assert props.forth_down and props.downward_linear
    assert C.GS4c in classify(out)
    f = random_formula(random.Random(seed + 1), 4)
    for g in subformula_closure(f):
        e, e2 = eval(m, g), eval(out, g)
        assert all((w in e) == (i in e2) for (v, w), i in index.items())


def test_depth_examples():
    cluster = make_model(3, pre=[(0, 1), (1, 2), (2, 0)])
    assert depth(cluster).model == 0
    chain = make_model(3, pre=[(0, 1), (1, 2)])
    assert depth(chain).per_world == (2, 1, 0)


@given(st.integers(0, 10 ** 9))
def test_depth_matches_brute_force(seed):
    rng = random.Random(seed)
    m = random_model(rng.randint(1, 6), C.BiIntuitionistic, [], rng)
    assert list(depth(m).per_world) == brute_depth(m)


def test_superexp_values():
    assert superexp(1, 1) == 2
    assert superexp(1, 2) == 4
    assert superexp(3, 0) == 3
    assert superexp(4, 3) == 2 ** 65536
    with pytest.raises(BoundExceeded):
        superexp(5, 3)
    with pytest.raises(BoundExceeded):
        superexp(2, 3, cap_bits=8)


def test_superexp_recursion():
    for m in range(5):
        assert superexp(m, 0) == m
        for k in range(3):
            assert superexp(m, k + 1) == 2 ** superexp(m, k)


@given(st.integers(0, 50), st.integers(0, 4), st.integers(0, 4), st.integers(0, 3))
def test_tower_comparison_matches_direct(c, a, b, k):
    try:
        lhs = c + superexp(a, k, 1 << 18)
        rhs = superexp(b, k, 1 << 18)
    except BoundExceeded:
        return
    assert tower_le(c, a, b, k) == (lhs <= rhs)


def test_step_inequality_direct_cases():
    for m in range(1, 5):
        for n in range(1, 5):
            for k in (1, 2):
                lhs = 2 ** m * superexp((n - 1) * m, k)
                assert lhs <= superexp(n * m, k)
                assert step_inequality(m, n, k)
