import random
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from birellab.formula import BOTTOM, And, Box, Dia, Implies, Or, Var
from birellab.model import FrameClass
from birellab.search import random_model

settings.register_profile("default", max_examples=80, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ATOMS = ("p", "q", "r")


def formulas(atoms=ATOMS, max_leaves=8, modal=True):
    leaves = st.sampled_from([Var(a) for a in atoms] + [BOTTOM])

    def extend(inner):
        binary = st.tuples(inner, inner)
        opts = [binary.map(lambda t: And(*t)), binary.map(lambda t: Or(*t)),
                binary.map(lambda t: Implies(*t))]
        if modal:
            opts += [inner.map(Box), inner.map(Dia)]
        return st.one_of(*opts)

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def random_formula(rng: random.Random, depth=3, atoms=ATOMS, modal=True):
    if depth == 0 or rng.random() < 0.2:
        return rng.choice([Var(a) for a in atoms] + [BOTTOM])
    kinds = ["and", "or", "imp"] + (["box", "dia"] if modal else [])
    k = rng.choice(kinds)
    if k in ("box", "dia"):
        arg = random_formula(rng, depth - 1, atoms, modal)
        return Box(arg) if k == "box" else Dia(arg)
    a = random_formula(rng, depth - 1, atoms, modal)
    b = random_formula(rng, depth - 1, atoms, modal)
    return {"and": And, "or": Or, "imp": Implies}[k](a, b)


@st.composite
def models(draw, cls=FrameClass.BiIntuitionistic, max_n=5, props=ATOMS):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    n = draw(st.integers(1, max_n))
    return random_model(n, cls, props, random.Random(seed))


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance")
    if acc is None or not acc.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(acc.RESULTS):
        terminalreporter.write_line(acc.RESULTS[k])
