"""Enumeration of finite frames and bounded countermodel search."""
from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterator, List, Optional, Sequence, Tuple

from .bisim import quotient_size_bound
from .formula import Formula, subformula_closure, variables
from .model import (BirelationalModel, FrameClass, Relation, back_up_witness, bits,
                    forth_down_witness, forth_up_witness, frame_in_class,
                    reflexive_transitive_closure, up_closed)
from .semantics import FrameData, Program, run

EXHAUSTIVE_CAP = 3
SAMPLED_CAP = 6
CAP_ENV = "BIRELLAB_CAP_WORLDS"

SEARCH_CLASSES = (FrameClass.CS4, FrameClass.IS4, FrameClass.S4I, FrameClass.GS4,
                  FrameClass.GS4c, FrameClass.BiIntuitionistic)


class CapExceeded(ValueError):
    pass


def world_cap(sampled: bool = False) -> int:
    """Cap on world count; the environment variable overrides both modes."""
    env = os.environ.get(CAP_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise CapExceeded(f"{CAP_ENV} must be an integer, got {env!r}") from None
    return SAMPLED_CAP if sampled else EXHAUSTIVE_CAP


def _check_cap(n: int, sampled: bool):
    cap = world_cap(sampled)
    if n > cap:
        mode = "sampled" if sampled else "exhaustive"
        raise CapExceeded(f"{n} worlds exceeds the {mode} cap of {cap} (set {CAP_ENV})")


# ---------------------------------------------------------------- enumeration

@lru_cache(maxsize=None)
def preorders(n: int) -> Tuple[Relation, ...]:
    """Every preorder on n labeled points, ordered by (edge count, rows).

    Built one point at a time: the new point gets an up-closed set above it
    and a down-closed set below it, with everything below preceding
    everything above.
    """
    if n == 0:
        return (Relation(0, []),)
    out = []
    for old in preorders(n - 1):
        k = n - 1
        full = (1 << k) - 1
        cols = old.cols
        for up in range(full + 1):
            if not up_closed(old, up):
                continue
            for down in range(full + 1):
                if any(cols[d] & ~down for d in bits(down)):
                    continue
                if any(old.rows[d] & up != up for d in bits(down)):
                    continue
                new = 1 << k
                rows = [old.rows[i] | (new if down >> i & 1 else 0) for i in range(k)]
                rows.append(new | up)
                out.append(Relation(n, rows))
    out.sort(key=lambda r: (sum(bin(x).count("1") for x in r.rows), r.rows))
    return tuple(out)


def _closed_sets(n: int, rels: Sequence[Relation]) -> List[int]:
    return [s for s in range(1 << n) if all(up_closed(r, s) for r in rels)]


def _fallible_sets(n: int, pre: Relation, mod: Relation, cls: FrameClass,
                   fallible_allowed: bool) -> List[int]:
    if not fallible_allowed or cls not in (FrameClass.CS4, FrameClass.BiIntuitionistic):
        return [0]
    return _closed_sets(n, (pre, mod))


def _check_class(cls: FrameClass):
    if cls not in SEARCH_CLASSES:
        raise ValueError(f"cannot enumerate frames of class {cls.value}")


def _frames(n: int, cls: FrameClass, fallible_allowed: bool):
    orders = preorders(n)
    for i, pre in enumerate(orders):
        for j, mod in enumerate(orders):
            for fal in _fallible_sets(n, pre, mod, cls, fallible_allowed):
                if frame_in_class(pre, mod, fal, cls):
                    yield (i, j, fal), pre, mod, fal


def enumerate_frames(n: int, cls: FrameClass, fallible_allowed: bool = True,
                     exhaustive: bool = True) -> Iterator[BirelationalModel]:
    """Every frame of ``cls`` on n labeled worlds, exactly once, as a model
    with empty valuation."""
    _check_class(cls)
    _check_cap(n, sampled=not exhaustive)
    for _, pre, mod, fal in _frames(n, cls, fallible_allowed):
        yield BirelationalModel(n, pre, mod, fal, {})


def up_sets(pre: Relation, fallible: int = 0) -> List[int]:
    return [s for s in range(1 << pre.n) if s & fallible == fallible and up_closed(pre, s)]


def enumerate_valuations(frame: BirelationalModel, props: Sequence[str]) -> Iterator[dict]:
    """Each assignment of an up-closed, fallible-containing set to every prop."""
    sets = up_sets(frame.pre, frame.fallible)
    for choice in product(sets, repeat=len(props)):
        yield dict(zip(props, choice))


# ---------------------------------------------------------------- random frames

def random_preorder(n: int, rng: random.Random, density: float = 0.3) -> Relation:
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b and rng.random() < density]
    return reflexive_transitive_closure(Relation.from_pairs(n, pairs))


def random_upward_linear_preorder(n: int, rng: random.Random) -> Relation:
    """Forest of clusters; each cluster sits below at most one parent."""
    clusters: List[List[int]] = []
    for w in rng.sample(range(n), n):
        if clusters and rng.random() < 0.25:
            rng.choice(clusters).append(w)
        else:
            clusters.append([w])
    pairs = []
    for i, c in enumerate(clusters):
        pairs += [(a, b) for a in c for b in c]
        if i and rng.random() < 0.8:
            parent = clusters[rng.randrange(i)]
            pairs.append((c[0], parent[0]))
    return reflexive_transitive_closure(Relation.from_pairs(n, pairs))


def _needed(cls: FrameClass) -> Tuple[str, ...]:
    return {
        FrameClass.CS4: ("back_up",),
        FrameClass.IS4: ("back_up", "forth_up"),
        FrameClass.GS4: ("back_up", "forth_up"),
        FrameClass.S4I: ("forth_up", "forth_down"),
        FrameClass.GS4c: ("back_up", "forth_up", "forth_down"),
        FrameClass.BiIntuitionistic: (),
    }[cls]


def repair_modal(pre: Relation, mod: Relation, needed: Sequence[str],
                 rng: random.Random) -> Relation:
    """Add random modal edges until the needed confluences hold."""
    mod = reflexive_transitive_closure(mod)
    while True:
        rows = list(mod.rows)
        if "forth_up" in needed and (wit := forth_up_witness(pre, mod)):
            _, w2, v = wit
            rows[w2] |= 1 << rng.choice(list(bits(pre.rows[v])))
        elif "back_up" in needed and (wit := back_up_witness(pre, mod)):
            w, _, v2 = wit
            rows[rng.choice(list(bits(pre.rows[w])))] |= 1 << v2
        elif "forth_down" in needed and (wit := forth_down_witness(pre, mod)):
            w, _, v2 = wit
            rows[w] |= 1 << rng.choice(list(bits(pre.cols[v2])))
        else:
            return mod
        mod = reflexive_transitive_closure(Relation(pre.n, rows))


def random_frame(n: int, cls: FrameClass, rng: random.Random,
                 fallible_allowed: bool = True) -> BirelationalModel:
    _check_class(cls)
    if cls in (FrameClass.GS4, FrameClass.GS4c):
        pre = random_upward_linear_preorder(n, rng)
    else:
        pre = random_preorder(n, rng)
    seed_edges = [(a, b) for a in range(n) for b in range(n) if rng.random() < 0.2]
    mod = repair_modal(pre, Relation.from_pairs(n, seed_edges), _needed(cls), rng)
    fal = 0
    if fallible_allowed and cls in (FrameClass.CS4, FrameClass.BiIntuitionistic) \
            and rng.random() < 0.3:
        both = Relation(n, [p | m for p, m in zip(pre.rows, mod.rows)])
        fal = reflexive_transitive_closure(both).image(1 << rng.randrange(n))
    m = BirelationalModel(n, pre, mod, fal, {})
    assert frame_in_class(pre, mod, fal, cls)
    return m


def random_up_set(pre: Relation, fallible: int, rng: random.Random) -> int:
    """Uniform over the admissible sets for small frames, else the up-closure
    of a random subset."""
    if pre.n <= 10:
        return rng.choice(_up_sets_cached(pre, fallible))
    return pre.image(rng.getrandbits(pre.n)) | fallible


@lru_cache(maxsize=4096)
def _up_sets_cached(pre: Relation, fallible: int) -> List[int]:
    return up_sets(pre, fallible)


def random_model(n: int, cls: FrameClass, props: Sequence[str], rng: random.Random,
                 fallible_allowed: bool = True) -> BirelationalModel:
    m = random_frame(n, cls, rng, fallible_allowed)
    return m.with_val({p: random_up_set(m.pre, m.fallible, rng) for p in props})


# ---------------------------------------------------------------- search

@dataclass
class SearchResult:
    model: Optional[BirelationalModel]
    world: Optional[int]
    mode: str
    max_n: int
    seed: Optional[int] = None
    checked: int = 0

    @property
    def found(self) -> bool:
        return self.model is not None

    def verdict(self, found_label: str, none_label: str) -> str:
        if self.found:
            return found_label
        return none_label if self.mode == "exhaustive" else "NONE-FOUND-IN-SAMPLE"


class _Query:
    """Compiled query: the hit mask picks infallible/any worlds as needed."""

    def __init__(self, gamma: Sequence[Formula], goal: Optional[Formula], negate_goal: bool,
                 infallible_only: bool):
        fs = list(gamma) + ([goal] if goal is not None else [])
        self.prog = Program(fs)
        self.props = list(dict.fromkeys(v for f in fs for v in variables(f)))
        self.n_gamma = len(gamma)
        self.has_goal = goal is not None
        self.negate_goal = negate_goal
        self.infallible_only = infallible_only

    def hits(self, fd: FrameData, val) -> int:
        ext = run(self.prog, fd, val)
        mask = fd.full
        if self.infallible_only:
            mask &= ~fd.fallible
        for i in self.prog.root[:self.n_gamma]:
            mask &= ext[i]
        if self.has_goal:
            g = ext[self.prog.root[-1]]
            mask &= ~g if self.negate_goal else g
        return mask


def _search_partition(query: _Query, cls: FrameClass, max_n: int, part: int, jobs: int):
    checked = 0
    for n in range(1, max_n + 1):
        for (i, j, fal), pre, mod, _ in _frames(n, cls, True):
            if i % jobs != part:
                continue
            fd = FrameData(n, pre.rows, mod.rows, fal)
            sets = up_sets(pre, fal)
            for vi, choice in enumerate(product(sets, repeat=len(query.props))):
                checked += 1
                val = dict(zip(query.props, choice))
                hit = query.hits(fd, val)
                if hit:
                    key = (n, i, j, fal, vi)
                    model = BirelationalModel(n, pre, mod, fal, val)
                    return key, model, next(bits(hit)), checked
    return None, None, None, checked


def _run_query(query: _Query, cls: FrameClass, max_n: int, exhaustive: bool,
               samples: int, seed: Optional[int], jobs: int) -> SearchResult:
    _check_class(cls)
    _check_cap(max_n, sampled=not exhaustive)
    if exhaustive:
        if jobs <= 1:
            _, model, w, checked = _search_partition(query, cls, max_n, 0, 1)
            return SearchResult(model, w, "exhaustive", max_n, None, checked)
        with ProcessPoolExecutor(jobs) as pool:
            futures = [pool.submit(_search_partition, query, cls, max_n, k, jobs)
                       for k in range(jobs)]
            results = [f.result() for f in futures]
        checked = sum(r[3] for r in results)
        found = [r for r in results if r[0] is not None]
        if not found:
            return SearchResult(None, None, "exhaustive", max_n, None, checked)
        _, model, w, _ = min(found, key=lambda r: r[0])
        return SearchResult(model, w, "exhaustive", max_n, None, checked)
    seed = 0 if seed is None else seed
    rng = random.Random(seed)
    for k in range(samples):
        n = rng.randint(1, max_n)
        m = random_model(n, cls, query.props, rng)
        hit = query.hits(FrameData.of(m), m.val)
        if hit:
            return SearchResult(m, next(bits(hit)), "sample", max_n, seed, k + 1)
    return SearchResult(None, None, "sample", max_n, seed, samples)


def find_countermodel(f: Formula, cls: FrameClass, max_n: int, exhaustive: bool = True,
                      samples: int = 1000, seed: Optional[int] = None,
                      jobs: int = 1) -> SearchResult:
    """A model of ``cls`` with a world not forcing ``f``.

    Only the variables of ``f`` receive valuations.  Exhaustive mode visits
    frames in a fixed order, so the result does not depend on ``jobs``.
    """
    return _run_query(_Query([], f, True, False), cls, max_n, exhaustive, samples, seed, jobs)


def find_satisfying(f: Formula, cls: FrameClass, max_n: int, exhaustive: bool = True,
                    samples: int = 1000, seed: Optional[int] = None,
                    jobs: int = 1) -> SearchResult:
    """A model of ``cls`` with an infallible world forcing ``f``."""
    return _run_query(_Query([], f, False, True), cls, max_n, exhaustive, samples, seed, jobs)


def check_entailment_bounded(gamma: Sequence[Formula], f: Formula, cls: FrameClass,
                             max_n: int, exhaustive: bool = True, samples: int = 1000,
                             seed: Optional[int] = None, jobs: int = 1) -> SearchResult:
    """An infallible world forcing all of ``gamma`` but not ``f``."""
    return _run_query(_Query(list(gamma), f, True, True), cls, max_n, exhaustive,
                      samples, seed, jobs)


def complete_bound(f: Formula) -> int:
    return quotient_size_bound(len(subformula_closure(f)))
