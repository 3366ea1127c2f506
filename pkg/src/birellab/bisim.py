"""Sigma-labels, greatest (strong) Sigma-bisimulations and quotient models."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .formula import BOTTOM, Formula, Var, is_subformula_closed
from .model import (BirelationalModel, ModelError, Relation, bits, mask_of,
                    downward_linear_witness, transitive_closure, upward_linear_witness)
from .semantics import Program, _checked, run


@dataclass(frozen=True)
class SigmaLabel:
    plus: FrozenSet[Formula]
    dia: FrozenSet[Formula]


@dataclass(frozen=True)
class Equivalence:
    class_of: Tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.class_of)

    @property
    def size(self) -> int:
        return max(self.class_of, default=-1) + 1

    @classmethod
    def from_keys(cls, keys: Sequence) -> "Equivalence":
        """Classes of equal keys, numbered by smallest member."""
        ids: Dict = {}
        return cls(tuple(ids.setdefault(k, len(ids)) for k in keys))

    @classmethod
    def identity(cls, n: int) -> "Equivalence":
        return cls(tuple(range(n)))

    def classes(self) -> List[List[int]]:
        out: List[List[int]] = [[] for _ in range(self.size)]
        for w, c in enumerate(self.class_of):
            out[c].append(w)
        return out

    def relation(self) -> Relation:
        masks = [0] * self.size
        for w, c in enumerate(self.class_of):
            masks[c] |= 1 << w
        return Relation(self.n, [masks[c] for c in self.class_of])

    def is_singletons(self) -> bool:
        return self.size == self.n


class NotABisimulation(ModelError):
    pass


def _label_masks(m: BirelationalModel, sigma: Sequence[Formula]) -> Tuple[List[int], List[int]]:
    """Per formula of ``sigma``: extension, and worlds with no mod-successor in it."""
    if not is_subformula_closed(sigma):
        raise ValueError("sigma must be closed under subformulas")
    sigma = list(sigma)
    fd = _checked(m)
    prog = Program(sigma)
    ext = run(prog, fd, m.val)
    plus, dia = [], []
    for f in sigma:
        e = ext[prog.index[f]]
        plus.append(e)
        dia.append(sum(1 << w for w in range(m.n) if m.mod.rows[w] & e == 0))
    return plus, dia


def _label_keys(m, sigma) -> List[Tuple[int, int]]:
    """Label bitmasks over sigma plus ``false``, so classes never mix
    fallible and infallible worlds."""
    if BOTTOM not in sigma:
        sigma = list(sigma) + [BOTTOM]
    plus, dia = _label_masks(m, sigma)
    keys = []
    for w in range(m.n):
        kp = kd = 0
        for i in range(len(sigma)):
            kp |= (plus[i] >> w & 1) << i
            kd |= (dia[i] >> w & 1) << i
        keys.append((kp, kd))
    return keys


def compute_labels(m: BirelationalModel, sigma: Sequence[Formula]) -> List[SigmaLabel]:
    sigma = list(sigma)
    keys = _label_keys(m, sigma)  # sigma is a prefix of the key bits
    return [SigmaLabel(frozenset(f for i, f in enumerate(sigma) if kp >> i & 1),
                       frozenset(f for i, f in enumerate(sigma) if kd >> i & 1))
            for kp, kd in keys]


def _pair_ok(Z: List[int], up: Sequence[int], down: Sequence[int], a: int, b: int,
             strong: bool) -> bool:
    """Confluence clauses for a pair of a symmetric relation Z."""
    # forth-up from a and back-up (forth-up from b, Z symmetric)
    for x, y in ((a, b), (b, a)):
        uy = up[y]
        for x2 in bits(up[x]):
            if Z[x2] & uy == 0:
                return False
        if strong:
            dy = down[y]
            for x2 in bits(down[x]):
                if Z[x2] & dy == 0:
                    return False
    return True


def _greatest(m: BirelationalModel, keys, strong: bool) -> List[int]:
    n = m.n
    up = m.pre.rows
    down = m.pre.cols
    Z = [0] * n
    for a in range(n):
        for b in range(n):
            if keys[a] == keys[b]:
                Z[a] |= 1 << b
    changed = True
    while changed:
        changed = False
        for a in range(n):
            for b in bits(Z[a] >> a << a):  # b >= a
                if not _pair_ok(Z, up, down, a, b, strong):
                    Z[a] &= ~(1 << b)
                    Z[b] &= ~(1 << a)
                    changed = True
    return Z


def greatest_bisimulation(m: BirelationalModel, sigma: Sequence[Formula],
                          strong: bool = False) -> Equivalence:
    """Greatest (strong) Sigma-bisimulation on ``m`` as a partition.

    Computed by removing violating pairs from label equality until stable.
    """
    Z = _greatest(m, _label_keys(m, list(sigma)), strong)
    return Equivalence.from_keys(Z)


def check_bisimulation(m: BirelationalModel, sigma: Sequence[Formula], Z: Relation,
                       strong: bool = False) -> Tuple[bool, Optional[tuple]]:
    """Verify that ``Z`` is a (strong) Sigma-bisimulation.

    Returns ``(True, None)`` or ``(False, witness)`` where the witness is
    ``("label", w, v)`` or ``(clause, ...)`` naming the failing clause.
    """
    keys = _label_keys(m, list(sigma))
    up, down = m.pre.rows, m.pre.cols
    Zc = Z.cols
    for w, v in Z.pairs():
        if keys[w] != keys[v]:
            return False, ("label", w, v)
        # forth-up: w <= w2 and w Z v  =>  some v2 >= v with w2 Z v2
        for w2 in bits(up[w]):
            if Z.rows[w2] & up[v] == 0:
                return False, ("forth-up", w, v, w2)
        # back-up: w Z v <= v2  =>  some w2 >= w with w2 Z v2
        for v2 in bits(up[v]):
            if Zc[v2] & up[w] == 0:
                return False, ("back-up", w, v, v2)
        if strong:
            # Z forth-down: w2 <= w Z v  =>  w2 Z v2 <= v
            for w2 in bits(down[w]):
                if Z.rows[w2] & down[v] == 0:
                    return False, ("forth-down", w, v, w2)
            # converse forth-down: v2 <= v, w Z v  =>  w2 Z v2, w2 <= w
            for v2 in bits(down[v]):
                if Zc[v2] & down[w] == 0:
                    return False, ("converse forth-down", w, v, v2)
    return True, None


def quotient(m: BirelationalModel, e: Equivalence, sigma: Sequence[Formula],
             strong: bool = False) -> Tuple[BirelationalModel, Tuple[int, ...]]:
    """Quotient of ``m`` by a Sigma-bisimulation equivalence.

    The modal relation of the quotient is the transitive closure of the
    induced relation.  Returns the model and the world -> class map.
    """
    if e.n != m.n:
        raise NotABisimulation("equivalence size does not match model")
    ok, witness = check_bisimulation(m, sigma, e.relation(), strong)
    if not ok:
        raise NotABisimulation(f"not a Sigma-bisimulation: {witness}")
    cls = e.class_of
    k = e.size
    pre_rows = [0] * k
    mod_rows = [0] * k

    def image(s):
        return mask_of(cls[w] for w in bits(s))

    for w in range(m.n):
        pre_rows[cls[w]] |= image(m.pre.rows[w])
        mod_rows[cls[w]] |= image(m.mod.rows[w])
    mod = transitive_closure(Relation(k, mod_rows))

    names = None
    if m.names:
        names = tuple("_".join(m.names[w] for w in members) for members in e.classes())
    # variables outside sigma need not be uniform on classes; dropping them
    # keeps the quotient's valuation up-closed
    keep = {g.name for g in sigma if isinstance(g, Var)}
    q = BirelationalModel(k, Relation(k, pre_rows), mod, image(m.fallible),
                          {p: image(s) for p, s in m.val.items() if p in keep}, names)
    return q, cls


def linear_strong_equivalence(m: BirelationalModel, sigma: Sequence[Formula]) -> Equivalence:
    """Strong equivalence on an upward- and downward-linear model.

    Worlds are identified when they share their Sigma-label and the set of
    labels of all worlds comparable to them.
    """
    for wit, what in ((upward_linear_witness(m.pre), "upward"),
                      (downward_linear_witness(m.pre), "downward")):
        if wit is not None:
            raise ValueError(f"model is not {what}-linear, witness {wit}")
    keys = _label_keys(m, list(sigma))
    comparable = [m.pre.rows[w] | m.pre.cols[w] for w in range(m.n)]
    sig = [(keys[w], frozenset(keys[v] for v in bits(comparable[w]))) for w in range(m.n)]
    return Equivalence.from_keys(sig)


def quotient_size_bound(s: int) -> int:
    """``(s+1) * 2**(s*(s+1)+1)`` for ``|Sigma| = s``."""
    return (s + 1) * 2 ** (s * (s + 1) + 1)


def minimize(m: BirelationalModel, sigma: Sequence[Formula], strong: bool = False):
    e = greatest_bisimulation(m, sigma, strong)
    return quotient(m, e, sigma, strong)
