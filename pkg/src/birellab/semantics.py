"""Forcing, validity and local consequence on birelational models.

Extensions are computed bottom-up over the subformula closure.  With
``up[w]`` the pre-successors of w, the clauses reduce to bitset tests:

* ``a -> b`` holds at w iff ``up[w]`` avoids ``A & ~B``;
* ``<>a`` holds at w iff every u in ``up[w]`` has a mod-successor in A;
* ``[]a`` holds at w iff every pre;mod-successor of w is in A.
"""
from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .formula import And, Bottom, Box, Dia, Formula, Implies, Or, Var, subformula_closure
from .model import BirelationalModel, ModelError, bits, frame_properties

VAR, BOT, AND, OR, IMP, DIA, BOX = range(7)


class MalformedModel(ModelError):
    pass


class Program:
    """A formula flattened into closure order: ``ops[i]`` computes node i."""

    __slots__ = ("closure", "ops", "index", "root")

    def __init__(self, formulas: Sequence[Formula]):
        closure: List[Formula] = []
        index: Dict[Formula, int] = {}
        for f in formulas:
            for g in subformula_closure(f):
                if g not in index:
                    index[g] = len(closure)
                    closure.append(g)
        ops = []
        for g in closure:
            if isinstance(g, Var):
                ops.append((VAR, g.name, 0))
            elif isinstance(g, Bottom):
                ops.append((BOT, 0, 0))
            elif isinstance(g, And):
                ops.append((AND, index[g.left], index[g.right]))
            elif isinstance(g, Or):
                ops.append((OR, index[g.left], index[g.right]))
            elif isinstance(g, Implies):
                ops.append((IMP, index[g.left], index[g.right]))
            elif isinstance(g, Dia):
                ops.append((DIA, index[g.arg], 0))
            elif isinstance(g, Box):
                ops.append((BOX, index[g.arg], 0))
            else:  # pragma: no cover
                raise TypeError(f"not a formula: {g!r}")
        self.closure = closure
        self.ops = ops
        self.index = index
        self.root = [index[f] for f in formulas]


class FrameData:
    """Precomputed rows of a frame, shared by every valuation on it."""

    __slots__ = ("n", "full", "up", "mod", "box_reach", "fallible")

    def __init__(self, n: int, up: Sequence[int], mod: Sequence[int], fallible: int):
        self.n = n
        self.full = (1 << n) - 1
        self.up = tuple(up)
        self.mod = tuple(mod)
        self.box_reach = tuple(_image(self.mod, row) for row in self.up)
        self.fallible = fallible

    @classmethod
    def of(cls, m: BirelationalModel) -> "FrameData":
        return cls(m.n, m.pre.rows, m.mod.rows, m.fallible)


def _image(rows, s):
    out = 0
    while s:
        low = s & -s
        out |= rows[low.bit_length() - 1]
        s ^= low
    return out


def run(prog: Program, fd: FrameData, val: Dict[str, int]) -> List[int]:
    """Extensions of every closure member, in closure order."""
    up, mod, reach = fd.up, fd.mod, fd.box_reach
    rng = range(fd.n)
    ext: List[int] = []
    for kind, a, b in prog.ops:
        if kind == VAR:
            e = val.get(a, fd.fallible)
        elif kind == BOT:
            e = fd.fallible
        elif kind == AND:
            e = ext[a] & ext[b]
        elif kind == OR:
            e = ext[a] | ext[b]
        elif kind == IMP:
            bad = ext[a] & ~ext[b]
            e = 0
            for w in rng:
                if up[w] & bad == 0:
                    e |= 1 << w
        elif kind == DIA:
            A = ext[a]
            good = 0
            for u in rng:
                if mod[u] & A:
                    good |= 1 << u
            e = 0
            for w in rng:
                if up[w] & ~good == 0:
                    e |= 1 << w
        else:
            A = ext[a]
            e = 0
            for w in rng:
                if reach[w] & ~A == 0:
                    e |= 1 << w
        ext.append(e)
    return ext


def _checked(m: BirelationalModel) -> FrameData:
    report = m.report
    if not report.ok:
        raise MalformedModel("malformed model: " + "; ".join(map(str, report.violations)))
    return FrameData.of(m)


def extensions(m: BirelationalModel, formulas: Iterable[Formula]) -> Dict[Formula, int]:
    """Map every subformula of ``formulas`` to its extension bitmask."""
    prog = Program(list(formulas))
    ext = run(prog, _checked(m), m.val)
    return dict(zip(prog.closure, ext))


def eval_mask(m: BirelationalModel, f: Formula) -> int:
    prog = Program([f])
    return run(prog, _checked(m), m.val)[prog.root[0]]


def eval(m: BirelationalModel, f: Formula) -> frozenset:
    """Set of worlds of ``m`` forcing ``f``.

    Variables missing from ``m.val`` are interpreted by the fallible set
    (the least admissible valuation).
    """
    return frozenset(bits(eval_mask(m, f)))


def forces(m: BirelationalModel, w: int, f: Formula) -> bool:
    return bool(eval_mask(m, f) >> w & 1)


def model_validity(m: BirelationalModel, f: Formula) -> bool:
    """``M |= f``: every world, fallible ones included."""
    return eval_mask(m, f) == m.worlds


def local_consequence(m: BirelationalModel, gamma: Sequence[Formula], f: Formula) -> Optional[int]:
    """An infallible world forcing all of ``gamma`` but not ``f``, else None."""
    prog = Program(list(gamma) + [f])
    ext = run(prog, _checked(m), m.val)
    ok = m.worlds & ~m.fallible
    for i in prog.root[:-1]:
        ok &= ext[i]
    bad = ok & ~ext[prog.root[-1]]
    return next(bits(bad), None)


def classical_shortcut_check(m: BirelationalModel, f: Formula) -> bool:
    """Check the classical readings of <> and [] where confluence allows them.

    Under forth-up confluence ``<>g`` must hold exactly where some
    mod-successor forces g; under forth-down confluence ``[]g`` must hold
    exactly where all mod-successors force g.  Vacuously true otherwise.
    """
    props = frame_properties(m)
    ext = extensions(m, [f])
    ok = True
    for g, e in ext.items():
        if isinstance(g, Dia) and props.forth_up:
            A = ext[g.arg]
            classical = sum(1 << w for w in range(m.n) if m.mod.rows[w] & A)
            ok &= classical == e
        elif isinstance(g, Box) and props.forth_down:
            A = ext[g.arg]
            classical = sum(1 << w for w in range(m.n) if m.mod.rows[w] & ~A == 0)
            ok &= classical == e
    return ok


def truth_table(m: BirelationalModel, f: Formula) -> List[Tuple[str, bool]]:
    e = eval_mask(m, f)
    return [(m.name(w), bool(e >> w & 1)) for w in range(m.n)]
