"""Real-valued (Goedel-Kripke) semantics over finite frames with exact rationals."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .formula import And, Bottom, Box, Dia, Formula, Implies, Or, Var
from .semantics import Program

ZERO = Fraction(0)
ONE = Fraction(1)


class FuzzyModelError(ValueError):
    pass


@dataclass(frozen=True)
class FuzzyModel:
    """``R[w][v]`` and ``val[p][w]`` are Fractions in [0, 1]."""
    n: int
    R: Tuple[Tuple[Fraction, ...], ...]
    val: Dict[str, Tuple[Fraction, ...]] = field(default_factory=dict)
    names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if len(self.R) != self.n or any(len(row) != self.n for row in self.R):
            raise FuzzyModelError("R must be an n x n matrix")
        for row in self.R:
            for x in row:
                _check_unit(x, "R")
        for p, vs in self.val.items():
            if len(vs) != self.n:
                raise FuzzyModelError(f"val({p}) needs one value per world")
            for x in vs:
                _check_unit(x, f"val({p})")

    def name(self, w: int) -> str:
        return self.names[w] if self.names else str(w)

    @classmethod
    def build(cls, n: int, R: Dict[Tuple[int, int], object] = None,
              val: Dict[str, Dict[int, object]] = None, names=None) -> "FuzzyModel":
        """Sparse constructor; absent entries are 0 (the diagonal included)."""
        rows = [[ZERO] * n for _ in range(n)]
        for (a, b), x in (R or {}).items():
            rows[a][b] = Fraction(x)
        vals = {}
        for p, entries in (val or {}).items():
            vs = [ZERO] * n
            for w, x in entries.items():
                vs[w] = Fraction(x)
            vals[p] = tuple(vs)
        return cls(n, tuple(tuple(r) for r in rows), vals, tuple(names) if names else None)


def _check_unit(x, what):
    if not isinstance(x, Fraction):
        raise FuzzyModelError(f"{what}: values must be exact Fractions, got {type(x).__name__}")
    if not ZERO <= x <= ONE:
        raise FuzzyModelError(f"{what}: value {x} outside [0, 1]")


def godel_implication(a: Fraction, b: Fraction) -> Fraction:
    return ONE if a <= b else b


def fuzzy_eval_all(m: FuzzyModel, formulas: Sequence[Formula]) -> Dict[Formula, List[Fraction]]:
    prog = Program(list(formulas))
    W = range(m.n)
    vals: List[List[Fraction]] = []
    for g in prog.closure:
        if isinstance(g, Var):
            v = list(m.val.get(g.name, (ZERO,) * m.n))
        elif isinstance(g, Bottom):
            v = [ZERO] * m.n
        elif isinstance(g, (And, Or, Implies)):
            a, b = vals[prog.index[g.left]], vals[prog.index[g.right]]
            if isinstance(g, And):
                v = [min(x, y) for x, y in zip(a, b)]
            elif isinstance(g, Or):
                v = [max(x, y) for x, y in zip(a, b)]
            else:
                v = [godel_implication(x, y) for x, y in zip(a, b)]
        elif isinstance(g, Dia):
            a = vals[prog.index[g.arg]]
            v = [max(min(m.R[w][u], a[u]) for u in W) for w in W]
        else:
            a = vals[prog.index[g.arg]]
            # literal clause: 1 if R(w,u) <= V_u(arg), else V_u(arg); min over u
            v = [min(godel_implication(m.R[w][u], a[u]) for u in W) for w in W]
        vals.append(v)
    return dict(zip(prog.closure, vals))


def fuzzy_eval(m: FuzzyModel, f: Formula) -> List[Fraction]:
    """Truth value of ``f`` at every world."""
    if m.n == 0:
        return []
    return fuzzy_eval_all(m, [f])[f]


@dataclass
class FuzzyFrameReport:
    reflexive: Optional[tuple]
    transitive: Optional[tuple]
    crisp: Optional[tuple]

    @property
    def is_reflexive(self) -> bool:
        return self.reflexive is None

    @property
    def is_transitive(self) -> bool:
        return self.transitive is None

    @property
    def is_crisp(self) -> bool:
        return self.crisp is None


def fuzzy_frame_check(m: FuzzyModel) -> FuzzyFrameReport:
    """Reflexivity, transitivity and crispness of R; witnesses on failure."""
    W = range(m.n)
    refl = next(((w,) for w in W if m.R[w][w] != ONE), None)
    trans = next(((u, v, w) for u in W for v in W for w in W
                  if m.R[u][w] < min(m.R[u][v], m.R[v][w])), None)
    crisp = next(((u, v) for u in W for v in W if m.R[u][v] not in (ZERO, ONE)), None)
    return FuzzyFrameReport(refl, trans, crisp)


def fuzzy_local_consequence(m: FuzzyModel, gamma: Sequence[Formula], f: Formula) -> Optional[int]:
    """A world where all of ``gamma`` take value 1 but ``f`` does not."""
    vals = fuzzy_eval_all(m, list(gamma) + [f])
    for w in range(m.n):
        if all(vals[g][w] == ONE for g in gamma) and vals[f][w] != ONE:
            return w
    return None


# ---------------------------------------------------------------- file format

def _fraction(tok: str, lineno: int) -> Fraction:
    try:
        x = Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise FuzzyModelError(f"line {lineno}: bad rational {tok!r}") from None
    if "." in tok or "e" in tok.lower():
        raise FuzzyModelError(f"line {lineno}: use num/den, not decimals: {tok!r}")
    return x


def parse_fuzzy_model(text: str) -> FuzzyModel:
    names: List[str] = []
    index: Dict[str, int] = {}
    R: Dict[Tuple[int, int], Fraction] = {}
    val: Dict[str, Dict[int, Fraction]] = {}
    header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if not header:
            if parts != ["fuzzy", "v1"]:
                raise FuzzyModelError(f"line {lineno}: expected header 'fuzzy v1'")
            header = True
            continue

        def lookup(nm):
            if nm not in index:
                raise FuzzyModelError(f"line {lineno}: unknown world {nm!r}")
            return index[nm]

        kw = parts[0]
        if kw == "world" and len(parts) == 2:
            if parts[1] in index:
                raise FuzzyModelError(f"line {lineno}: duplicate world {parts[1]!r}")
            index[parts[1]] = len(names)
            names.append(parts[1])
        elif kw == "r" and len(parts) == 4:
            R[(lookup(parts[1]), lookup(parts[2]))] = _fraction(parts[3], lineno)
        elif kw == "val" and len(parts) == 4:
            val.setdefault(parts[1], {})[lookup(parts[2])] = _fraction(parts[3], lineno)
        else:
            raise FuzzyModelError(f"line {lineno}: cannot parse {line!r}")
    if not header:
        raise FuzzyModelError("empty fuzzy model file")
    return FuzzyModel.build(len(names), R, val, names)


def dump_fuzzy_model(m: FuzzyModel) -> str:
    lines = ["fuzzy v1"] + [f"world {m.name(w)}" for w in range(m.n)]
    for a in range(m.n):
        for b in range(m.n):
            if m.R[a][b]:
                x = m.R[a][b]
                lines.append(f"r {m.name(a)} {m.name(b)} {x.numerator}/{x.denominator}")
    for p in sorted(m.val):
        for w, x in enumerate(m.val[p]):
            if x:
                lines.append(f"val {p} {m.name(w)} {x.numerator}/{x.denominator}")
    return "\n".join(lines) + "\n"
