"""Finite birelational models, relation algebra and frame conditions.

Worlds are indices ``0..n-1``.  Sets of worlds and relation rows are Python
ints used as bitsets, so there is no hard world cap; everything here stays
comfortable up to a few hundred worlds.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple


def bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


class ModelError(ValueError):
    pass


class Relation:
    """Square boolean matrix stored as one bitmask per row."""

    __slots__ = ("n", "rows", "_cols")

    def __init__(self, n: int, rows: Sequence[int]):
        if len(rows) != n:
            raise ModelError(f"relation needs {n} rows, got {len(rows)}")
        full = (1 << n) - 1
        for r in rows:
            if r & ~full:
                raise ModelError("relation row refers to a world index >= n")
        self.n = n
        self.rows = tuple(rows)
        self._cols = None

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Tuple[int, int]]) -> "Relation":
        rows = [0] * n
        for a, b in pairs:
            if not (0 <= a < n and 0 <= b < n):
                raise ModelError(f"pair ({a}, {b}) out of range for {n} worlds")
            rows[a] |= 1 << b
        return cls(n, rows)

    @classmethod
    def identity(cls, n: int) -> "Relation":
        return cls(n, [1 << i for i in range(n)])

    @classmethod
    def empty(cls, n: int) -> "Relation":
        return cls(n, [0] * n)

    @classmethod
    def full(cls, n: int) -> "Relation":
        return cls(n, [(1 << n) - 1] * n)

    def __call__(self, a: int, b: int) -> bool:
        return bool(self.rows[a] >> b & 1)

    def __eq__(self, other):
        return isinstance(other, Relation) and self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash((self.n, self.rows))

    def __le__(self, other: "Relation") -> bool:
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def __repr__(self):
        return f"Relation({self.n}, {sorted(self.pairs())})"

    def pairs(self) -> List[Tuple[int, int]]:
        return [(a, b) for a in range(self.n) for b in bits(self.rows[a])]

    @property
    def cols(self) -> Tuple[int, ...]:
        """Column bitmasks, i.e. the rows of the converse."""
        if self._cols is None:
            cols = [0] * self.n
            for a, row in enumerate(self.rows):
                for b in bits(row):
                    cols[b] |= 1 << a
            self._cols = tuple(cols)
        return self._cols

    def converse(self) -> "Relation":
        return Relation(self.n, self.cols)

    def image(self, s: int) -> int:
        out = 0
        for a in bits(s):
            out |= self.rows[a]
        return out

    def union(self, other: "Relation") -> "Relation":
        _same_size(self, other)
        return Relation(self.n, [a | b for a, b in zip(self.rows, other.rows)])

    def is_reflexive(self) -> bool:
        return all(row >> i & 1 for i, row in enumerate(self.rows))

    def is_transitive(self) -> bool:
        return all(self.image(row) & ~row == 0 for row in self.rows)

    def is_preorder(self) -> bool:
        return self.is_reflexive() and self.is_transitive()


def _same_size(r: Relation, s: Relation):
    if r.n != s.n:
        raise ModelError(f"relation size mismatch: {r.n} vs {s.n}")


def compose(r: Relation, s: Relation) -> Relation:
    """``x (r;s) y`` iff some z has ``x r z`` and ``z s y``."""
    _same_size(r, s)
    return Relation(r.n, [s.image(row) for row in r.rows])


def transitive_closure(r: Relation) -> Relation:
    rows = list(r.rows)
    # Warshall over bit rows
    for k in range(r.n):
        bit = 1 << k
        rk = rows[k]
        for i in range(r.n):
            if rows[i] & bit:
                rows[i] |= rk
    return Relation(r.n, rows)


def reflexive_transitive_closure(r: Relation) -> Relation:
    return transitive_closure(r.union(Relation.identity(r.n)))


# ---------------------------------------------------------------- models

@dataclass(frozen=True)
class BirelationalModel:
    """``(W, W_bot, pre, mod, val)`` with ``pre`` the intuitionistic relation.

    Nothing is repaired on construction; use :func:`well_formed` to validate.
    """
    n: int
    pre: Relation
    mod: Relation
    fallible: int = 0
    val: Dict[str, int] = field(default_factory=dict)
    names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.pre.n != self.n or self.mod.n != self.n:
            raise ModelError("relations must be n x n")
        if self.fallible >> self.n:
            raise ModelError("fallible set refers to a world index >= n")
        for p, s in self.val.items():
            if s >> self.n:
                raise ModelError(f"val({p}) refers to a world index >= n")
        if self.names is not None and len(self.names) != self.n:
            raise ModelError("names must have one entry per world")

    def __hash__(self):
        return hash((self.n, self.pre, self.mod, self.fallible,
                     tuple(sorted(self.val.items())), self.names))

    @property
    def worlds(self) -> int:
        return (1 << self.n) - 1

    def name(self, w: int) -> str:
        return self.names[w] if self.names else str(w)

    def world_index(self, name: str) -> int:
        if self.names and name in self.names:
            return self.names.index(name)
        if not self.names and name.isdigit() and int(name) < self.n:
            return int(name)
        raise ModelError(f"unknown world {name!r}")

    def with_val(self, val: Dict[str, int]) -> "BirelationalModel":
        return BirelationalModel(self.n, self.pre, self.mod, self.fallible, dict(val), self.names)

    @cached_property
    def box_reach(self) -> Tuple[int, ...]:
        """``box_reach[w]``: worlds v with ``w pre u mod v`` for some u."""
        return tuple(self.mod.image(row) for row in self.pre.rows)

    @cached_property
    def report(self) -> "WellFormedReport":
        return well_formed(self)


@dataclass
class Diagnostic:
    message: str
    witness: tuple = ()

    def __str__(self):
        return self.message


@dataclass
class WellFormedReport:
    violations: List[Diagnostic]
    grade: str  # "bi-intuitionistic", "birelational" or "invalid"

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        if self.ok:
            return f"well-formed ({self.grade})"
        return "\n".join(str(d) for d in self.violations)


def _closure_failure(rel: Relation, s: int) -> Optional[Tuple[int, int]]:
    for a in bits(s):
        outside = rel.rows[a] & ~s
        if outside:
            return a, next(bits(outside))
    return None


def well_formed(m: BirelationalModel) -> WellFormedReport:
    """Check the model invariants; violations carry witnesses.

    ``mod`` failing to be a preorder is not a violation: the model is then
    graded ``birelational`` instead of ``bi-intuitionistic``.
    """
    out: List[Diagnostic] = []
    name = m.name

    def pair(bad):
        return f"({name(bad[0])},{name(bad[1])})"

    for w in range(m.n):
        if not m.pre(w, w):
            out.append(Diagnostic(f"pre not reflexive at {name(w)}", (w,)))
    t = _transitivity_witness(m.pre)
    if t:
        a, b, c = t
        out.append(Diagnostic(
            f"pre not transitive: {name(a)}<={name(b)}<={name(c)} but not {name(a)}<={name(c)}", t))
    bad = _closure_failure(m.pre, m.fallible)
    if bad:
        out.append(Diagnostic(f"fallible not up-closed under pre, witness {pair(bad)}", bad))
    bad = _closure_failure(m.mod, m.fallible)
    if bad:
        out.append(Diagnostic(f"fallible not closed under mod, witness {pair(bad)}", bad))
    for p in sorted(m.val):
        s = m.val[p]
        bad = _closure_failure(m.pre, s)
        if bad:
            out.append(Diagnostic(f"val({p}) not up-closed, witness {pair(bad)}", (p,) + bad))
        missing = m.fallible & ~s
        if missing:
            w = next(bits(missing))
            out.append(Diagnostic(f"val({p}) does not contain fallible world {name(w)}", (p, w)))
    if out:
        grade = "invalid"
    elif m.mod.is_preorder():
        grade = "bi-intuitionistic"
    else:
        grade = "birelational"
    return WellFormedReport(out, grade)


def _transitivity_witness(r: Relation) -> Optional[Tuple[int, int, int]]:
    for a in range(r.n):
        for b in bits(r.rows[a]):
            extra = r.rows[b] & ~r.rows[a]
            if extra:
                return a, b, next(bits(extra))
    return None


# ---------------------------------------------------------------- frame conditions

@dataclass
class FrameProperties:
    """Each entry maps a property name to ``None`` (holds) or a witness tuple."""
    witnesses: Dict[str, Optional[tuple]]

    def __getitem__(self, key: str) -> bool:
        return self.witnesses[key] is None

    def __getattr__(self, key):
        w = self.__dict__.get("witnesses")
        if w is not None and key in w:
            return w[key] is None
        raise AttributeError(key)

    def witness(self, key: str) -> Optional[tuple]:
        return self.witnesses[key]

    def holds(self) -> FrozenSet[str]:
        return frozenset(k for k, v in self.witnesses.items() if v is None)


PROPERTY_NAMES = ("pre_preorder", "mod_preorder", "forth_up", "back_up", "forth_down",
                  "upward_linear", "downward_linear", "pointwise_convex", "infallible")


def forth_up_witness(pre: Relation, r: Relation) -> Optional[tuple]:
    """``(w, w2, v)`` with w pre w2, w r v and no v2 >= v with w2 r v2."""
    for w in range(pre.n):
        for w2 in bits(pre.rows[w]):
            for v in bits(r.rows[w]):
                if r.rows[w2] & pre.rows[v] == 0:
                    return (w, w2, v)
    return None


def back_up_witness(pre: Relation, r: Relation) -> Optional[tuple]:
    """``(w, v, v2)`` with w r v pre v2 and no w2 >= w with w2 r v2."""
    cols = r.cols
    for w in range(pre.n):
        for v in bits(r.rows[w]):
            for v2 in bits(pre.rows[v]):
                if pre.rows[w] & cols[v2] == 0:
                    return (w, v, v2)
    return None


def forth_down_witness(pre: Relation, r: Relation) -> Optional[tuple]:
    """``(w, v, v2)`` with w pre v r v2 and no w2 with w r w2 pre v2."""
    pre_cols = pre.cols
    for w in range(pre.n):
        for v in bits(pre.rows[w]):
            for v2 in bits(r.rows[v]):
                if r.rows[w] & pre_cols[v2] == 0:
                    return (w, v, v2)
    return None


def upward_linear_witness(pre: Relation) -> Optional[tuple]:
    for w in range(pre.n):
        for u in bits(pre.rows[w]):
            for v in bits(pre.rows[w]):
                if u < v and not pre(u, v) and not pre(v, u):
                    return (w, u, v)
    return None


def downward_linear_witness(pre: Relation) -> Optional[tuple]:
    cols = pre.cols
    for w in range(pre.n):
        for u in bits(cols[w]):
            for v in bits(cols[w]):
                if u < v and not pre(u, v) and not pre(v, u):
                    return (u, v, w)
    return None


def pointwise_convex_witness(pre: Relation, r: Relation) -> Optional[tuple]:
    """``(u, v1, w, v2)`` with u r v1, u r v2, v1 pre w pre v2 but not u r w."""
    cols = pre.cols
    for u in range(r.n):
        row = r.rows[u]
        for v1 in bits(row):
            for v2 in bits(row):
                between = pre.rows[v1] & cols[v2] & ~row
                if between:
                    return (u, v1, next(bits(between)), v2)
    return None


def frame_properties(m: BirelationalModel) -> FrameProperties:
    pre, mod = m.pre, m.mod

    def preorder_witness(r):
        for w in range(r.n):
            if not r(w, w):
                return (w,)
        return _transitivity_witness(r)

    fallible = next(bits(m.fallible), None)
    return FrameProperties({
        "pre_preorder": preorder_witness(pre),
        "mod_preorder": preorder_witness(mod),
        "forth_up": forth_up_witness(pre, mod),
        "back_up": back_up_witness(pre, mod),
        "forth_down": forth_down_witness(pre, mod),
        "upward_linear": upward_linear_witness(pre),
        "downward_linear": downward_linear_witness(pre),
        "pointwise_convex": pointwise_convex_witness(pre, mod),
        "infallible": None if fallible is None else (fallible,),
    })


class FrameClass(enum.Enum):
    CS4 = "CS4"
    IS4 = "IS4"
    S4I = "S4I"
    GS4 = "GS4"
    GS4c = "GS4c"
    BiIntuitionistic = "BiIntuitionistic"
    Birelational = "Birelational"

    @classmethod
    def parse(cls, text: str) -> "FrameClass":
        key = text.strip().lower().replace("-", "").replace("_", "")
        for c in cls:
            if c.value.lower() == key:
                return c
        aliases = {"gs4^c": cls.GS4c, "biint": cls.BiIntuitionistic, "birel": cls.Birelational}
        if key in aliases:
            return aliases[key]
        raise ValueError(f"unknown frame class {text!r}")


LOGIC_CLASSES = (FrameClass.CS4, FrameClass.IS4, FrameClass.S4I, FrameClass.GS4, FrameClass.GS4c)


class NotAFrame(ModelError):
    pass


def classes_from_properties(props: FrozenSet[str]) -> FrozenSet[FrameClass]:
    """Logic frame classes implied by a set of holding properties.

    Assumes the structural checks already passed; ``pre_preorder`` and
    ``mod_preorder`` in ``props`` make the frame bi-intuitionistic.
    """
    out = set()
    if not {"pre_preorder", "mod_preorder"} <= props:
        return frozenset()
    cs4 = "back_up" in props
    is4 = cs4 and {"forth_up", "infallible"} <= props
    s4i = {"forth_up", "forth_down", "infallible"} <= props
    gs4 = is4 and "upward_linear" in props
    gs4c = gs4 and "forth_down" in props
    for flag, c in ((cs4, FrameClass.CS4), (is4, FrameClass.IS4), (s4i, FrameClass.S4I),
                    (gs4, FrameClass.GS4), (gs4c, FrameClass.GS4c)):
        if flag:
            out.add(c)
    return frozenset(out)


def classify(m: BirelationalModel) -> FrozenSet[FrameClass]:
    """Which of the five logic frame classes ``m``'s frame belongs to."""
    report = well_formed(m)
    if report.grade == "invalid":
        raise NotAFrame("not a frame: " + "; ".join(map(str, report.violations)))
    return classes_from_properties(frame_properties(m).holds())


def in_class(m: BirelationalModel, cls: FrameClass) -> bool:
    if cls is FrameClass.Birelational:
        return well_formed(m).grade != "invalid"
    if cls is FrameClass.BiIntuitionistic:
        return well_formed(m).grade == "bi-intuitionistic"
    return cls in classify(m)


def frame_in_class(pre: Relation, mod: Relation, fallible: int, cls: FrameClass) -> bool:
    """Class test on a bare frame, assuming both relations are preorders and
    ``fallible`` is closed under both."""
    if cls in (FrameClass.Birelational, FrameClass.BiIntuitionistic):
        return True
    if cls is not FrameClass.CS4 and fallible:
        return False
    if cls is FrameClass.S4I:
        return forth_up_witness(pre, mod) is None and forth_down_witness(pre, mod) is None
    if back_up_witness(pre, mod) is not None:
        return False
    if cls is FrameClass.CS4:
        return True
    if forth_up_witness(pre, mod) is not None:
        return False
    if cls is FrameClass.IS4:
        return True
    if upward_linear_witness(pre) is not None:
        return False
    if cls is FrameClass.GS4:
        return True
    return forth_down_witness(pre, mod) is None


# ---------------------------------------------------------------- file format

def up_closed(rel: Relation, s: int) -> bool:
    return all(rel.rows[a] & ~s == 0 for a in bits(s))


def parse_model(text: str) -> BirelationalModel:
    """Read the line-oriented ``birel v1`` format."""
    names: List[str] = []
    index: Dict[str, int] = {}
    pre_pairs, mod_pairs, fallible, val = [], [], [], {}
    close = set()
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if not header_seen:
            if parts != ["birel", "v1"]:
                raise ModelError(f"line {lineno}: expected header 'birel v1'")
            header_seen = True
            continue
        kw, args = parts[0], parts[1:]

        def lookup(nm):
            if nm not in index:
                raise ModelError(f"line {lineno}: unknown world {nm!r}")
            return index[nm]

        if kw == "world":
            if len(args) != 1:
                raise ModelError(f"line {lineno}: 'world' takes one name")
            if args[0] in index:
                raise ModelError(f"line {lineno}: duplicate world {args[0]!r}")
            index[args[0]] = len(names)
            names.append(args[0])
        elif kw == "fallible":
            if not args:
                raise ModelError(f"line {lineno}: 'fallible' needs a world")
            fallible.extend(lookup(a) for a in args)
        elif kw in ("pre", "mod"):
            if len(args) != 2:
                raise ModelError(f"line {lineno}: '{kw}' takes two worlds")
            (pre_pairs if kw == "pre" else mod_pairs).append((lookup(args[0]), lookup(args[1])))
        elif kw == "val":
            if not args:
                raise ModelError(f"line {lineno}: 'val' needs a proposition")
            val[args[0]] = val.get(args[0], 0) | mask_of(lookup(a) for a in args[1:])
        elif kw == "close":
            if args not in (["pre"], ["mod"]):
                raise ModelError(f"line {lineno}: 'close' takes 'pre' or 'mod'")
            close.add(args[0])
        else:
            raise ModelError(f"line {lineno}: unknown directive {kw!r}")
    if not header_seen:
        raise ModelError("empty model file")
    n = len(names)
    pre = Relation.from_pairs(n, pre_pairs)
    mod = Relation.from_pairs(n, mod_pairs)
    if "pre" in close:
        pre = reflexive_transitive_closure(pre)
    if "mod" in close:
        mod = reflexive_transitive_closure(mod)
    return BirelationalModel(n, pre, mod, mask_of(fallible), val, tuple(names))


def dump_model(m: BirelationalModel) -> str:
    """Write ``m`` in ``birel v1`` format, every edge listed explicitly."""
    nm = m.name
    lines = ["birel v1"]
    lines += [f"world {nm(w)}" for w in range(m.n)]
    lines += [f"fallible {nm(w)}" for w in bits(m.fallible)]
    lines += [f"pre {nm(a)} {nm(b)}" for a, b in m.pre.pairs()]
    lines += [f"mod {nm(a)} {nm(b)}" for a, b in m.mod.pairs()]
    for p in sorted(m.val):
        lines.append(" ".join(["val", p] + [nm(w) for w in bits(m.val[p])]))
    return "\n".join(lines) + "\n"


def make_model(n: int, pre=(), mod=(), fallible=(), val=None, names=None,
               close: bool = True) -> BirelationalModel:
    """Convenience constructor from pair lists; closes both relations by default."""
    pre_r = Relation.from_pairs(n, pre)
    mod_r = Relation.from_pairs(n, mod)
    if close:
        pre_r = reflexive_transitive_closure(pre_r)
        mod_r = reflexive_transitive_closure(mod_r)
    v = {p: (s if isinstance(s, int) else mask_of(s)) for p, s in (val or {}).items()}
    return BirelationalModel(n, pre_r, mod_r, mask_of(fallible), v,
                             tuple(names) if names else None)


def isomorphic(a: BirelationalModel, b: BirelationalModel, with_val: bool = True) -> bool:
    """Brute-force isomorphism test for small models."""
    from itertools import permutations
    if a.n != b.n or bin(a.fallible).count("1") != bin(b.fallible).count("1"):
        return False
    if with_val and set(a.val) != set(b.val):
        return False

    def img(s, perm):
        return mask_of(perm[i] for i in bits(s))

    for perm in permutations(range(a.n)):
        if img(a.fallible, perm) != b.fallible:
            continue
        if any(img(a.pre.rows[i], perm) != b.pre.rows[perm[i]] for i in range(a.n)):
            continue
        if any(img(a.mod.rows[i], perm) != b.mod.rows[perm[i]] for i in range(a.n)):
            continue
        if with_val and any(img(a.val[p], perm) != b.val[p] for p in a.val):
            continue
        return True
    return False


FIXTURES = ("n_cs4", "gd_fork", "cd_gs4", "fs2_s4i")


def fixture_model(name: str) -> BirelationalModel:
    """A bundled ``birel v1`` model by name (see ``FIXTURES``)."""
    from importlib.resources import files
    return parse_model(files("birellab.data.models").joinpath(f"{name}.birel").read_text())
