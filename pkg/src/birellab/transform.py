"""Model constructions: convex closure, downward linearization, depth, towers."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

from .model import (BirelationalModel, FrameClass, ModelError, Relation, bits, classify,
                    pointwise_convex_witness)


class TransformError(ModelError):
    pass


class BoundExceeded(OverflowError):
    pass


DEFAULT_CAP_BITS = 1 << 20


def convex_closure(pre: Relation, r: Relation) -> Relation:
    """Add every w lying pre-between two r-successors of the same world."""
    down = pre.cols
    rows = []
    for u in range(r.n):
        row = r.rows[u]
        above = below = 0
        for v in bits(row):
            above |= pre.rows[v]
            below |= down[v]
        rows.append(above & below)
    return Relation(r.n, rows)


def convexify(m: BirelationalModel) -> BirelationalModel:
    return BirelationalModel(m.n, m.pre, convex_closure(m.pre, m.mod), m.fallible,
                             dict(m.val), m.names)


def _require(m: BirelationalModel, cls: FrameClass):
    got = classify(m)
    if cls not in got:
        names = ", ".join(sorted(c.value for c in got)) or "none"
        raise TransformError(f"model is not a {cls.value} model (classes: {names})")


def _linearize(m: BirelationalModel, both: bool):
    pairs = [(v, w) for v in range(m.n) for w in bits(m.pre.rows[v])]
    index: Dict[Tuple[int, int], int] = {p: i for i, p in enumerate(pairs)}
    k = len(pairs)
    pre_rows = [0] * k
    mod_rows = [0] * k
    for i, (v1, w1) in enumerate(pairs):
        for j, (v2, w2) in enumerate(pairs):
            if v1 == v2 and m.pre(w1, w2):
                pre_rows[i] |= 1 << j
            if m.mod(w1, w2) and (not both or m.mod(v1, v2)):
                mod_rows[i] |= 1 << j

    def lift(s):
        return sum(1 << i for i, (_, w) in enumerate(pairs) if s >> w & 1)

    names = tuple(f"{m.name(v)}.{m.name(w)}" for v, w in pairs)
    out = BirelationalModel(k, Relation(k, pre_rows), Relation(k, mod_rows), lift(m.fallible),
                            {p: lift(s) for p, s in m.val.items()}, names)
    return out, index


def linearize_gs4(m: BirelationalModel):
    """Split ``m`` into the disjoint principal up-sets ``{(v, w) : v pre w}``.

    The modal relation only compares second coordinates.  Returns the new
    model and the map ``(v, w) -> new world``; (v, w) forces what w forces.
    """
    _require(m, FrameClass.GS4)
    return _linearize(m, both=False)


def linearize_gs4c(m: BirelationalModel):
    """Like :func:`linearize_gs4`, but ``(v1,w1) mod (v2,w2)`` needs both
    ``v1 mod v2`` and ``w1 mod w2``.  ``m`` must be pointwise convex;
    apply :func:`convexify` first if it is not."""
    _require(m, FrameClass.GS4c)
    wit = pointwise_convex_witness(m.pre, m.mod)
    if wit is not None:
        raise TransformError(f"model is not pointwise convex, witness {wit}")
    return _linearize(m, both=True)


@dataclass(frozen=True)
class Depth:
    per_world: Tuple[int, ...]

    @property
    def model(self) -> int:
        return max(self.per_world, default=0)


def depth(m: BirelationalModel) -> Depth:
    """Longest strict pre-chain from each world, over the cluster condensation."""
    pre = m.pre
    down = pre.cols
    # strict successors have strictly smaller up-sets, so this order is topological
    order = sorted(range(m.n), key=lambda w: bin(pre.rows[w]).count("1"))
    d = [0] * m.n
    for w in order:
        strict = pre.rows[w] & ~down[w]
        d[w] = 1 + max((d[v] for v in bits(strict)), default=-1)
    return Depth(tuple(d))


def superexp(m: int, k: int, cap_bits: int = DEFAULT_CAP_BITS) -> int:
    """``2_k^m``: m under a tower of k twos.  Raises BoundExceeded past the cap."""
    if m < 0 or k < 0:
        raise ValueError("superexp needs natural arguments")
    x = m
    for _ in range(k):
        if x + 1 > cap_bits:
            raise BoundExceeded(f"2_{k}^{m} exceeds {cap_bits} bits")
        x = 1 << x
    return x


def _tower_or_none(m: int, k: int, cap_bits: int):
    try:
        return superexp(m, k, cap_bits)
    except BoundExceeded:
        return None


def tower_le(c: int, a: int, b: int, k: int, cap_bits: int = DEFAULT_CAP_BITS) -> bool:
    """Decide ``c + 2_k^a <= 2_k^b`` exactly, without building huge towers.

    Towers are strictly increasing in their argument, and for k >= 1,
    ``2^Y - 2^X = 2^X (2^(Y-X) - 1)`` when Y > X.
    """
    if c < 0:
        raise ValueError("c must be natural")
    if k == 0:
        return c + a <= b
    if a > b:
        return False
    if a == b:
        return c == 0
    # now X = 2_{k-1}^a < Y = 2_{k-1}^b
    X = _tower_or_none(a, k - 1, cap_bits)
    if X is None or X >= c.bit_length():
        return True  # 2^X > c and 2^(Y-X) - 1 >= 1
    Y = _tower_or_none(b, k - 1, cap_bits)
    if Y is None or Y - X > c.bit_length():
        return True
    return (1 << X) * ((1 << (Y - X)) - 1) >= c


def step_inequality(m: int, n: int, k: int, cap_bits: int = DEFAULT_CAP_BITS) -> bool:
    """``2^m * 2_k^((n-1)m) <= 2_k^(nm)``.

    Uses plain big-integer arithmetic when both sides fit under the cap,
    and the exact comparison of :func:`tower_le` otherwise.
    """
    lo = _tower_or_none((n - 1) * m, k, cap_bits)
    hi = _tower_or_none(n * m, k, cap_bits)
    if lo is not None and hi is not None and lo.bit_length() + m <= cap_bits:
        return (lo << m) <= hi
    if k == 0:
        return (n - 1) * m << m <= n * m
    # 2^m * 2^X <= 2^Y  iff  m + X <= Y  with X, Y towers of height k - 1
    return tower_le(m, (n - 1) * m, n * m, k - 1, cap_bits)
