"""Hilbert-style proof checking for CS4 and its extensions."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, List, Optional, Sequence, Tuple, Union

from .formula import (BOTTOM, And, Bottom, Box, Dia, Formula, FormulaSyntaxError, Implies,
                      Or, Var, big_and, big_or, match_schema, parse)
from .model import FrameClass


class AxiomName(enum.Enum):
    K_BOX = "[](p -> q) -> ([]p -> []q)"
    K_DIA = "[](p -> q) -> (<>p -> <>q)"
    T_BOX = "[]p -> p"
    T_DIA = "p -> <>p"
    FOUR_BOX = "[]p -> [][]p"
    FOUR_DIA = "<><>p -> <>p"
    DP = "<>(p | q) -> <>p | <>q"
    FS2 = "(<>p -> []q) -> [](p -> q)"
    CD = "[](p | q) -> []p | <>q"
    N = "~<>false"
    GD = "(p -> q) | (q -> p)"

    @property
    def schema(self) -> Formula:
        return _schema(self)

    @classmethod
    def parse(cls, text: str) -> "AxiomName":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown axiom {text!r}") from None


@lru_cache(maxsize=None)
def _schema(name: AxiomName) -> Formula:
    return parse(name.value)


A = AxiomName
CORE = frozenset({A.K_BOX, A.K_DIA, A.T_BOX, A.T_DIA, A.FOUR_BOX, A.FOUR_DIA})
_EXTRA = {
    FrameClass.CS4: frozenset(),
    FrameClass.IS4: frozenset({A.DP, A.N, A.FS2}),
    FrameClass.S4I: frozenset({A.DP, A.N, A.CD}),
    FrameClass.GS4: frozenset({A.DP, A.N, A.FS2, A.GD}),
    FrameClass.GS4c: frozenset({A.DP, A.N, A.FS2, A.GD, A.CD}),
}


def logic_axioms(logic: FrameClass) -> FrozenSet[AxiomName]:
    if logic not in _EXTRA:
        raise ValueError(f"{logic.value} is not one of the five logics")
    return CORE | _EXTRA[logic]


# ---------------------------------------------------------------- IPC

def _atomic(f: Formula) -> bool:
    return isinstance(f, (Var, Box, Dia))


def ipc_decide(f: Formula) -> bool:
    """Intuitionistic validity, with modal subformulas read as atoms.

    Contraction-free sequent search; every rule application shrinks the
    sequent in the multiset ordering, so the search terminates.
    """
    return _prove(frozenset(), f)


@lru_cache(maxsize=1 << 16)
def _prove(gamma: FrozenSet[Formula], goal: Formula) -> bool:
    if BOTTOM in gamma or goal in gamma:
        return True
    # invertible left rules
    for f in gamma:
        rest = gamma - {f}
        if isinstance(f, And):
            return _prove(rest | {f.left, f.right}, goal)
        if isinstance(f, Or):
            return _prove(rest | {f.left}, goal) and _prove(rest | {f.right}, goal)
        if isinstance(f, Implies):
            a, c = f.left, f.right
            if isinstance(a, Bottom):
                return _prove(rest, goal)
            if _atomic(a) and a in gamma:
                return _prove(rest | {c}, goal)
            if isinstance(a, And):
                return _prove(rest | {Implies(a.left, Implies(a.right, c))}, goal)
            if isinstance(a, Or):
                return _prove(rest | {Implies(a.left, c), Implies(a.right, c)}, goal)
    # invertible right rules
    if isinstance(goal, And):
        return _prove(gamma, goal.left) and _prove(gamma, goal.right)
    if isinstance(goal, Implies):
        return _prove(gamma | {goal.left}, goal.right)
    if isinstance(goal, Or) and (_prove(gamma, goal.left) or _prove(gamma, goal.right)):
        return True
    # (a -> b) -> c on the left
    for f in gamma:
        if isinstance(f, Implies) and isinstance(f.left, Implies):
            rest = gamma - {f}
            a, b, c = f.left.left, f.left.right, f.right
            if _prove(rest | {Implies(b, c)}, Implies(a, b)) and _prove(rest | {c}, goal):
                return True
    return False


# ---------------------------------------------------------------- proofs

@dataclass(frozen=True)
class AxiomInstance:
    name: AxiomName


@dataclass(frozen=True)
class IntTaut:
    pass


@dataclass(frozen=True)
class MP:
    """Line ``i`` is the implication, line ``j`` its antecedent (1-based)."""
    i: int
    j: int


@dataclass(frozen=True)
class Nec:
    i: int


Justification = Union[AxiomInstance, IntTaut, MP, Nec]


@dataclass(frozen=True)
class Proof:
    logic: FrameClass
    lines: Tuple[Tuple[Formula, Justification], ...]

    @property
    def conclusion(self) -> Optional[Formula]:
        return self.lines[-1][0] if self.lines else None


@dataclass(frozen=True)
class Rejection:
    line: int
    reason: str

    def __str__(self):
        return f"line {self.line}: {self.reason}"


def _check_line(pr: Proof, k: int, f: Formula, j: Justification) -> Optional[str]:
    def earlier(i):
        if not 1 <= i < k:
            raise IndexError(f"reference to line {i} is not an earlier line")
        return pr.lines[i - 1][0]

    try:
        if isinstance(j, AxiomInstance):
            if j.name not in logic_axioms(pr.logic):
                return f"{j.name.name} not available in {pr.logic.value}"
            if match_schema(j.name.schema, f) is None:
                return f"not an instance of {j.name.name}"
        elif isinstance(j, IntTaut):
            if not ipc_decide(f):
                return "not an intuitionistic tautology"
        elif isinstance(j, MP):
            imp, ante = earlier(j.i), earlier(j.j)
            if not isinstance(imp, Implies):
                return f"line {j.i} is not an implication"
            if imp.left != ante:
                return f"line {j.j} does not match the antecedent of line {j.i}"
            if imp.right != f:
                return f"formula is not the consequent of line {j.i}"
        elif isinstance(j, Nec):
            if f != Box(earlier(j.i)):
                return f"formula is not [] of line {j.i}"
        else:
            return f"unknown justification {j!r}"
    except IndexError as e:
        return str(e)
    return None


def check_proof(pr: Proof) -> Optional[Rejection]:
    """None when every line checks, else the first failing line."""
    if pr.logic not in _EXTRA:
        return Rejection(0, f"{pr.logic.value} is not one of the five logics")
    if not pr.lines:
        return Rejection(0, "empty proof")
    for k, (f, j) in enumerate(pr.lines, 1):
        reason = _check_line(pr, k, f, j)
        if reason is not None:
            return Rejection(k, reason)
    return None


def entailment_formula(gamma: Sequence[Formula], delta: Sequence[Formula]) -> Formula:
    return Implies(big_and(gamma), big_or(delta))


def check_entailment_certificate(gamma: Sequence[Formula], delta: Sequence[Formula],
                                 pr: Proof) -> Optional[Rejection]:
    rej = check_proof(pr)
    if rej is not None:
        return rej
    want = entailment_formula(gamma, delta)
    if pr.conclusion != want:
        return Rejection(len(pr.lines), f"conclusion {pr.conclusion} does not match {want}")
    return None


# ---------------------------------------------------------------- file format

class ProofFormatError(ValueError):
    pass


def parse_proof(text: str) -> Proof:
    logic = None
    lines: List[Tuple[Formula, Justification]] = []
    header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header:
            if line.split() != ["proof", "v1"]:
                raise ProofFormatError(f"line {lineno}: expected header 'proof v1'")
            header = True
            continue
        if logic is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "logic":
                raise ProofFormatError(f"line {lineno}: expected 'logic <name>'")
            try:
                logic = FrameClass.parse(parts[1])
            except ValueError as e:
                raise ProofFormatError(f"line {lineno}: {e}") from None
            continue
        head, sep, body = line.partition("::")
        if not sep:
            raise ProofFormatError(f"line {lineno}: missing '::'")
        parts = head.split()
        if len(parts) < 2 or not parts[0].isdigit() or int(parts[0]) != len(lines) + 1:
            raise ProofFormatError(f"line {lineno}: expected proof line {len(lines) + 1}")
        rule, args = parts[1], parts[2:]
        try:
            if rule == "axiom" and len(args) == 1:
                just = AxiomInstance(AxiomName.parse(args[0]))
            elif rule == "taut" and not args:
                just = IntTaut()
            elif rule == "mp" and len(args) == 2:
                just = MP(int(args[0]), int(args[1]))
            elif rule == "nec" and len(args) == 1:
                just = Nec(int(args[0]))
            else:
                raise ValueError(f"bad rule {' '.join(parts[1:])!r}")
            f = parse(body)
        except FormulaSyntaxError as e:
            raise ProofFormatError(f"line {lineno}: {e}") from None
        except ValueError as e:
            raise ProofFormatError(f"line {lineno}: {e}") from None
        lines.append((f, just))
    if logic is None:
        raise ProofFormatError("missing header or logic line")
    return Proof(logic, tuple(lines))


def dump_proof(pr: Proof) -> str:
    out = ["proof v1", f"logic {pr.logic.value}"]
    for k, (f, j) in enumerate(pr.lines, 1):
        if isinstance(j, AxiomInstance):
            rule = f"axiom {j.name.name}"
        elif isinstance(j, IntTaut):
            rule = "taut"
        elif isinstance(j, MP):
            rule = f"mp {j.i} {j.j}"
        else:
            rule = f"nec {j.i}"
        out.append(f"{k} {rule} :: {f}")
    return "\n".join(out) + "\n"


SHIPPED_PROOFS = ("dia_imp", "dia_and", "box_and", "box_or")


def shipped_proof(name: str) -> Proof:
    from importlib.resources import files
    return parse_proof(files("birellab.data.proofs").joinpath(f"{name}.proof").read_text())
