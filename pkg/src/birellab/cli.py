"""Command-line interface.

Exit codes: 0 answered, 1 countermodel or rejection found, 2 input error,
3 world cap or size bound exceeded.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from .bisim import greatest_bisimulation, quotient
from .formula import FormulaSyntaxError, parse, subformula_closure, to_text
from .fuzzy import FuzzyModelError, fuzzy_eval, parse_fuzzy_model
from .model import (ModelError, FrameClass, classify, dump_model, frame_properties,
                    parse_model, well_formed)
from .proof import ProofFormatError, check_entailment_certificate, check_proof, parse_proof
from .search import (CapExceeded, SearchResult, check_entailment_bounded, complete_bound,
                     find_countermodel, find_satisfying)
from .semantics import truth_table
from .transform import BoundExceeded, convexify, linearize_gs4, linearize_gs4c

OK, FOUND, INPUT_ERROR, CAP = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _logic(text: str) -> FrameClass:
    try:
        return FrameClass.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _model(path: str):
    return parse_model(_read(path))


def _emit_model(m, world: Optional[int] = None, out: Optional[str] = None):
    text = dump_model(m)
    if world is not None:
        text = f"# world {m.name(world)}\n" + text
    sys.stdout.write(text)
    if out:
        try:
            Path(out).write_text(text)
        except OSError as e:
            raise InputError(f"cannot write {out}: {e.strerror}") from None


# ---------------------------------------------------------------- commands

def cmd_parse(args) -> int:
    print(to_text(parse(args.formula)))
    return OK


def cmd_check_model(args) -> int:
    m = _model(args.file)
    report = well_formed(m)
    print(f"{'WELL-FORMED' if report.ok else 'MALFORMED'} grade={report.grade}")
    for d in report.violations:
        print(f"violation {d}")
    if report.grade == "invalid":
        return FOUND
    props = frame_properties(m)
    for key, wit in props.witnesses.items():
        if wit is None:
            print(f"{key} yes")
        else:
            print(f"{key} no witness=({', '.join(m.name(w) for w in wit)})")
    classes = sorted(c.value for c in classify(m))
    print("classes " + (" ".join(classes) if classes else "none"))
    return OK if report.ok else FOUND


def cmd_eval(args) -> int:
    m = _model(args.model)
    f = parse(args.formula)
    print(f"EVAL {to_text(f)}")
    for name, value in truth_table(m, f):
        print(f"{name} {int(value)}")
    return OK


def cmd_fuzzy_eval(args) -> int:
    m = parse_fuzzy_model(_read(args.model))
    f = parse(args.formula)
    print(f"FUZZY-EVAL {to_text(f)}")
    for w, x in enumerate(fuzzy_eval(m, f)):
        print(f"{m.name(w)} {x.numerator}/{x.denominator}")
    return OK


def cmd_quotient(args) -> int:
    m = _model(args.model)
    sigma = subformula_closure(parse(args.sigma))
    e = greatest_bisimulation(m, sigma, args.strong)
    q, cls = quotient(m, e, sigma, args.strong)
    kind = "strong " if args.strong else ""
    print(f"# QUOTIENT {kind}worlds={m.n} classes={q.n} sigma={len(sigma)}")
    _emit_model(q, out=args.out)
    for w in range(m.n):
        print(f"# map {m.name(w)} {q.name(cls[w])}")
    return OK


def cmd_linearize(args) -> int:
    m = _model(args.model)
    if args.logic == "gs4":
        out, index = linearize_gs4(m)
    else:
        if args.convexify:
            m = convexify(m)
        out, index = linearize_gs4c(m)
    print(f"# LINEARIZED logic={args.logic} worlds={m.n} -> {out.n}")
    _emit_model(out, out=args.out)
    for (v, w), i in index.items():
        print(f"# map {m.name(v)} {m.name(w)} {out.name(i)}")
    return OK


def _search_kwargs(args):
    return dict(exhaustive=args.sample is None, samples=args.sample or 0,
                seed=args.seed, jobs=args.jobs)


def _report(res: SearchResult, found_label: str, none_label: str, logic: FrameClass,
            out: Optional[str]) -> None:
    head = [res.verdict(found_label, none_label), f"logic={logic.value}",
            f"max-worlds={res.max_n}", f"mode={res.mode}", f"checked={res.checked}"]
    if res.seed is not None:
        head.append(f"seed={res.seed}")
    print(" ".join(head))
    if res.found:
        _emit_model(res.model, res.world, out)


def cmd_decide(args) -> int:
    f = parse(args.formula)
    res = find_countermodel(f, args.logic, args.max_worlds, **_search_kwargs(args))
    _report(res, "COUNTERMODEL", "VALID-UP-TO-BOUND", args.logic, args.out)
    return FOUND if res.found else OK


def cmd_sat(args) -> int:
    f = parse(args.formula)
    res = find_satisfying(f, args.logic, args.max_worlds, **_search_kwargs(args))
    _report(res, "SATISFIABLE", "NONE-UP-TO-BOUND", args.logic, args.out)
    return OK if res.found else FOUND


def _formula_lines(text: str) -> List:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(parse(line))
    return out


def cmd_entail(args) -> int:
    gamma = _formula_lines(_read(args.premises)) if args.premises else []
    f = parse(args.formula)
    res = check_entailment_bounded(gamma, f, args.logic, args.max_worlds, **_search_kwargs(args))
    _report(res, "COUNTEREXAMPLE", "NONE-UP-TO-BOUND", args.logic, args.out)
    return FOUND if res.found else OK


def cmd_prove_check(args) -> int:
    pr = parse_proof(_read(args.proof))
    if args.gamma is not None or args.delta is not None:
        rej = check_entailment_certificate([parse(g) for g in args.gamma or []],
                                           [parse(d) for d in args.delta or []], pr)
    else:
        rej = check_proof(pr)
    if rej is None:
        print(f"ACCEPTED logic={pr.logic.value} lines={len(pr.lines)} :: {pr.conclusion}")
        return OK
    print(f"REJECTED {rej}")
    return FOUND


def cmd_bound(args) -> int:
    f = parse(args.formula)
    s = len(subformula_closure(f))
    print(f"sigma {s}")
    print(f"bound {complete_bound(f)}")
    return OK


# ---------------------------------------------------------------- wiring

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="birellab",
                                description="Birelational models for intuitionistic S4 logics.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("parse", help="print a formula in canonical form")
    s.add_argument("formula")
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("check-model", help="validate a model and report its frame classes")
    s.add_argument("file")
    s.set_defaults(func=cmd_check_model)

    s = sub.add_parser("eval", help="per-world truth table")
    s.add_argument("model")
    s.add_argument("formula")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("fuzzy-eval", help="per-world values in a real-valued model")
    s.add_argument("model")
    s.add_argument("formula")
    s.set_defaults(func=cmd_fuzzy_eval)

    s = sub.add_parser("quotient", help="quotient by the greatest sigma-bisimulation")
    s.add_argument("model")
    s.add_argument("--sigma", required=True, help="formula whose subformulas form sigma")
    s.add_argument("--strong", action="store_true")
    s.add_argument("--out", metavar="FILE", help="also write the model to FILE")
    s.set_defaults(func=cmd_quotient)

    s = sub.add_parser("linearize", help="downward linearization of a GS4 or GS4c model")
    s.add_argument("model")
    s.add_argument("--logic", choices=("gs4", "gs4c"), required=True)
    s.add_argument("--convexify", action="store_true",
                   help="take the convex closure first (gs4c only)")
    s.add_argument("--out", metavar="FILE", help="also write the model to FILE")
    s.set_defaults(func=cmd_linearize)

    for name, func, helptext in (
            ("decide", cmd_decide, "bounded countermodel search"),
            ("sat", cmd_sat, "bounded satisfiability search"),
            ("entail", cmd_entail, "bounded local consequence search")):
        s = sub.add_parser(name, help=helptext)
        if name == "entail":
            s.add_argument("--premises", help="file with one formula per line")
        s.add_argument("formula")
        s.add_argument("--logic", type=_logic, required=True)
        s.add_argument("--max-worlds", type=int, default=3)
        mode = s.add_mutually_exclusive_group()
        mode.add_argument("--exhaustive", action="store_true", help="the default")
        mode.add_argument("--sample", type=int, metavar="K")
        s.add_argument("--seed", type=int, default=None)
        s.add_argument("--jobs", type=int, default=1)
        s.add_argument("--out", metavar="FILE", help="also write the model to FILE")
        s.set_defaults(func=func)

    s = sub.add_parser("prove-check", help="check a proof v1 file")
    s.add_argument("proof")
    s.add_argument("--gamma", action="append", help="premise of an entailment certificate")
    s.add_argument("--delta", action="append", help="conclusion of an entailment certificate")
    s.set_defaults(func=cmd_prove_check)

    s = sub.add_parser("bound", help="subformula count and completeness bound")
    s.add_argument("formula")
    s.set_defaults(func=cmd_bound)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return INPUT_ERROR if e.code else OK
    if getattr(args, "max_worlds", 1) < 1:
        print("error: --max-worlds must be at least 1", file=sys.stderr)
        return INPUT_ERROR
    try:
        return args.func(args)
    except (CapExceeded, BoundExceeded) as e:
        print(f"error: {e}", file=sys.stderr)
        return CAP
    except (FormulaSyntaxError, ModelError, FuzzyModelError, ProofFormatError,
            InputError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
