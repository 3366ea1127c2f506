"""Birelational semantics for intuitionistic S4 logics: model checking,
bisimulation quotients, bounded search and proof checking."""
from .formula import Formula, parse, to_text
from .model import BirelationalModel, FrameClass, classify, make_model, parse_model
from .semantics import eval, forces

__all__ = ["Formula", "parse", "to_text", "BirelationalModel", "FrameClass", "classify",
           "make_model", "parse_model", "eval", "forces"]
__version__ = "0.1.0"
