"""Observational transition systems written in a CafeOBJ subset: parse, check,
execute by rewriting, and translate into JML-annotated Java contracts."""

__version__ = "0.1.0"

from .analyzer import (ComponentEffect, MethodGroup, OtsModel, check_composition, classify,
                       dump_model, method_groups)
from .diagnostics import Diagnostic, SourceSpan, SpecError
from .interpreter import (ABSENT, DomainBounds, Equivalence, Interpreter, InterpreterError,
                          StateValue, TraceStep)
from .modules import ModuleSet, resolve_sort, sort_of
from .parser import parse_spec, parse_term, parse_text
from .rewrite import FuelExhausted, RewriteError, Rewriter, StuckTerm, reduce
from .spec_ast import App, Equation, Lit, OperatorDecl, SortDecl, SpecModule, Term, Var

__all__ = [
    "ABSENT", "App", "ComponentEffect", "Diagnostic", "DomainBounds", "Equation", "Equivalence",
    "FuelExhausted", "Interpreter", "InterpreterError", "Lit", "MethodGroup", "ModuleSet",
    "OperatorDecl", "OtsModel", "RewriteError", "Rewriter", "SortDecl", "SourceSpan",
    "SpecError", "SpecModule", "StateValue", "StuckTerm", "Term", "TraceStep", "Var",
    "check_composition", "classify", "dump_model", "method_groups", "parse_spec", "parse_term",
    "parse_text", "reduce", "resolve_sort", "sort_of",
]
