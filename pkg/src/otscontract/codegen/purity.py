"""Structural check that contract expressions are side-effect free."""

from __future__ import annotations

from typing import Iterable

from ..diagnostics import Diagnostic, error
from .model import Call, ContractClass, Expr, Forall, Ghost, Name, New

# queries every translated class provides
_ALWAYS_PURE = {"equals"}


def _root(e: Expr) -> Expr:
    while isinstance(e, Call) and e.target is not None:
        e = e.target
    return e


def check_side_effects(cls: ContractClass, known: Iterable[ContractClass] = ()) -> list[Diagnostic]:
    """Every requires/ensures expression may call only pure methods, except on
    copies (the ghost pre-state or a freshly constructed object), and may name
    only parameters, binders and declared ghosts."""
    classes = [cls, *known]
    pure = set(_ALWAYS_PURE)
    ghosts = set()
    for c in classes:
        pure |= {m.name for m in c.methods if m.pure}
        ghosts |= {n for n, _ in c.ghost_fields}
    diags: list[Diagnostic] = []

    def visit(e: Expr, names: set[str], where: str):
        if isinstance(e, Forall):
            visit(e.body, names | {n for _, n in e.binders}, where)
            return
        if isinstance(e, Name) and e.name not in names:
            diags.append(error("contract-not-side-effect-free",
                               f"{where} refers to {e.name}, which is neither a parameter "
                               f"nor a bound variable"))
        if isinstance(e, Ghost) and e.name not in ghosts:
            diags.append(error("contract-not-side-effect-free",
                               f"{where} refers to undeclared ghost {e.name}"))
        if isinstance(e, Call) and e.method not in pure:
            if not isinstance(_root(e), (Ghost, New)):
                diags.append(error("contract-not-side-effect-free",
                                   f"{where} calls {e.method}, which is not a pure method, "
                                   f"on a live object"))
        for c in e.children():
            visit(c, names, where)

    for m in cls.methods:
        params = {n for n, _ in m.params}
        for case in m.cases:
            for clause in case.requires + case.ensures:
                visit(clause.expression, params, f"{cls.name}.{m.name} {clause.kind}")
    return diags
