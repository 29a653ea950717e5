"""Render a ContractClass as a JML-annotated Java compilation unit."""

from __future__ import annotations

import json
import re

from .model import (SET_GHOST, BinOp, BoolConst, Call, ContractCase, ContractClass,
                    ContractMethod, Expr, Forall, Ghost, IntConst, Name, Neg, New, Not, Null,
                    Result, This)

INDENT = "    "

_PREC = {"==>": 0, "||": 1, "&&": 2, "==": 3, "!=": 3, "<": 4, "<=": 4, ">": 4, ">=": 4,
         "+": 5, "-": 5, "*": 6}


def render_expr(e: Expr) -> str:
    """Java/JML text for an expression tree."""
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Ghost):
        return e.name
    if isinstance(e, This):
        return "this"
    if isinstance(e, Result):
        return "\\result"
    if isinstance(e, Null):
        return "null"
    if isinstance(e, BoolConst):
        return "true" if e.value else "false"
    if isinstance(e, IntConst):
        return str(e.value)
    if isinstance(e, Call):
        args = ", ".join(render_expr(a) for a in e.args)
        if e.target is None:
            return f"{e.method}({args})"
        target = render_expr(e.target)
        if isinstance(e.target, (BinOp, Not, Neg, Forall)):
            target = f"({target})"
        return f"{target}.{e.method}({args})"
    if isinstance(e, New):
        return f"new {e.cls}({', '.join(render_expr(a) for a in e.args)})"
    if isinstance(e, Not):
        inner = render_expr(e.operand)
        return f"!({inner})" if isinstance(e.operand, (BinOp, Neg)) else f"!{inner}"
    if isinstance(e, Neg):
        inner = render_expr(e.operand)
        return f"-({inner})" if isinstance(e.operand, (BinOp, Neg, IntConst)) else f"-{inner}"
    if isinstance(e, Forall):
        binders = ", ".join(f"{t} {n}" for t, n in e.binders)
        return f"(\\forall {binders}; {render_expr(e.body)})"
    if isinstance(e, BinOp):
        return _render_binop(e)
    raise TypeError(f"cannot render {e!r}")


def _flatten(e: Expr, op: str) -> list[Expr]:
    if isinstance(e, BinOp) and e.op == op:
        return _flatten(e.left, op) + _flatten(e.right, op)
    return [e]


def _render_binop(e: BinOp) -> str:
    if e.op in ("&&", "||"):
        parts = [_wrap_if_binop(x) for x in _flatten(e, e.op)]
        return f" {e.op} ".join(parts)
    if e.op == "==>":
        return f"{_wrap_if_binop(e.left)} ==> {_wrap_if_binop(e.right)}"
    p = _PREC[e.op]
    left = render_expr(e.left)
    right = render_expr(e.right)
    if isinstance(e.left, BinOp) and (_PREC[e.left.op] < p or (p <= 4 and _PREC[e.left.op] == p)):
        left = f"({left})"
    if isinstance(e.right, BinOp) and _PREC[e.right.op] <= p:
        right = f"({right})"
    return f"{left} {e.op} {right}"


def _wrap_if_binop(e: Expr) -> str:
    s = render_expr(e)
    return f"({s})" if isinstance(e, BinOp) else s


# -- class rendering ------------------------------------------------------------

def _case_lines(case: ContractCase) -> list[str]:
    out = []
    if case.normal_behavior:
        out.append("public normal_behavior")
    for c in case.requires:
        out.append(f"requires {render_expr(c.expression)};")
    for c in case.ensures:
        out.append(f"ensures {render_expr(c.expression)};")
    if case.assignable:
        out.append(f"assignable {case.assignable};")
    return out


def _contract(m: ContractMethod) -> list[str]:
    if not m.cases:
        return []
    if len(m.cases) == 1 and not m.cases[0].normal_behavior:
        return [f"//@ {line}" for line in _case_lines(m.cases[0])]
    body: list[str] = []
    for k, case in enumerate(m.cases):
        if k:
            body.append("also")
        body += _case_lines(case)
    return [f"/*@ {body[0]}"] + [f"  @ {line}" for line in body[1:]] + ["  @*/"]


def _method(m: ContractMethod, cls: ContractClass) -> list[str]:
    lines = _contract(m)
    params = ", ".join(f"{t} {n}" for n, t in m.params)
    mods = "public " + ("static " if m.static else "")
    if m.is_constructor:
        head = f"{mods}{m.name}({params}) {{"
    else:
        pure = "/*@ pure @*/ " if m.pure else ""
        head = f"{mods}{pure}{m.return_type} {m.name}({params}) {{"
    lines.append(head)
    for c in m.body_preamble:
        if c.kind == SET_GHOST:
            lines.append(f"{INDENT}//@ set {c.target} = {render_expr(c.expression)};")
    lines.append(f"{INDENT}// TODO: implement")
    if m.placeholder is not None:
        lines.append(f"{INDENT}return {m.placeholder};")
    lines.append("}")
    return lines


def emit_java_jml(cls: ContractClass) -> str:
    """One ``.java`` compilation unit: LF line endings, 4-space indentation."""
    ext = f" extends {cls.extends_name}" if cls.extends_name else ""
    out = [f"public class {cls.name}{ext} {{"]
    blocks: list[list[str]] = []
    if cls.ghost_fields:
        blocks.append([f"//@ public ghost {t} {n};" for n, t in cls.ghost_fields])
    for m in cls.methods:
        blocks.append(_method(m, cls))
    for k, block in enumerate(blocks):
        if k:
            out.append("")
        out += [INDENT + line if line else line for line in block]
    out.append("}")
    return "\n".join(out) + "\n"


def emit_json(cls: ContractClass) -> str:
    """ContractClass as JSON for non-Java backends."""
    return json.dumps(cls.to_json(), indent=2) + "\n"


def output_filename(cls: ContractClass, fmt: str = "java-jml") -> str:
    return f"{cls.name}.json" if fmt == "json" else f"{cls.name}.java"


_JML_MARK = re.compile(r"/\*@|@\*/|//@|^\s*@", re.M)


def normalize_jml(text: str) -> str:
    """Collapse whitespace and JML comment markers so that ``//@`` lines and
    ``/*@ ... @*/`` blocks with the same clauses compare equal."""
    text = _JML_MARK.sub(" ", text)
    return " ".join(text.split())
