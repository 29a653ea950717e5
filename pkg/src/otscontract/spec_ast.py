"""Typed abstract syntax for CafeOBJ-subset specification modules.

All node types are immutable.  Source spans ride along for diagnostics but
never take part in equality, so a pretty-printed and re-parsed module
compares equal to the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

from .diagnostics import SourceSpan

VISIBLE = "visible"
HIDDEN = "hidden"

# Wildcard arity slot used by the polymorphic builtin equality operators.
ANY_SORT = "*"

# Binary infix operator precedence, lowest binds loosest.  Shared with the
# parser so that printing and parsing agree.
INFIX_PRECEDENCE = {
    "or": 1,
    "and": 2,
    "==": 4,
    "=/=": 4,
    ">=": 5,
    ">": 5,
    "<=": 5,
    "<": 5,
    "+": 6,
    "-": 6,
    "*": 7,
}
NOT_PRECEDENCE = 3
USER_INFIX_PRECEDENCE = 6
UNARY_MINUS_PRECEDENCE = 8


@dataclass(frozen=True)
class SortDecl:
    name: str
    kind: str  # VISIBLE | HIDDEN
    supersorts: tuple[str, ...] = ()
    module: str = ""
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    @property
    def hidden(self) -> bool:
        return self.kind == HIDDEN


@dataclass(frozen=True)
class OperatorDecl:
    name: str
    arity: tuple[str, ...]
    coarity: str
    behavioral: bool = False
    module: str = ""
    builtin: bool = False
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    @property
    def mixfix_slots(self) -> tuple[int, ...]:
        return tuple(i for i, ch in enumerate(self.name) if ch == "_")

    @property
    def infix(self) -> str | None:
        """The operator symbol for ``_s_`` declarations, else None."""
        if len(self.name) > 2 and self.name[0] == "_" and self.name[-1] == "_" \
                and "_" not in self.name[1:-1]:
            return self.name[1:-1]
        return None

    @property
    def prefix(self) -> str | None:
        """The operator symbol for ``s_`` declarations (unary prefix)."""
        if len(self.name) > 1 and self.name[-1] == "_" and "_" not in self.name[:-1]:
            return self.name[:-1]
        return None

    @property
    def key(self) -> tuple[str, tuple[str, ...], str]:
        return (self.name, self.arity, self.module)

    def signature(self) -> str:
        kw = "bop" if self.behavioral else "op"
        return f"{kw} {self.name} : {' '.join(self.arity)} -> {self.coarity}".replace("  ", " ")


class Term:
    """Base class for terms.  Subclasses cache their hash."""

    __slots__ = ("_hash", "span")

    def variables(self) -> set["Var"]:
        out: set[Var] = set()
        for t in self.walk():
            if isinstance(t, Var):
                out.add(t)
        return out

    def walk(self) -> Iterator["Term"]:
        yield self

    @property
    def is_ground(self) -> bool:
        return not any(isinstance(t, Var) for t in self.walk())

    def __repr__(self) -> str:
        return f"{type(self).__name__}<{format_term(self)}>"

    def __str__(self) -> str:
        return format_term(self)


class Var(Term):
    __slots__ = ("name", "sort")

    def __init__(self, name: str, sort: str, span: SourceSpan | None = None):
        self.name = name
        self.sort = sort
        self.span = span
        self._hash = hash(("var", name, sort))

    def __eq__(self, other):
        return isinstance(other, Var) and self.name == other.name and self.sort == other.sort

    def __hash__(self):
        return self._hash


class Lit(Term):
    """Builtin literal: an integer, a boolean, or an identifier value."""

    __slots__ = ("value", "sort")

    def __init__(self, value: int | bool, sort: str, span: SourceSpan | None = None):
        self.value = value
        self.sort = sort
        self.span = span
        self._hash = hash(("lit", type(value), value, sort))

    def __eq__(self, other):
        return (isinstance(other, Lit) and self.sort == other.sort
                and type(self.value) is type(other.value) and self.value == other.value)

    def __hash__(self):
        return self._hash


class App(Term):
    """Operator application.  ``op`` is None until the term is sort-checked."""

    __slots__ = ("name", "args", "op")

    def __init__(self, name: str, args: tuple[Term, ...] = (),
                 op: OperatorDecl | None = None, span: SourceSpan | None = None):
        self.name = name
        self.args = tuple(args)
        self.op = op
        self.span = span
        self._hash = hash(("app", name, self.args, op.key if op else None))

    def __eq__(self, other):
        return (isinstance(other, App) and self._hash == other._hash
                and self.name == other.name and self.op == other.op
                and self.args == other.args)

    def __hash__(self):
        return self._hash

    def walk(self) -> Iterator[Term]:
        yield self
        for a in self.args:
            yield from a.walk()

    @property
    def sort(self) -> str | None:
        return self.op.coarity if self.op else None


TermT = Union[Var, Lit, App]


def int_lit(value: int, span: SourceSpan | None = None) -> Lit:
    return Lit(value, "Nat" if value >= 0 else "Int", span)


def bool_lit(value: bool) -> Lit:
    return Lit(bool(value), "Bool")


def substitute(term: Term, subst: dict[Var, Term]) -> Term:
    if isinstance(term, Var):
        return subst.get(term, term)
    if isinstance(term, App) and term.args:
        return App(term.name, tuple(substitute(a, subst) for a in term.args), term.op, term.span)
    return term


def subterm_at(term: Term, path: tuple[int, ...]) -> Term:
    for i in path:
        assert isinstance(term, App)
        term = term.args[i]
    return term


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term
    condition: Term | None = None
    label: str | None = None
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    @property
    def conditional(self) -> bool:
        return self.condition is not None

    def variables(self) -> set[Var]:
        vs = self.lhs.variables() | self.rhs.variables()
        if self.condition is not None:
            vs |= self.condition.variables()
        return vs

    def __str__(self) -> str:
        return format_equation(self)


@dataclass(frozen=True)
class SpecModule:
    name: str
    semantics: str = "loose"  # "loose" (mod*) | "tight" (mod!)
    imports: tuple[str, ...] = ()
    sorts: tuple[SortDecl, ...] = ()
    operators: tuple[OperatorDecl, ...] = ()
    variables: tuple[tuple[str, str], ...] = ()
    equations: tuple[Equation, ...] = ()
    span: SourceSpan | None = field(default=None, compare=False, repr=False)
    import_spans: tuple[SourceSpan | None, ...] = field(default=(), compare=False, repr=False)

    @property
    def file(self) -> str:
        return self.span.file if self.span else "<builtin>"

    def hidden_sorts(self) -> list[SortDecl]:
        return [s for s in self.sorts if s.hidden]

    def operator(self, name: str) -> list[OperatorDecl]:
        return [op for op in self.operators if op.name == name]


# ---------------------------------------------------------------------------
# Pretty printing

def _term_prec(t: Term) -> int:
    if isinstance(t, App) and t.args:
        sym = _infix_symbol(t)
        if sym is not None:
            return INFIX_PRECEDENCE.get(sym, USER_INFIX_PRECEDENCE)
        if _prefix_symbol(t) == "not":
            return NOT_PRECEDENCE
    if isinstance(t, Lit) and isinstance(t.value, int) and not isinstance(t.value, bool) \
            and t.value < 0:
        return UNARY_MINUS_PRECEDENCE
    return 100


def _infix_symbol(t: App) -> str | None:
    if len(t.args) != 2:
        return None
    if t.op is not None:
        return t.op.infix
    if t.name.startswith("_") and t.name.endswith("_") and len(t.name) > 2:
        return t.name[1:-1]
    return None


def _prefix_symbol(t: App) -> str | None:
    if len(t.args) != 1:
        return None
    if t.op is not None:
        return t.op.prefix
    if t.name.endswith("_") and not t.name.startswith("_"):
        return t.name[:-1]
    return None


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lit):
        if isinstance(t.value, bool):
            return "true" if t.value else "false"
        if t.sort in ("Int", "Nat"):
            return str(t.value)
        return f"{t.sort}#{t.value}"
    assert isinstance(t, App)
    if not t.args:
        return t.name
    sym = _infix_symbol(t)
    if sym is not None:
        prec = _term_prec(t)
        left, right = t.args
        ls = format_term(left)
        rs = format_term(right)
        if _term_prec(left) < prec:
            ls = f"({ls})"
        if _term_prec(right) <= prec:
            rs = f"({rs})"
        return f"{ls} {sym} {rs}"
    pre = _prefix_symbol(t)
    if pre == "not":
        inner = format_term(t.args[0])
        if _term_prec(t.args[0]) < NOT_PRECEDENCE:
            inner = f"({inner})"
        return f"not {inner}"
    if pre is not None:
        return f"{pre}({format_term(t.args[0])})"
    return f"{t.name}({', '.join(format_term(a) for a in t.args)})"


def format_equation(eq: Equation) -> str:
    kw = "ceq" if eq.conditional else "eq"
    label = f"[{eq.label}]:" if eq.label else ""
    body = f"{format_term(eq.lhs)} = {format_term(eq.rhs)}"
    if eq.conditional:
        body += f" if {format_term(eq.condition)}"
    return f"{kw}{label} {body} ."


def format_module(mod: SpecModule) -> str:
    """Render a module back to source text accepted by the parser."""
    lines = [f"mod{'*' if mod.semantics == 'loose' else '!'} {mod.name} {{"]
    for imp in mod.imports:
        lines.append(f"  pr({imp})")
    for s in mod.sorts:
        inner = s.name
        if s.supersorts:
            inner += " < " + " ".join(s.supersorts)
        lines.append(f"  *[ {inner} ]*" if s.hidden else f"  [ {inner} ]")
    for op in mod.operators:
        kw = "bop" if op.behavioral else "op"
        arity = " ".join(op.arity)
        sig = f"{arity} -> {op.coarity}" if arity else f"-> {op.coarity}"
        lines.append(f"  {kw} {op.name} : {sig}")
    for name, sort in mod.variables:
        lines.append(f"  var {name} : {sort}")
    for eq in mod.equations:
        lines.append(f"  {format_equation(eq)}")
    lines.append("}")
    return "\n".join(lines) + "\n"
