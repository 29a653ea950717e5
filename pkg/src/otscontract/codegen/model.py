"""Backend-neutral contract classes and the expression trees inside them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator

from ..diagnostics import Diagnostic


class Expr:
    __slots__ = ()

    def children(self) -> tuple["Expr", ...]:
        return ()

    def walk(self) -> Iterator["Expr"]:
        yield self
        for c in self.children():
            yield from c.walk()

    def to_json(self) -> dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True)
class Name(Expr):
    """A method parameter or quantifier binder."""

    name: str

    def to_json(self):
        return {"kind": "name", "name": self.name}


@dataclass(frozen=True)
class Ghost(Expr):
    """The ghost field holding the pre-state."""

    name: str

    def to_json(self):
        return {"kind": "ghost", "name": self.name}


@dataclass(frozen=True)
class This(Expr):
    def to_json(self):
        return {"kind": "this"}


@dataclass(frozen=True)
class Result(Expr):
    def to_json(self):
        return {"kind": "result"}


@dataclass(frozen=True)
class Null(Expr):
    def to_json(self):
        return {"kind": "null"}


@dataclass(frozen=True)
class IntConst(Expr):
    value: int

    def to_json(self):
        return {"kind": "int", "value": self.value}


@dataclass(frozen=True)
class BoolConst(Expr):
    value: bool

    def to_json(self):
        return {"kind": "bool", "value": self.value}


@dataclass(frozen=True)
class Call(Expr):
    """``target.method(args)``; an unqualified call when target is None."""

    target: Expr | None
    method: str
    args: tuple[Expr, ...] = ()

    def children(self):
        return ((self.target,) if self.target is not None else ()) + self.args

    def to_json(self):
        return {"kind": "call", "target": None if self.target is None else self.target.to_json(),
                "method": self.method, "args": [a.to_json() for a in self.args]}


@dataclass(frozen=True)
class New(Expr):
    cls: str
    args: tuple[Expr, ...] = ()

    def children(self):
        return self.args

    def to_json(self):
        return {"kind": "new", "class": self.cls, "args": [a.to_json() for a in self.args]}


BINARY_OPS = ("==>", "||", "&&", "==", "!=", "<", "<=", ">", ">=", "+", "-", "*")


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError(f"unknown operator {self.op!r}")

    def children(self):
        return (self.left, self.right)

    def to_json(self):
        return {"kind": "binary", "op": self.op, "left": self.left.to_json(),
                "right": self.right.to_json()}


@dataclass(frozen=True)
class Not(Expr):
    operand: Expr

    def children(self):
        return (self.operand,)

    def to_json(self):
        return {"kind": "not", "operand": self.operand.to_json()}


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr

    def children(self):
        return (self.operand,)

    def to_json(self):
        return {"kind": "neg", "operand": self.operand.to_json()}


@dataclass(frozen=True)
class Forall(Expr):
    binders: tuple[tuple[str, str], ...]  # (type, name)
    body: Expr

    def children(self):
        return (self.body,)

    def to_json(self):
        return {"kind": "forall", "binders": [{"type": t, "name": n} for t, n in self.binders],
                "body": self.body.to_json()}


def conj(parts) -> Expr | None:
    parts = [p for p in parts if p is not None]
    if not parts:
        return None
    out = parts[0]
    for p in parts[1:]:
        out = BinOp("&&", out, p)
    return out


def implies(ante: Expr | None, body: Expr) -> Expr:
    return body if ante is None else BinOp("==>", ante, body)


def eq(a: Expr, b: Expr) -> Expr:
    return BinOp("==", a, b)


def ne(a: Expr, b: Expr) -> Expr:
    return BinOp("!=", a, b)


_FLIP = {"==": "!=", "!=": "==", "<": ">=", ">=": "<", ">": "<=", "<=": ">"}


def negate(e: Expr) -> Expr:
    """Logical negation, pushed into comparisons where that stays readable."""
    if isinstance(e, BinOp) and e.op in _FLIP:
        return BinOp(_FLIP[e.op], e.left, e.right)
    if isinstance(e, Not):
        return e.operand
    if isinstance(e, BoolConst):
        return BoolConst(not e.value)
    return Not(e)


# -- contract structure ---------------------------------------------------------

REQUIRES = "requires"
ENSURES = "ensures"
ASSIGNABLE = "assignable"
SET_GHOST = "set-ghost"
NOTHING = "\\nothing"


@dataclass(frozen=True)
class ContractClause:
    kind: str
    expression: Expr | None = None
    target: str | None = None  # assignable locations or the ghost being set

    def __post_init__(self):
        if self.kind not in (REQUIRES, ENSURES, ASSIGNABLE, SET_GHOST):
            raise ValueError(f"unknown clause kind {self.kind!r}")
        if self.kind in (REQUIRES, ENSURES, SET_GHOST) and self.expression is None:
            raise ValueError(f"{self.kind} clause needs an expression")

    def to_json(self):
        return {"kind": self.kind,
                "expression": None if self.expression is None else self.expression.to_json(),
                "target": self.target}


@dataclass(frozen=True)
class ContractCase:
    requires: tuple[ContractClause, ...] = ()
    ensures: tuple[ContractClause, ...] = ()
    assignable: str | None = None
    normal_behavior: bool = False

    def clauses(self) -> tuple[ContractClause, ...]:
        extra = (ContractClause(ASSIGNABLE, target=self.assignable),) if self.assignable else ()
        return self.requires + self.ensures + extra

    def to_json(self):
        return {"requires": [c.to_json() for c in self.requires],
                "ensures": [c.to_json() for c in self.ensures],
                "assignable": self.assignable, "normalBehavior": self.normal_behavior}


@dataclass(frozen=True)
class ContractMethod:
    name: str
    params: tuple[tuple[str, str], ...]  # (name, type)
    return_type: str | None
    pure: bool = False
    is_constructor: bool = False
    cases: tuple[ContractCase, ...] = ()
    body_preamble: tuple[ContractClause, ...] = ()
    role: str = ""  # observer, getter, constructor, factory, equals, copy, transition
    static: bool = False
    placeholder: str | None = None  # type-correct return value for the stub body

    def __post_init__(self):
        if self.is_constructor and self.return_type is not None:
            raise ValueError("constructors have no return type")
        if self.pure and (self.body_preamble or any(c.assignable for c in self.cases)):
            raise ValueError(f"pure method {self.name} cannot set ghosts or declare assignable")

    @property
    def signature(self) -> tuple:
        return (self.name, tuple(t for _, t in self.params))

    def to_json(self):
        return {"name": self.name, "role": self.role,
                "params": [{"name": n, "type": t} for n, t in self.params],
                "returnType": self.return_type, "pure": self.pure,
                "constructor": self.is_constructor, "static": self.static,
                "placeholder": self.placeholder,
                "cases": [c.to_json() for c in self.cases],
                "bodyPreamble": [c.to_json() for c in self.body_preamble]}


@dataclass(frozen=True)
class ContractClass:
    name: str
    extends_name: str | None = None
    ghost_fields: tuple[tuple[str, str], ...] = ()  # (name, type)
    methods: tuple[ContractMethod, ...] = ()
    module: str = ""
    warnings: tuple[Diagnostic, ...] = field(default=(), compare=False)

    def __post_init__(self):
        sigs = [m.signature for m in self.methods]
        dup = {s for s in sigs if sigs.count(s) > 1}
        if dup:
            raise ValueError(f"duplicate method signature(s) in {self.name}: {sorted(dup)}")

    def method(self, name: str) -> ContractMethod:
        for m in self.methods:
            if m.name == name:
                return m
        raise KeyError(name)

    def methods_by_role(self, role: str) -> list[ContractMethod]:
        return [m for m in self.methods if m.role == role]

    def to_json(self):
        return {"schema": "otscontract.class/1", "name": self.name, "module": self.module,
                "extends": self.extends_name,
                "ghostFields": [{"name": n, "type": t} for n, t in self.ghost_fields],
                "methods": [m.to_json() for m in self.methods]}
