"""Visible CafeOBJ sorts to target-language types, plus naming conventions."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..diagnostics import SpecError, error
from ..modules import Scope


@dataclass(frozen=True)
class TypeInfo:
    type: str
    default: str  # placeholder return value
    param: str  # base name for parameters of this sort
    non_negative: bool = False  # emit ``p >= 0`` preconditions


@dataclass
class SortMapping:
    """Sort name -> TypeInfo; identifier sorts fall back to ``identifier``."""

    entries: dict[str, TypeInfo] = field(default_factory=dict)
    identifier: TypeInfo | None = None

    def lookup(self, sort: str, scope: Scope | None = None) -> TypeInfo:
        info = self.entries.get(sort)
        if info is not None:
            return info
        if self.identifier is not None and scope is not None and is_identifier_sort(sort, scope):
            return self.identifier
        raise SpecError([error("unmapped-sort",
                               f"no target type for sort {sort}; add it to [sort_mapping]")])

    def with_overrides(self, overrides: dict[str, TypeInfo]) -> "SortMapping":
        return SortMapping({**self.entries, **overrides}, self.identifier)


def default_sort_mapping() -> SortMapping:
    return SortMapping(
        {"Int": TypeInfo("int", "0", "x"),
         "INT": TypeInfo("int", "0", "x"),
         "Nat": TypeInfo("int", "0", "n", non_negative=True),
         "Bool": TypeInfo("boolean", "false", "b")},
        identifier=TypeInfo("int", "0", "id"),
    )


def is_identifier_sort(sort: str, scope: Scope) -> bool:
    """A visible user sort with no constants: its values are opaque identifiers."""
    if sort in ("Bool", "Int", "Nat") or not scope.has_sort(sort) or scope.is_hidden(sort):
        return False
    return not any(not op.arity and op.coarity == sort and not op.builtin
                   for op in scope.operators())


_SPLIT = re.compile(r"[-_'’]+")


def upper_camel(name: str) -> str:
    """ACCOUNT-SYSTEM -> AccountSystem, init-account -> InitAccount."""
    parts = [p for p in _SPLIT.split(name) if p]
    return "".join(p[:1].upper() + (p[1:].lower() if p.isupper() else p[1:]) for p in parts)


def lower_camel(name: str) -> str:
    s = upper_camel(name)
    return s[:1].lower() + s[1:]


@dataclass
class NameTable:
    """Class and method names, with per-module overrides from configuration.

    ``method_names`` keys are ``"MODULE.op"``; ``class_names`` keys are
    module names.
    """

    method_names: dict[str, str] = field(default_factory=dict)
    class_names: dict[str, str] = field(default_factory=dict)
    ghost: str = "temp"

    def class_name(self, module: str) -> str:
        return self.class_names.get(module) or upper_camel(module)

    def method(self, module: str, op: str) -> str:
        return self.method_names.get(f"{module}.{op}") or lower_camel(op)

    def getter(self, module: str, op: str) -> str:
        return self.method_names.get(f"{module}.{op}") or "get" + upper_camel(op)
