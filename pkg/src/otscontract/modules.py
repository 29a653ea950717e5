"""Module sets: builtin prelude, import resolution, sort and term checking."""

from __future__ import annotations

import heapq
from collections.abc import Sequence
from functools import cached_property
from typing import Iterable

from .diagnostics import Diagnostic, SourceSpan, SpecError, error
from .spec_ast import (
    ANY_SORT, VISIBLE, App, Equation, Lit, OperatorDecl, SortDecl,
    SpecModule, Term, Var,
)

PRELUDE_NAMES = ("BOOL", "INT", "NAT")
BUILTIN_SORTS = ("Bool", "Nat", "Int")


def _builtin(name, arity, coarity, module):
    return OperatorDecl(name, tuple(arity), coarity, False, module, builtin=True)


def _prelude() -> dict[str, SpecModule]:
    b = "BOOL"
    bool_mod = SpecModule(
        name=b, semantics="tight",
        sorts=(SortDecl("Bool", VISIBLE, (), b),),
        operators=(
            _builtin("true", (), "Bool", b),
            _builtin("false", (), "Bool", b),
            _builtin("_and_", ("Bool", "Bool"), "Bool", b),
            _builtin("_or_", ("Bool", "Bool"), "Bool", b),
            _builtin("not_", ("Bool",), "Bool", b),
            _builtin("_==_", (ANY_SORT, ANY_SORT), "Bool", b),
            _builtin("_=/=_", (ANY_SORT, ANY_SORT), "Bool", b),
        ),
    )
    i = "INT"
    arith = []
    for sym in ("+", "*"):
        arith.append(_builtin(f"_{sym}_", ("Nat", "Nat"), "Nat", i))
        arith.append(_builtin(f"_{sym}_", ("Int", "Int"), "Int", i))
    arith.append(_builtin("_-_", ("Int", "Int"), "Int", i))
    arith.append(_builtin("-_", ("Int",), "Int", i))
    for sym in (">=", ">", "<=", "<"):
        arith.append(_builtin(f"_{sym}_", ("Int", "Int"), "Bool", i))
    int_mod = SpecModule(
        name=i, semantics="tight", imports=("BOOL",),
        sorts=(SortDecl("Nat", VISIBLE, ("Int",), i), SortDecl("Int", VISIBLE, (), i)),
        operators=tuple(arith),
    )
    nat_mod = SpecModule(name="NAT", semantics="tight", imports=("INT",))
    return {"BOOL": bool_mod, "INT": int_mod, "NAT": nat_mod}


PRELUDE = _prelude()


class Scope:
    """Name tables over a closed list of modules (imports first)."""

    def __init__(self, modules: Iterable[SpecModule]):
        self.modules = list(modules)
        self.sorts: dict[str, list[SortDecl]] = {}
        self.ops: dict[str, list[OperatorDecl]] = {}
        for m in self.modules:
            for s in m.sorts:
                self.sorts.setdefault(s.name, []).append(s)
            for op in m.operators:
                self.ops.setdefault(op.name, []).append(op)
        self._supers: dict[str, set[str]] = {}
        for name in self.sorts:
            self._supers[name] = self._closure(name)
        parent = {s: s for s in self.sorts}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for name, decls in self.sorts.items():
            for d in decls:
                for sup in d.supersorts:
                    if sup in parent:
                        parent[find(name)] = find(sup)
        self._component = {s: find(s) for s in self.sorts}

    def _closure(self, name: str) -> set[str]:
        seen = {name}
        stack = [name]
        while stack:
            s = stack.pop()
            for d in self.sorts.get(s, ()):
                for sup in d.supersorts:
                    if sup not in seen:
                        seen.add(sup)
                        stack.append(sup)
        return seen

    # -- sorts -----------------------------------------------------------------
    def sort(self, name: str, span: SourceSpan | None = None) -> SortDecl:
        decls = self.sorts.get(name)
        if not decls:
            raise SpecError([error("unknown-sort", f"unknown sort {name!r}", span)])
        if len({d.module for d in decls}) > 1:
            where = ", ".join(sorted({d.module for d in decls}))
            raise SpecError([error("ambiguous-sort",
                                   f"sort {name!r} is declared in unrelated modules {where}",
                                   span)])
        return decls[0]

    def has_sort(self, name: str) -> bool:
        return name in self.sorts

    def is_hidden(self, name: str) -> bool:
        decls = self.sorts.get(name)
        return bool(decls) and decls[0].hidden

    def leq(self, sub: str, sup: str) -> bool:
        if sub == sup or sup == ANY_SORT:
            return True
        return sup in self._supers.get(sub, ())

    def connected(self, a: str, b: str) -> bool:
        if a == b:
            return True
        ca, cb = self._component.get(a), self._component.get(b)
        return ca is not None and ca == cb

    def subsorts(self, name: str) -> list[str]:
        return sorted(s for s in self.sorts if s != name and self.leq(s, name))

    # -- operators -------------------------------------------------------------
    def operators(self) -> list[OperatorDecl]:
        return [op for m in self.modules for op in m.operators]

    @property
    def equations(self) -> list[Equation]:
        return [eq for m in self.modules for eq in m.equations]

    def select(self, name: str, arg_sorts: Sequence[str],
               span: SourceSpan | None = None, path: tuple[int, ...] = ()) -> OperatorDecl:
        """Pick the most specific declaration of ``name`` applicable to ``arg_sorts``."""
        decls = self.ops.get(name)
        if not decls:
            raise SpecError([error("unknown-operator", f"unknown operator {name!r}", span)])
        cands = []
        for d in decls:
            if len(d.arity) != len(arg_sorts):
                continue
            if all(self.leq(a, s) for a, s in zip(arg_sorts, d.arity)):
                if ANY_SORT in d.arity and not all(
                        self.connected(arg_sorts[0], a) for a in arg_sorts):
                    continue
                cands.append(d)
        if not cands:
            where = ".".join(map(str, path)) or "root"
            got = " ".join(arg_sorts) or "(no arguments)"
            raise SpecError([error(
                "ill-sorted-term",
                f"no declaration of {name!r} accepts argument sorts {got} at position {where}",
                span)])
        if len(cands) == 1:
            return cands[0]

        def below(c: OperatorDecl, d: OperatorDecl) -> bool:
            return all(self.leq(x, y) for x, y in zip(c.arity, d.arity))

        best = [c for c in cands if all(below(c, d) for d in cands)]
        distinct = {(c.name, c.arity, c.coarity) for c in best}
        if len(distinct) != 1:
            raise SpecError([error("ambiguous-operator",
                                   f"ambiguous application of {name!r} to {' '.join(arg_sorts)}",
                                   span)])
        return best[0]

    # -- terms -------------------------------------------------------------------
    def sort_of(self, term: Term) -> str:
        if isinstance(term, (Var, Lit)):
            return term.sort
        assert isinstance(term, App)
        if term.op is None:
            term = self.resolve(term)
        return term.op.coarity

    def resolve(self, term: Term, path: tuple[int, ...] = ()) -> Term:
        """Attach operator declarations to a raw term, checking sorts."""
        if isinstance(term, Var):
            self.sort(term.sort, term.span)
            return term
        if isinstance(term, Lit):
            return term
        assert isinstance(term, App)
        args = tuple(self.resolve(a, path + (i,)) for i, a in enumerate(term.args))
        sorts = [self.sort_of(a) for a in args]
        if term.op is not None:
            op = term.op
            if len(op.arity) != len(args) or not all(
                    self.leq(s, a) for s, a in zip(sorts, op.arity)):
                where = ".".join(map(str, path)) or "root"
                raise SpecError([error("ill-sorted-term",
                                       f"ill-sorted application of {op.name!r} at position {where}",
                                       term.span)])
        else:
            op = self.select(term.name, sorts, term.span, path)
        return App(term.name, args, op, term.span)


class ModuleSet(Sequence):
    """Checked user modules in dependency order, plus the builtin prelude.

    Behaves as a read-only sequence of the user modules.
    """

    def __init__(self, modules: Iterable[SpecModule], warnings: Iterable[Diagnostic] = ()):
        self._user = list(modules)
        self._all: dict[str, SpecModule] = dict(PRELUDE)
        for m in self._user:
            self._all[m.name] = m
        self.warnings = list(warnings)
        self._scopes: dict[str, Scope] = {}

    # Sequence protocol
    def __getitem__(self, i):
        return self._user[i]

    def __len__(self):
        return len(self._user)

    def names(self) -> list[str]:
        return [m.name for m in self._user]

    def module(self, name: str) -> SpecModule:
        try:
            return self._all[name]
        except KeyError:
            raise SpecError([error("unknown-module", f"no module named {name!r}")]) from None

    def __contains__(self, name) -> bool:
        if isinstance(name, str):
            return name in self._all
        return name in self._user

    def closure(self, name: str) -> list[SpecModule]:
        """``name`` and its transitive imports (prelude always included), imports first."""
        order: list[str] = []
        seen: set[str] = set()

        def visit(n: str):
            if n in seen:
                return
            seen.add(n)
            for imp in self._all[n].imports:
                visit(imp)
            order.append(n)

        visit("BOOL")
        visit("INT")
        visit(name)
        return [self._all[n] for n in order]

    def scope(self, name: str | None = None) -> Scope:
        """Scope of one module, or of the whole set when ``name`` is None."""
        key = name or "*"
        if key not in self._scopes:
            if name is None:
                mods = list(PRELUDE.values()) + self._user
                self._scopes[key] = Scope(mods)
            else:
                self.module(name)
                self._scopes[key] = Scope(self.closure(name))
        return self._scopes[key]

    @cached_property
    def equations(self) -> list[Equation]:
        return [eq for m in self._user for eq in m.equations]

    def module_of_sort(self, sort: str) -> str:
        return self.scope().sort(sort).module

    # -- construction ------------------------------------------------------------
    @classmethod
    def check(cls, parsed: Sequence[SpecModule]) -> "ModuleSet":
        """Resolve imports and sort-check raw modules; raise SpecError on errors."""
        diags: list[Diagnostic] = []
        by_name: dict[str, SpecModule] = {}
        for m in parsed:
            if m.name in by_name or m.name in PRELUDE:
                diags.append(error("duplicate-module-name",
                                   f"module {m.name} is defined more than once", m.span))
                continue
            by_name[m.name] = m
        for m in by_name.values():
            for imp, span in zip(m.imports, m.import_spans or (None,) * len(m.imports)):
                if imp not in by_name and imp not in PRELUDE:
                    diags.append(error("unresolved-import",
                                       f"module {m.name} imports unknown module {imp}",
                                       span or m.span))
        if diags:
            raise SpecError(diags)
        order, cyc = _toposort(by_name)
        if cyc:
            raise SpecError(cyc)
        done: list[SpecModule] = []
        warnings: list[Diagnostic] = []
        partial = cls([])
        for name in order:
            checked, ds = _check_module(by_name[name], partial)
            diags.extend(d for d in ds if d.is_error)
            warnings.extend(d for d in ds if not d.is_error)
            if checked is None:
                break
            done.append(checked)
            partial = cls(done)
        if diags:
            raise SpecError(diags + warnings)
        return cls(done, warnings)


def _toposort(mods: dict[str, SpecModule]) -> tuple[list[str], list[Diagnostic]]:
    indeg = {n: 0 for n in mods}
    users: dict[str, list[str]] = {n: [] for n in mods}
    for n, m in mods.items():
        for imp in set(m.imports):
            if imp in mods:
                indeg[n] += 1
                users[imp].append(n)
    heap = [n for n, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        n = heapq.heappop(heap)
        order.append(n)
        for u in users[n]:
            indeg[u] -= 1
            if indeg[u] == 0:
                heapq.heappush(heap, u)
    if len(order) == len(mods):
        return order, []
    stuck = sorted(n for n in mods if n not in order)
    return order, [error("cyclic-import",
                         f"import cycle among modules {', '.join(stuck)}",
                         mods[n].span) for n in stuck[:1]]


def _check_module(raw: SpecModule, done: ModuleSet
                  ) -> tuple[SpecModule | None, list[Diagnostic]]:
    diags: list[Diagnostic] = []
    imported = Scope(_closure_of(raw, done))

    # sorts
    seen: set[str] = set()
    sorts: list[SortDecl] = []
    for s in raw.sorts:
        if s.name in seen or imported.has_sort(s.name):
            diags.append(error("duplicate-sort", f"sort {s.name} is already declared", s.span))
            continue
        seen.add(s.name)
        sorts.append(s)
    own = {s.name: s for s in sorts}
    for s in sorts:
        for sup in s.supersorts:
            target = own.get(sup)
            if target is None:
                try:
                    target = imported.sort(sup, s.span)
                except SpecError as exc:
                    diags.extend(exc.diagnostics)
                    continue
            if target.kind != s.kind:
                diags.append(error("sort-kind-mismatch",
                                   f"{s.kind} sort {s.name} cannot be a subsort of "
                                   f"{target.kind} sort {sup}", s.span))
    if diags:
        return None, diags

    sort_scope = Scope(imported.modules + [SpecModule(raw.name, sorts=tuple(sorts))])

    # operators
    ops: list[OperatorDecl] = []
    signatures = {(op.name, op.arity) for op in imported.operators()}
    for op in raw.operators:
        bad = False
        for s in op.arity + (op.coarity,):
            try:
                sort_scope.sort(s, op.span)
            except SpecError as exc:
                diags.extend(exc.diagnostics)
                bad = True
        if bad:
            continue
        if "_" in op.name and not (
                (op.infix and len(op.arity) == 2) or (op.prefix and len(op.arity) == 1)):
            diags.append(error("invalid-mixfix",
                               f"only binary infix '_s_' or unary prefix 's_' mixfix operators "
                               f"are supported: {op.name}", op.span))
            continue
        if op.behavioral:
            has_hidden = any(sort_scope.is_hidden(s) for s in op.arity)
            if not has_hidden and not (not op.arity and sort_scope.is_hidden(op.coarity)):
                diags.append(error("invalid-behavioral-operator",
                                   f"behavioral operator {op.name} has no hidden-sort argument",
                                   op.span))
                continue
        if (op.name, op.arity) in signatures:
            diags.append(error("duplicate-operator",
                               f"operator {op.name} : {' '.join(op.arity)} is already declared",
                               op.span))
            continue
        signatures.add((op.name, op.arity))
        ops.append(op)

    for _, vsort in raw.variables:
        try:
            sort_scope.sort(vsort, raw.span)
        except SpecError as exc:
            diags.extend(exc.diagnostics)
    if diags:
        return None, diags

    decl_only = SpecModule(raw.name, raw.semantics, raw.imports, tuple(sorts), tuple(ops),
                           raw.variables)
    scope = Scope(imported.modules + [decl_only])

    equations: list[Equation] = []
    for eq in raw.equations:
        try:
            equations.append(_check_equation(eq, scope))
        except SpecError as exc:
            diags.extend(exc.diagnostics)
    if any(d.is_error for d in diags):
        return None, diags
    checked = SpecModule(raw.name, raw.semantics, raw.imports, tuple(sorts), tuple(ops),
                         raw.variables, tuple(equations), raw.span, raw.import_spans)
    return checked, diags


def _closure_of(raw: SpecModule, done: ModuleSet) -> list[SpecModule]:
    order: list[SpecModule] = []
    seen: set[str] = set()
    for imp in ("BOOL", "INT") + raw.imports:
        for m in done.closure(imp):
            if m.name not in seen:
                seen.add(m.name)
                order.append(m)
    return order


def _check_equation(eq: Equation, scope: Scope) -> Equation:
    lhs = scope.resolve(eq.lhs)
    rhs = scope.resolve(eq.rhs)
    cond = scope.resolve(eq.condition) if eq.condition is not None else None
    if not isinstance(lhs, App) or (lhs.op is not None and lhs.op.builtin):
        raise SpecError([error("non-executable-equation",
                               "left-hand side must be an application of a declared operator",
                               eq.span)])
    ls, rs = scope.sort_of(lhs), scope.sort_of(rhs)
    if not scope.connected(ls, rs):
        raise SpecError([error("ill-sorted-equation",
                               f"sides of equation have unrelated sorts {ls} and {rs}", eq.span)])
    if cond is not None and scope.sort_of(cond) != "Bool":
        raise SpecError([error("ill-sorted-equation",
                               f"condition has sort {scope.sort_of(cond)}, expected Bool",
                               eq.span)])
    extra = rhs.variables() - lhs.variables()
    if cond is not None:
        extra |= cond.variables() - lhs.variables()
    if extra:
        names = ", ".join(sorted(v.name for v in extra))
        raise SpecError([error("non-executable-equation",
                               f"variables {names} do not occur in the left-hand side",
                               eq.span)])
    return Equation(lhs, rhs, cond, eq.label, eq.span)


def resolve_sort(module_set: ModuleSet, name: str, module: str | None = None) -> SortDecl:
    """Find the unique declaration of sort ``name``.

    Searches ``module`` and its transitive imports, or the whole set when no
    module is given.
    """
    return module_set.scope(module).sort(name)


def sort_of(term: Term, module_set: ModuleSet, module: str | None = None) -> str:
    """Least sort of ``term`` (raw or checked) under the declared ordering."""
    return module_set.scope(module).sort_of(term)
