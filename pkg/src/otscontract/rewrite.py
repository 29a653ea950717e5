"""Left-to-right conditional term rewriting with native builtin evaluation."""

from __future__ import annotations

import sys
from typing import Callable, Iterable

from .diagnostics import Diagnostic, warning
from .modules import ModuleSet, Scope
from .spec_ast import App, Equation, Lit, Term, Var, bool_lit, int_lit, substitute

DEFAULT_FUEL = 10_000

TRUE = bool_lit(True)
FALSE = bool_lit(False)


class RewriteError(Exception):
    code = "rewrite-error"

    def __init__(self, message: str, term: Term | None = None):
        super().__init__(message)
        self.term = term


class FuelExhausted(RewriteError):
    code = "fuel-exhausted"


class StuckTerm(RewriteError):
    """The normal form still contains an application of a defined operator."""

    code = "stuck-term"

    def __init__(self, message: str, term: Term, subterm: Term):
        super().__init__(message, term)
        self.subterm = subterm


def stuck_message(stuck: Term, term: Term) -> str:
    if stuck == term:
        return f"no equation applies to {stuck}"
    return f"no equation applies to {stuck} (while reducing {term})"


class _Fuel:
    __slots__ = ("left", "limit", "term")

    def __init__(self, limit: int, term: Term):
        if limit < 1:
            raise ValueError("fuel must be at least 1")
        self.left = limit
        self.limit = limit
        self.term = term

    def burn(self):
        self.left -= 1
        if self.left < 0:
            raise FuelExhausted(
                f"no normal form within {self.limit} rewrite steps "
                f"(possibly non-terminating) for {self.term}", self.term)


def _is_int(t: Term) -> bool:
    return isinstance(t, Lit) and isinstance(t.value, int) and not isinstance(t.value, bool)


def _is_bool(t: Term) -> bool:
    return isinstance(t, Lit) and isinstance(t.value, bool)


class Rewriter:
    """Rewrites with every equation of a module set, oriented left to right.

    ``extra`` equations are tried after the module's own rules for the same
    head operator.  Normal forms are memoized across calls.
    """

    def __init__(self, module_set: ModuleSet, extra: Iterable[Equation] = (),
                 fuel: int = DEFAULT_FUEL):
        self.module_set = module_set
        self.scope: Scope = module_set.scope()
        self.fuel = fuel
        self.rules: dict[tuple, list[Equation]] = {}
        for eq in list(module_set.equations) + list(extra):
            assert isinstance(eq.lhs, App) and eq.lhs.op is not None
            self.rules.setdefault(eq.lhs.op.key, []).append(eq)
        self.defined: set[tuple] = set(self.rules)
        for op in self.scope.operators():
            if op.builtin and op.arity:
                self.defined.add(op.key)
            elif op.behavioral:
                hidden_args = [s for s in op.arity if self.scope.is_hidden(s)]
                if not self.scope.is_hidden(op.coarity) or not any(
                        self.scope.connected(s, op.coarity) for s in hidden_args):
                    self.defined.add(op.key)
        self.warnings: list[Diagnostic] = []
        self._warned: set[tuple] = set()
        self._memo: dict[Term, Term] = {}
        self._leq_cache: dict[tuple[str, str], bool] = {}

    # -- sorts & matching --------------------------------------------------------
    def _leq(self, a: str, b: str) -> bool:
        key = (a, b)
        r = self._leq_cache.get(key)
        if r is None:
            r = self._leq_cache[key] = self.scope.leq(a, b)
        return r

    @staticmethod
    def _sort(t: Term) -> str:
        if isinstance(t, App):
            return t.op.coarity
        return t.sort

    def match(self, pattern: Term, term: Term, subst: dict[Var, Term]) -> bool:
        if isinstance(pattern, Var):
            bound = subst.get(pattern)
            if bound is not None:
                return bound == term
            if not self._leq(self._sort(term), pattern.sort):
                return False
            subst[pattern] = term
            return True
        if isinstance(pattern, Lit):
            return pattern == term
        if not isinstance(term, App) or term.op != pattern.op:
            return False
        return all(self.match(p, t, subst) for p, t in zip(pattern.args, term.args))

    # -- builtins ----------------------------------------------------------------
    def is_value(self, t: Term) -> bool:
        """Ground and free of defined-operator applications."""
        for s in t.walk():
            if isinstance(s, Var):
                return False
            if isinstance(s, App) and s.op.key in self.defined:
                return False
        return True

    def _builtin(self, t: App) -> Term | None:
        name = t.op.name
        args = t.args
        if len(args) == 2:
            a, b = args
            if name in ("_==_", "_=/=_"):
                if a == b:
                    same = True
                elif self.is_value(a) and self.is_value(b):
                    same = False
                else:
                    return None
                return bool_lit(same if name == "_==_" else not same)
            if name == "_and_":
                if a == FALSE or b == FALSE:
                    return FALSE
                if a == TRUE:
                    return b
                if b == TRUE:
                    return a
                return None
            if name == "_or_":
                if a == TRUE or b == TRUE:
                    return TRUE
                if a == FALSE:
                    return b
                if b == FALSE:
                    return a
                return None
            if not (_is_int(a) and _is_int(b)):
                return None
            x, y = a.value, b.value
            if name == "_+_":
                return int_lit(x + y)
            if name == "_-_":
                return int_lit(x - y)
            if name == "_*_":
                return int_lit(x * y)
            if name == "_>=_":
                return bool_lit(x >= y)
            if name == "_>_":
                return bool_lit(x > y)
            if name == "_<=_":
                return bool_lit(x <= y)
            if name == "_<_":
                return bool_lit(x < y)
            return None
        if len(args) == 1:
            (a,) = args
            if name == "-_" and _is_int(a):
                return int_lit(-a.value)
            if name == "not_" and _is_bool(a):
                return bool_lit(not a.value)
        if not args and name in ("true", "false"):
            return bool_lit(name == "true")
        return None

    # -- one step at the root ------------------------------------------------------
    def _root_step(self, t: App, norm: Callable[[Term], Term]) -> Term | None:
        if t.op.builtin:
            return self._builtin(t)
        for eq in self.rules.get(t.op.key, ()):
            subst: dict[Var, Term] = {}
            if not self.match(eq.lhs, t, subst):
                continue
            if eq.condition is not None:
                c = norm(substitute(eq.condition, subst))
                if c == FALSE:
                    continue
                if c != TRUE:
                    self._warn_stuck(eq, c)
                    continue
            return substitute(eq.rhs, subst)
        return None

    def _warn_stuck(self, eq: Equation, cond: Term):
        if not cond.is_ground:
            return
        key = (eq, cond)
        if key in self._warned:
            return
        self._warned.add(key)
        self.warnings.append(warning(
            "stuck-condition",
            f"condition of '{eq}' reduced to {cond}, neither true nor false; "
            f"equation treated as not applicable", eq.span))

    # -- strategies --------------------------------------------------------------
    def normalize(self, term: Term, fuel: int | None = None) -> Term:
        """Leftmost-innermost normal form; no check for stuck subterms."""
        budget = _Fuel(fuel or self.fuel, term)
        try:
            return self._norm(term, budget)
        except RecursionError:
            raise FuelExhausted(f"term grew too deep while rewriting {term}", term) from None

    def _norm(self, term: Term, budget: _Fuel) -> Term:
        if not isinstance(term, App):
            return term
        hit = self._memo.get(term)
        if hit is not None:
            return hit
        start = term
        norm = lambda s: self._norm(s, budget)  # noqa: E731
        t: Term = term
        while True:
            if t.args:
                t = App(t.name, tuple(self._norm(a, budget) for a in t.args), t.op, t.span)
            nxt = self._root_step(t, norm)
            if nxt is None:
                break
            budget.burn()
            if not isinstance(nxt, App):
                t = nxt
                break
            t = nxt
        self._memo[start] = t
        return t

    def reduce(self, term: Term, fuel: int | None = None) -> Term:
        """Normal form of a ground term; raise StuckTerm if it is not a value."""
        nf = self.normalize(term, fuel)
        stuck = self.stuck_subterm(nf)
        if stuck is not None:
            raise StuckTerm(stuck_message(stuck, term), term, stuck)
        return nf

    def stuck_subterm(self, t: Term) -> Term | None:
        """Leftmost-innermost application of a defined operator, if any."""
        if isinstance(t, App):
            for a in t.args:
                s = self.stuck_subterm(a)
                if s is not None:
                    return s
            if t.op.key in self.defined:
                return t
        return None

    def normalize_outermost(self, term: Term, fuel: int | None = None) -> Term:
        """Leftmost-outermost normal form, used to spot-check confluence."""
        budget = _Fuel(fuel or self.fuel, term)

        def norm(s: Term) -> Term:
            while True:
                step = self._outermost_step(s, norm)
                if step is None:
                    return s
                budget.burn()
                s = step

        return norm(term)

    def _outermost_step(self, t: Term, norm) -> Term | None:
        if not isinstance(t, App):
            return None
        r = self._root_step(t, norm)
        if r is not None:
            return r
        for i, a in enumerate(t.args):
            r = self._outermost_step(a, norm)
            if r is not None:
                args = t.args[:i] + (r,) + t.args[i + 1:]
                return App(t.name, args, t.op, t.span)
        return None


def reduce(term: Term, module_set: ModuleSet, fuel: int = DEFAULT_FUEL) -> Term:
    """Reduce a ground term to normal form with the module set's equations."""
    return Rewriter(module_set, fuel=fuel).reduce(term)


if sys.getrecursionlimit() < 5000:
    sys.setrecursionlimit(5000)
