"""OtsModel -> ContractClass.

Single OTSs become a class with pure observers, one constructor per initial
state, behavioral ``equals``, a deep-copy constructor and one method per
transition carrying an effective and an ineffective contract case.  Composite
OTSs add projection getters, chain-defined observers and component-level
effects; a hidden subsort becomes an ``extends`` edge.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from ..analyzer import (CREATE, DELETE, UPDATE, OtsModel, ObserverSpec, TransitionSpec,
                        check_composition, classify)
from ..diagnostics import Diagnostic, SpecError, error, has_errors, warning
from ..modules import ModuleSet
from ..rewrite import Rewriter
from ..spec_ast import App, Equation, Lit, OperatorDecl, Term, Var, format_equation
from .mapping import NameTable, SortMapping, default_sort_mapping
from .model import (ENSURES, NOTHING, REQUIRES, SET_GHOST, BinOp, BoolConst, Call,
                    ContractCase, ContractClass, ContractClause, ContractMethod, Expr, Forall,
                    Ghost, IntConst, Name, Neg, New, Not, Null, Result, This, conj, eq, implies,
                    ne, negate)
from .purity import check_side_effects

ANOTHER = "another"

_BINARY = {"_+_": "+", "_-_": "-", "_*_": "*", "_==_": "==", "_=/=_": "!=", "_<_": "<",
           "_<=_": "<=", "_>_": ">", "_>=_": ">=", "_and_": "&&", "_or_": "||"}


@dataclass
class TranslationOptions:
    mapping: SortMapping = field(default_factory=default_sort_mapping)
    names: NameTable = field(default_factory=NameTable)


class _Untranslatable(Exception):
    pass


def _has_call(e: Expr) -> bool:
    return any(isinstance(x, Call) for x in e.walk())


def _conjuncts(t: Term | None) -> list[Term]:
    if t is None:
        return []
    if isinstance(t, App) and t.op.name == "_and_":
        return _conjuncts(t.args[0]) + _conjuncts(t.args[1])
    return [t]


class _Translator:
    def __init__(self, model: OtsModel, ms: ModuleSet, opts: TranslationOptions,
                 components: dict[str, ContractClass], parent: ContractClass | None):
        self.model = model
        self.ms = ms
        self.scope = ms.scope()
        self.opts = opts
        self.names = opts.names
        self.cls = self.names.class_name(model.module_name)
        self.ghost = Ghost(self.names.ghost)
        self.parent_cls = parent
        self.components = components
        self.warnings: list[Diagnostic] = []

        self.class_of_sort = {model.hidden_sort: self.cls}
        self.inits: dict[str, str] = {i: self.cls for i in model.initial_states}
        self.absent: set[str] = {p.absent_value for p in model.projections if p.absent_value}
        self.observer_ops: dict[OperatorDecl, ObserverSpec] = {}
        self.transition_ops: dict[OperatorDecl, TransitionSpec] = {}
        self.getter_ops: dict[OperatorDecl, object] = {p.op: p for p in model.projections}
        self._register(model, own=True)

        # composite observers fully determined by one projection's ids
        self.chain_observers: dict[str, Equation] = {}
        self.folded: dict[str, str] = {}
        if model.is_composite:
            for o in model.observers:
                defs = [e for e in o.equations if isinstance(e.lhs.args[o.state_index], Var)]
                if len(defs) == 1 and defs[0].condition is None:
                    self.chain_observers[o.name] = defs[0]
                    p = self._folds_into(o, defs[0])
                    if p is not None:
                        self.folded[o.name] = p

    def _register(self, m: OtsModel, own: bool):
        for o in m.all_observers():
            self.observer_ops.setdefault(o.op, o)
        for t in m.all_transitions():
            self.transition_ops.setdefault(t.op, t)
        if not own:
            cls = self.names.class_name(m.module_name)
            self.class_of_sort.setdefault(m.hidden_sort, cls)
            for i in m.initial_states:
                self.inits.setdefault(i, cls)
        if m.parent is not None:
            self._register(m.parent, own=False)
        for p in m.projections:
            if p.absent_value:
                self.absent.add(p.absent_value)
            self.getter_ops.setdefault(p.op, p)
        for comp in m.components.values():
            self._register(comp, own=False)

    def _folds_into(self, o: ObserverSpec, e: Equation) -> str | None:
        params = [a for i, a in enumerate(e.lhs.args) if i != o.state_index]
        if not all(isinstance(a, Var) for a in params):
            return None
        uses = [t for t in e.rhs.walk() if isinstance(t, App) and t.op in self.getter_ops]
        if not uses or len({t.op for t in uses}) != 1:
            return None
        p = self.getter_ops[uses[0].op]
        if p not in self.model.projections:
            return None
        ids = [a for i, a in enumerate(uses[0].args) if i != p.state_index]
        if ids != params or any(t != uses[0] for t in uses):
            return None
        return p.name

    # -- naming and types ----------------------------------------------------------
    def type_of(self, sort: str) -> str:
        if self.scope.has_sort(sort) and self.scope.is_hidden(sort):
            for s, cls in self.class_of_sort.items():
                if self.scope.leq(sort, s):
                    return cls
            raise SpecError([error("component-class-missing",
                                   f"no class translates hidden sort {sort}")])
        return self.opts.mapping.lookup(sort, self.scope).type

    def _info(self, sort: str):
        return self.opts.mapping.lookup(sort, self.scope)

    def param_names(self, sorts) -> list[tuple[str, str]]:
        bases = []
        for s in sorts:
            if self.scope.is_hidden(s):
                t = self.type_of(s)
                bases.append(t[:1].lower() + t[1:])
            else:
                bases.append(self._info(s).param)
        counts = Counter(bases)
        seen: Counter = Counter()
        out = []
        for b, s in zip(bases, sorts):
            if counts[b] > 1:
                seen[b] += 1
                b = f"{b}{seen[b]}"
            out.append((b, self.type_of(s)))
        return out

    def method_name(self, op: OperatorDecl, name: str) -> str:
        if op in self.getter_ops:
            return self.names.getter(op.module, name)
        return self.names.method(op.module, name)

    def placeholder(self, sort: str) -> str:
        if self.scope.is_hidden(sort):
            return "null"
        return self._info(sort).default

    # -- terms -> expressions --------------------------------------------------------
    def expr(self, t: Term, env: dict[Var, Expr]) -> Expr:
        if isinstance(t, Var):
            if t in env:
                return env[t]
            raise _Untranslatable(f"variable {t.name} has no counterpart in the method")
        if isinstance(t, Lit):
            if isinstance(t.value, bool):
                return BoolConst(t.value)
            return IntConst(t.value)
        op = t.op
        if op.builtin:
            if op.name in _BINARY:
                a, b = (self.expr(x, env) for x in t.args)
                if op.name in ("_+_", "_*_") and _has_call(b) and not _has_call(a):
                    a, b = b, a
                return BinOp(_BINARY[op.name], a, b)
            if op.name == "not_":
                return Not(self.expr(t.args[0], env))
            if op.name == "-_":
                inner = self.expr(t.args[0], env)
                return IntConst(-inner.value) if isinstance(inner, IntConst) else Neg(inner)
            if op.name in ("true", "false"):
                return BoolConst(op.name == "true")
            raise _Untranslatable(f"builtin {op.name} has no target counterpart")
        spec = self.observer_ops.get(op) or self.getter_ops.get(op) or self.transition_ops.get(op)
        if spec is not None:
            si = spec.state_index
            target = self.expr(t.args[si], env)
            args = tuple(self.expr(a, env) for i, a in enumerate(t.args) if i != si)
            return Call(target, self.method_name(op, spec.name), args)
        if not t.args and t.name in self.inits:
            return New(self.inits[t.name])
        if not t.args and t.name in self.absent:
            return Null()
        raise _Untranslatable(f"operator {op.name} has no pure-method counterpart")

    def _fail(self, code: str, what: str, eq: Equation | None, exc: Exception) -> SpecError:
        where = f": {format_equation(eq)}" if eq is not None else ""
        return SpecError([error(code, f"cannot translate {what} ({exc}){where}",
                                eq.span if eq is not None else None)])

    # -- observers -------------------------------------------------------------------
    def observer_method(self, o: ObserverSpec) -> ContractMethod:
        params = tuple(self.param_names(o.param_sorts))
        cases: tuple[ContractCase, ...] = ()
        defn = self.chain_observers.get(o.name)
        if defn is not None:
            cases = (self._chain_contract(o, defn, params),)
        return ContractMethod(self.method_name(o.op, o.name), params, self.type_of(o.result_sort),
                              pure=True, cases=cases, role="observer",
                              placeholder=self.placeholder(o.result_sort))

    def _chain_contract(self, o: ObserverSpec, e: Equation, params) -> ContractCase:
        lhs_params = [a for i, a in enumerate(e.lhs.args) if i != o.state_index]
        env: dict[Var, Expr] = {}
        for a, (pname, _) in zip(lhs_params, params):
            if not isinstance(a, Var):
                raise self._fail("chain-not-translatable", f"observer {o.name}", e,
                                 _Untranslatable("argument patterns are not supported"))
            env[a] = Name(pname)
        state = e.lhs.args[o.state_index]
        has_tr = any(isinstance(t, App) and t.op in self.transition_ops for t in e.rhs.walk())
        env[state] = self.ghost if has_tr else This()
        if has_tr:
            self.warnings.append(warning(
                "chain-has-transition",
                f"observer {o.name} is defined through a chain that applies a transition; "
                f"the contract reads it on the ghost pre-state, which the pure method "
                f"does not set", e.span))
        try:
            rhs = self.expr(e.rhs, env)
            guards = []
            for t in e.rhs.walk():
                if isinstance(t, App) and t.op in self.getter_ops:
                    g = ne(self.expr(t, {**env, state: This()}), Null())
                    if g not in guards:
                        guards.append(g)
        except _Untranslatable as exc:
            raise self._fail("chain-not-translatable", f"observer {o.name}", e, exc) from None
        reqs = (ContractClause(REQUIRES, conj(guards)),) if guards else ()
        return ContractCase(reqs, (ContractClause(ENSURES, eq(Result(), rhs)),))

    def getter_method(self, p) -> ContractMethod:
        types = [self.type_of(s) for s in p.id_sorts]
        if len(types) == 1:
            pn, bn = ["i"], ["j"]
        else:
            pn = [f"i{k}" for k in range(1, len(types) + 1)]
            bn = [f"j{k}" for k in range(1, len(types) + 1)]
        name = self.method_name(p.op, p.name)
        mine = Call(None, name, tuple(Name(x) for x in pn))
        other = Call(None, name, tuple(Name(x) for x in bn))
        reqs = [BinOp(">=", Name(x), IntConst(0)) for x, t in zip(pn, types) if t == "int"]
        differs = None
        for x, y in zip(pn, bn):
            d = ne(Name(x), Name(y))
            differs = d if differs is None else BinOp("||", differs, d)
        body = implies(conj([ne(mine, Null()), differs]), ne(mine, other))
        ens = Forall(tuple(zip(types, bn)), body)
        case = ContractCase((ContractClause(REQUIRES, conj(reqs)),) if reqs else (),
                            (ContractClause(ENSURES, ens),), normal_behavior=True)
        return ContractMethod(name, tuple(zip(pn, types)),
                              self.names.class_name(p.component_module), pure=True,
                              cases=(case,), role="getter", placeholder="null")

    # -- constructors ----------------------------------------------------------------
    def _binders(self, sorts, prefix="d") -> list[tuple[str, str]]:
        return [(self.type_of(s), f"{prefix}{k}") for k, s in enumerate(sorts, 1)]

    def _init_clauses(self, init: str, target: Expr | None) -> list[Expr]:
        out: list[Expr] = []
        init_op = next(op for op in self.scope.ops[init]
                       if not op.arity and op.coarity == self.model.hidden_sort)
        rewriter = self._rewriter()
        for o in self.model.all_observers():
            if o.name in self.chain_observers:
                continue
            binders = self._binders(o.param_sorts)
            vs = [Var(f"{n}#", s) for (_, n), s in zip(binders, o.param_sorts)]
            args: list[Term] = list(vs)
            args.insert(o.state_index, App(init, (), init_op))
            term = App(o.op.name, tuple(args), o.op)
            nf = rewriter.normalize(term)
            env = {v: Name(n) for v, (_, n) in zip(vs, binders)}
            bad = rewriter.stuck_subterm(nf)
            try:
                if bad is not None:
                    raise _Untranslatable(f"{term} does not reduce to a value; stuck at {bad}")
                value = self.expr(nf, env)
            except _Untranslatable as exc:
                raise SpecError([error("observer-equation-not-translatable",
                                       f"cannot determine the initial value of {o.name} "
                                       f"in {init}: {exc}", o.op.span)]) from None
            call = Call(target, self.method_name(o.op, o.name), tuple(Name(n) for _, n in binders))
            body = eq(call, value)
            out.append(Forall(tuple(binders), body) if binders else body)
        for p in self.model.projections:
            for e in p.equations:
                st = e.lhs.args[p.state_index]
                if not (isinstance(st, App) and st.name == init):
                    continue
                ids = [a for i, a in enumerate(e.lhs.args) if i != p.state_index]
                if not all(isinstance(a, Var) for a in ids):
                    continue
                binders = [(self.type_of(s), "i" if len(ids) == 1 else f"i{k}")
                           for k, s in enumerate(p.id_sorts, 1)]
                env = {v: Name(n) for v, (_, n) in zip(ids, binders)}
                get = Call(target if target is not None else This(),
                           self.method_name(p.op, p.name), tuple(env[v] for v in ids))
                value = self.expr(e.rhs, env)
                body = eq(get, Null()) if isinstance(value, Null) else Call(get, "equals", (value,))
                out.append(Forall(tuple(binders), body))
        return out

    def _rewriter(self) -> Rewriter:
        if not hasattr(self, "_rw"):
            self._rw = Rewriter(self.ms)
        return self._rw

    def constructors(self) -> list[ContractMethod]:
        out = []
        for k, init in enumerate(self.model.initial_states):
            if k == 0:
                ens = self._init_clauses(init, None)
                case = ContractCase((), tuple(ContractClause(ENSURES, e) for e in ens))
                out.append(ContractMethod(self.cls, (), None, is_constructor=True,
                                          cases=(case,) if ens else (), role="constructor"))
            else:
                ens = self._init_clauses(init, Result())
                case = ContractCase((), tuple(ContractClause(ENSURES, e) for e in ens))
                out.append(ContractMethod(self.names.method(self.model.module_name, init), (),
                                          self.cls, static=True, cases=(case,) if ens else (),
                                          role="factory", placeholder=f"new {self.cls}()"))
        return out

    # -- equality and copy -----------------------------------------------------------
    def _observer_equalities(self, skip_folded: bool) -> list[Expr]:
        out = []
        for o in self.model.all_observers():
            if o.name in self.chain_observers and (skip_folded or o.name in self.folded):
                continue
            binders = self._binders(o.param_sorts)
            args = tuple(Name(n) for _, n in binders)
            m = self.method_name(o.op, o.name)
            body = eq(Call(This(), m, args), Call(Name(ANOTHER), m, args))
            out.append(Forall(tuple(binders), body) if binders else body)
        return out

    def _projection_binders(self, p) -> tuple[list[tuple[str, str]], tuple[Expr, ...]]:
        binders = [(self.type_of(s), "i" if len(p.id_sorts) == 1 else f"i{k}")
                   for k, s in enumerate(p.id_sorts, 1)]
        return binders, tuple(Name(n) for _, n in binders)

    def equals_method(self) -> ContractMethod:
        parts = self._observer_equalities(skip_folded=True)
        for p in self.model.projections:
            binders, ids = self._projection_binders(p)
            g = self.method_name(p.op, p.name)
            parts.append(Forall(tuple(binders), Call(Call(This(), g, ids), "equals",
                                                     (Call(Name(ANOTHER), g, ids),))))
        body = implies(conj(parts), eq(Result(), BoolConst(True)))
        case = ContractCase((), (ContractClause(ENSURES, body),))
        return ContractMethod("equals", ((ANOTHER, self.cls),), "boolean", cases=(case,),
                              role="equals", placeholder="false")

    def copy_constructor(self) -> ContractMethod:
        ens: list[Expr] = []
        for p in self.model.projections:
            binders, ids = self._projection_binders(p)
            g = self.method_name(p.op, p.name)
            mine, theirs = Call(This(), g, ids), Call(Name(ANOTHER), g, ids)
            parts = [Call(mine, "equals", (theirs,)), ne(mine, theirs)]
            for o in self.model.observers:
                if self.folded.get(o.name) == p.name:
                    m = self.method_name(o.op, o.name)
                    parts.append(eq(Call(This(), m, ids), Call(Name(ANOTHER), m, ids)))
            ens.append(Forall(tuple(binders), implies(ne(mine, Null()), conj(parts))))
        ens.append(conj(self._observer_equalities(skip_folded=False) + [ne(This(), Name(ANOTHER))]))
        case = ContractCase((ContractClause(REQUIRES, ne(Name(ANOTHER), Null())),),
                            tuple(ContractClause(ENSURES, e) for e in ens),
                            normal_behavior=self.model.is_composite)
        return ContractMethod(self.cls, ((ANOTHER, self.cls),), None, is_constructor=True,
                              cases=(case,), role="copy")

    # -- transitions -----------------------------------------------------------------
    def _bind_transition(self, tr: TransitionSpec, targ: App, params, env, ante):
        for a, (pname, _) in zip([x for i, x in enumerate(targ.args) if i != tr.state_index],
                                 params):
            if isinstance(a, Var) and a not in env:
                env[a] = Name(pname)
            elif env.get(a) != Name(pname):
                ante.append(eq(Name(pname), self.expr(a, env)))
        st = targ.args[tr.state_index]
        if not isinstance(st, Var):
            raise _Untranslatable("the pre-state must be a variable")
        env[st] = self.ghost

    def _observer_clause(self, tr: TransitionSpec, o: ObserverSpec, e: Equation, params):
        """Ensures clause for ``o(tau(S, X), Y) = r``; returns (case, expr)."""
        env: dict[Var, Expr] = {}
        ante: list[Expr] = []
        binders: list[tuple[str, str]] = []
        self._bind_transition(tr, e.lhs.args[o.state_index], params, env, ante)
        args = []
        k = 0
        for i, a in enumerate(e.lhs.args):
            if i == o.state_index:
                continue
            sort = o.op.arity[i]
            if isinstance(a, Var) and a not in env:
                k += 1
                name = f"d{k}"
                binders.append((self.type_of(sort), name))
                env[a] = Name(name)
            args.append(self.expr(a, env))
        case = 0
        cond = tr.effective_condition
        for atom in _conjuncts(e.condition):
            if cond is not None and isinstance(atom, App) and atom.op == cond.op:
                case = 1
            elif cond is not None and isinstance(atom, App) and atom.op.name == "not_" \
                    and isinstance(atom.args[0], App) and atom.args[0].op == cond.op:
                case = 2
            else:
                ante.append(self.expr(atom, env))
        body = eq(Call(Result(), self.method_name(o.op, o.name), tuple(args)),
                  self.expr(e.rhs, env))
        body = implies(conj(ante), body)
        return case, (Forall(tuple(binders), body) if binders else body)

    def _stutter(self, o: ObserverSpec) -> Expr:
        binders = self._binders(o.param_sorts)
        args = tuple(Name(n) for _, n in binders)
        m = self.method_name(o.op, o.name)
        body = eq(Call(Result(), m, args), Call(self.ghost, m, args))
        return Forall(tuple(binders), body) if binders else body

    def _effective_condition(self, tr: TransitionSpec, params) -> Expr | None:
        cond = tr.effective_condition
        if cond is None:
            return None
        e = cond.equation
        try:
            if e is None:
                raise _Untranslatable(f"{cond.name} has no defining equation")
            if e.condition is not None:
                raise _Untranslatable("conditional effective-condition equations are not supported")
            env: dict[Var, Expr] = {}
            args = [a for i, a in enumerate(e.lhs.args) if i != tr.state_index]
            st = e.lhs.args[tr.state_index]
            if not isinstance(st, Var) or not all(isinstance(a, Var) for a in args):
                raise _Untranslatable("arguments must be variables")
            env[st] = This()
            for a, (pname, _) in zip(args, params):
                env[a] = Name(pname)
            return self.expr(e.rhs, env)
        except _Untranslatable as exc:
            raise self._fail("observer-equation-not-translatable",
                             f"effective condition of {tr.name}", e, exc) from None

    def _effects(self, tr: TransitionSpec, params) -> tuple[list[Expr], list[Expr]]:
        reqs: list[Expr] = []
        ens: list[Expr] = []
        for eff in self.model.effects_of(tr.name):
            if eff.negated or eff.kind not in (UPDATE, CREATE, DELETE):
                continue
            e = eff.equation
            p = self.model.projection(eff.projection)
            try:
                env: dict[Var, Expr] = {}
                ante: list[Expr] = []
                targ = e.lhs.args[p.state_index]
                ids = [a for i, a in enumerate(e.lhs.args) if i != p.state_index]
                tvars = [a for i, a in enumerate(targ.args) if i != tr.state_index]
                binders = []
                for v, b in zip(ids, eff.id_binding):
                    if b is not None:
                        env[v] = Name(params[b][0])
                        if isinstance(tvars[b], Var):
                            env[tvars[b]] = Name(params[b][0])
                    elif isinstance(v, Var):
                        name = "i" if len(ids) == 1 else f"i{len(binders) + 1}"
                        binders.append((self.type_of(p.id_sorts[len(binders)]), name))
                        env[v] = Name(name)
                self._bind_transition(tr, targ, params, env, ante)
                ante += [self.expr(g, env) for g in eff.guards]
                id_exprs = tuple(self.expr(v, env) for v in ids)
                g = self.method_name(p.op, p.name)
                now, after = Call(This(), g, id_exprs), Call(Result(), g, id_exprs)
                if eff.kind == DELETE:
                    req, clause = ne(now, Null()), eq(after, Null())
                else:
                    value = self.expr(e.rhs, env)
                    clause = Call(after, "equals", (value,))
                    if eff.kind == UPDATE:
                        req = ne(now, Null())
                    else:
                        req = eq(now, Null())
                        if len(id_exprs) == 1 and not binders:
                            t = self.type_of(p.id_sorts[0])
                            other = Call(Result(), g, (Name("j"),))
                            clause = conj([clause, Forall(((t, "j"),), implies(
                                ne(Name("j"), id_exprs[0]), ne(after, other)))])
            except _Untranslatable as exc:
                raise self._fail("chain-not-translatable",
                                 f"effect of {tr.name} on {p.name}", e, exc) from None
            a = conj(ante)
            req, clause = implies(a, req), implies(a, clause)
            if binders:
                req, clause = Forall(tuple(binders), req), Forall(tuple(binders), clause)
            if req not in reqs:
                reqs.append(req)
            ens.append(clause)
        return reqs, ens

    def transition_method(self, tr: TransitionSpec) -> ContractMethod:
        params = self.param_names(tr.param_sorts)
        nat = [BinOp(">=", Name(n), IntConst(0)) for (n, _), s in zip(params, tr.param_sorts)
               if not self.scope.is_hidden(s) and self._info(s).non_negative]
        cond = self._effective_condition(tr, params)
        eff_reqs, eff_ens = self._effects(tr, params) if self.model.is_composite else ([], [])
        effective: list[Expr] = []
        ineffective: list[Expr] = []
        covered: set[str] = set()
        for e in tr.equations:
            o = self.observer_ops.get(e.lhs.op)
            if o is None:
                continue
            try:
                case, clause = self._observer_clause(tr, o, e, params)
            except _Untranslatable as exc:
                raise self._fail("observer-equation-not-translatable",
                                 f"effect of {tr.name} on {o.name}", e, exc) from None
            if case == 2:
                ineffective.append(clause)
                covered.add(o.name)
            else:
                effective.append(clause)
        same = eq(Result(), This())
        preamble = (ContractClause(SET_GHOST, New(self.cls, (This(),)), self.ghost.name),)
        first = ContractCase(
            tuple(ContractClause(REQUIRES, r) for r in [conj([cond] + eff_reqs + nat)] if r),
            (ContractClause(ENSURES, conj(eff_ens + effective + [same])),))
        cases = [first]
        if cond is not None:
            stutter = [self._stutter(o) for o in self.model.all_observers()
                       if o.name not in covered and o.name not in self.chain_observers]
            cases.append(ContractCase(
                (ContractClause(REQUIRES, conj([negate(cond)] + nat)),),
                (ContractClause(ENSURES, conj(ineffective + stutter + [same])),),
                assignable=NOTHING))
        return ContractMethod(self.method_name(tr.op, tr.name), tuple(params), self.cls,
                              cases=tuple(cases), body_preamble=preamble, role="transition",
                              placeholder="this")

    # -- whole class -----------------------------------------------------------------
    def run(self) -> ContractClass:
        m = self.model
        methods = [self.getter_method(p) for p in m.projections]
        methods += [self.observer_method(o) for o in m.observers]
        methods += self.constructors()
        methods.append(self.equals_method())
        methods.append(self.copy_constructor())
        methods += [self.transition_method(t) for t in m.transitions]
        ghosts = ((self.ghost.name, self.cls),) if m.transitions else ()
        extends = self.parent_cls.name if self.parent_cls is not None else None
        cls = ContractClass(self.cls, extends, ghosts, tuple(methods), m.module_name,
                            tuple(self.warnings))
        known = [self.parent_cls] if self.parent_cls else []
        known += list(self.components.values())
        diags = check_side_effects(cls, known)
        if has_errors(diags):
            raise SpecError(diags)
        return cls


def _translate(model, ms, opts, components, parent):
    return _Translator(model, ms, opts or TranslationOptions(), components, parent).run()


def translate_single(model: OtsModel, module_set: ModuleSet,
                     options: TranslationOptions | None = None) -> ContractClass:
    """Contract class for an OTS without projections."""
    if model.is_composite:
        raise ValueError(f"{model.module_name} is composite; use translate_composite")
    return _translate(model, module_set, options, {}, None)


def translate_composite(model: OtsModel, components: list[ContractClass], module_set: ModuleSet,
                        options: TranslationOptions | None = None) -> ContractClass:
    """Contract class for a composite OTS, given its already translated components."""
    if not model.is_composite:
        raise ValueError(f"{model.module_name} has no projections; use translate_single")
    by_module = {c.module: c for c in components}
    missing = [name for name in model.components if name not in by_module]
    if missing:
        raise SpecError([error("component-class-missing",
                               f"component module(s) {', '.join(missing)} of "
                               f"{model.module_name} have not been translated")])
    return _translate(model, module_set, options, by_module, None)


def translate_inheritance(child: OtsModel, parent: ContractClass | None, module_set: ModuleSet,
                          options: TranslationOptions | None = None,
                          components: list[ContractClass] = ()) -> ContractClass:
    """Contract class for ``child``, declared as extending the parent's class."""
    if child.extends_module is None:
        raise ValueError(f"{child.module_name} does not refine another OTS")
    if parent is None or parent.module != child.extends_module:
        raise SpecError([error("parent-not-translated",
                               f"{child.module_name} extends {child.extends_module}, "
                               f"which has not been translated")])
    return _translate(child, module_set, options, {c.module: c for c in components}, parent)


def translate_model(model: OtsModel, module_set: ModuleSet, translated: dict[str, ContractClass],
                    options: TranslationOptions | None = None) -> ContractClass:
    comps = [translated[n] for n in model.components if n in translated]
    if model.extends_module is not None:
        return translate_inheritance(model, translated.get(model.extends_module), module_set,
                                     options, comps)
    if model.is_composite:
        return translate_composite(model, comps, module_set, options)
    return translate_single(model, module_set, options)


def translatable_modules(module_set: ModuleSet) -> list[str]:
    """User modules that declare exactly one hidden sort, in import order."""
    return [m.name for m in module_set if len(m.hidden_sorts()) == 1]


def translate_all(module_set: ModuleSet, options: TranslationOptions | None = None,
                  modules: list[str] | None = None) -> list[ContractClass]:
    """Translate every OTS module (or the named ones plus what they need)."""
    names = translatable_modules(module_set)
    if modules is not None:
        unknown = [n for n in modules if n not in names]
        if unknown:
            module_set.module(unknown[0])  # raises unknown-module if absent
            raise SpecError([error("no-hidden-sort", f"module {unknown[0]} is not an OTS")])
    translated: dict[str, ContractClass] = {}
    for name in names:
        model = classify(module_set, name)
        if model.is_composite:
            found = check_composition(model, None, module_set)
            if has_errors(found):
                raise SpecError(found)
        translated[name] = translate_model(model, module_set, translated, options)
    wanted = modules if modules is not None else names
    return [translated[n] for n in wanted]
