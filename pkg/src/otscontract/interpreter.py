"""Execute an OTS by rewriting: observe states, apply transitions and compare
states behaviorally over bounded argument domains.

A state is kept in canonical form as the list of transitions applied to an
initial constant.  Observation builds the corresponding term and reduces it.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Sequence

from .analyzer import CREATE, DELETE, UPDATE, OtsModel, classify
from .modules import ModuleSet, Scope
from .rewrite import DEFAULT_FUEL, RewriteError, Rewriter, StuckTerm, stuck_message
from .spec_ast import App, Equation, Lit, OperatorDecl, Term, Var, bool_lit, int_lit


@dataclass(frozen=True)
class DomainBounds:
    int_range: tuple[int, int] = (-3, 3)
    id_range: tuple[int, int] = (0, 2)
    max_rewrite_steps: int = DEFAULT_FUEL

    def __post_init__(self):
        for lo, hi in (self.int_range, self.id_range):
            if lo > hi:
                raise ValueError(f"empty range [{lo}, {hi}]")
        if self.max_rewrite_steps < 1:
            raise ValueError("max_rewrite_steps must be at least 1")


class _Absent:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ABSENT"

    def __reduce__(self):
        return (_Absent, ())


ABSENT = _Absent()


@dataclass(frozen=True, eq=False)
class StateValue:
    """A ground state: transitions applied, in order, to an initial constant.

    Compare states with :meth:`Interpreter.behaviorally_equal`; ``==`` is
    identity only.
    """

    model: OtsModel = field(repr=False)
    initial: str
    history: tuple[tuple[str, tuple], ...] = ()

    def then(self, transition: str, args: Sequence[Any] = ()) -> "StateValue":
        return StateValue(self.model, self.initial, self.history + ((transition, tuple(args)),))

    def __str__(self) -> str:
        s = self.initial
        for name, args in self.history:
            s += f" ; {name}({', '.join(map(str, args))})" if args else f" ; {name}"
        return s


class InterpreterError(RewriteError):
    def __init__(self, code: str, message: str, term: Term | None = None):
        super().__init__(message, term)
        self.code = code


@dataclass(frozen=True)
class Witness:
    observer: str
    args: tuple
    left: Any
    right: Any
    inner: "Witness | None" = None

    def __str__(self) -> str:
        call = f"{self.observer}({', '.join(map(str, self.args))})" if self.args else self.observer
        if self.inner is not None:
            return f"{call} -> {self.inner}"
        return f"{call}: {_show(self.left)} vs {_show(self.right)}"


@dataclass(frozen=True)
class Equivalence:
    equal: bool
    witness: Witness | None = None

    def __bool__(self) -> bool:
        return self.equal


@dataclass(frozen=True)
class TraceStep:
    step: int
    transition: str | None
    args: tuple
    observations: dict

    def to_json(self) -> dict:
        return {"step": self.step, "transition": self.transition, "args": list(self.args),
                "observations": self.observations}

    def to_text(self) -> str:
        head = "init" if self.transition is None else (
            f"{self.transition}({', '.join(map(str, self.args))})" if self.args
            else self.transition)
        return f"step {self.step} {head}: {_format_obs(self.observations)}"


def _format_obs(obs: dict) -> str:
    parts = []
    for k, v in obs.items():
        if isinstance(v, dict):
            parts.append(f"{k}={{{_format_obs(v)}}}")
        else:
            parts.append(f"{k}={_show_json(v)}")
    return " ".join(parts)


def _show_json(v) -> str:
    if v is None:
        return "absent"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _show(v) -> str:
    if v is ABSENT:
        return "absent"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def trace_to_text(trace: Iterable[TraceStep]) -> str:
    return "".join(s.to_text() + "\n" for s in trace)


def trace_to_json(trace: Iterable[TraceStep]) -> str:
    return "".join(json.dumps(s.to_json()) + "\n" for s in trace)


class Interpreter:
    """Rewriting-based execution of one classified OTS.

    ``implicit_stutter`` adds, for every transition with an effective
    condition, the rule ``o(tau(S, X), Y) = o(S, Y) if not c-tau(S, X)`` for
    each observer ``o``.  It is off by default: a spec that omits its
    stuttering equations then reports stuck terms.
    """

    def __init__(self, module_set: ModuleSet, model: OtsModel | str,
                 bounds: DomainBounds | None = None, implicit_stutter: bool = False,
                 _rewriter: Rewriter | None = None):
        if isinstance(model, str):
            model = classify(module_set, model)
        self.module_set = module_set
        self.model = model
        self.bounds = bounds or DomainBounds()
        self.implicit_stutter = implicit_stutter
        self.scope: Scope = module_set.scope()
        self.models = _related_models(model)
        if _rewriter is None:
            extra = _stutter_rules(self.models, self.scope) if implicit_stutter else []
            _rewriter = Rewriter(module_set, extra, fuel=self.bounds.max_rewrite_steps)
        self.rewriter = _rewriter
        self._subs: dict[str, Interpreter] = {model.module_name: self}
        self._absent_names = {p.absent_value for m in self.models for p in m.projections
                              if p.absent_value}

    @property
    def warnings(self):
        return self.rewriter.warnings

    def for_model(self, model: OtsModel) -> "Interpreter":
        """Interpreter for a component/parent model sharing this one's rewriter."""
        sub = self._subs.get(model.module_name)
        if sub is None:
            sub = Interpreter(self.module_set, model, self.bounds, self.implicit_stutter,
                              _rewriter=self.rewriter)
            sub._subs = self._subs
            self._subs[model.module_name] = sub
        return sub

    # -- states and values ---------------------------------------------------------
    def initial_state(self, name: str | None = None) -> StateValue:
        inits = self.model.initial_states
        if not inits:
            raise InterpreterError("unknown-transition",
                                   f"module {self.model.module_name} has no initial state")
        if name is None:
            name = inits[0]
        if name not in inits:
            raise InterpreterError("unknown-transition", f"{name} is not an initial state")
        return StateValue(self.model, name)

    def _constant(self, name: str, sort: str) -> OperatorDecl:
        for op in self.scope.ops.get(name, ()):
            if not op.arity and op.coarity == sort:
                return op
        raise InterpreterError("unknown-transition", f"no constant {name} : -> {sort}")

    def state_term(self, state: StateValue) -> Term:
        model = state.model
        t: Term = App(state.initial, (), self._constant(state.initial, model.hidden_sort))
        for name, args in state.history:
            tr = model.transition(name)
            vals = [self.value_term(v, s) for v, s in zip(args, tr.param_sorts)]
            vals.insert(tr.state_index, t)
            t = App(tr.op.name, tuple(vals), tr.op)
        return t

    def is_id_sort(self, sort: str) -> bool:
        if sort in ("Bool", "Int", "Nat") or not self.scope.has_sort(sort):
            return False
        if self.scope.is_hidden(sort):
            return False
        return not self.enum_constants(sort)

    def enum_constants(self, sort: str) -> list[str]:
        return [op.name for op in self.scope.operators()
                if not op.arity and op.coarity == sort and not op.builtin]

    def value_term(self, value: Any, sort: str) -> Term:
        """Convert a Python data value to a ground term of ``sort``."""
        if isinstance(value, StateValue):
            return self.for_model(value.model).state_term(value)
        if sort == "Bool":
            if not isinstance(value, bool):
                raise InterpreterError("arity-mismatch", f"expected a boolean for Bool, got {value!r}")
            return bool_lit(value)
        if self.is_id_sort(sort):
            if isinstance(value, str):
                m = re.search(r"(\d+)$", value)
                if not m:
                    raise InterpreterError("arity-mismatch",
                                           f"identifier {value!r} does not end in a number")
                value = int(m.group(1))
            if isinstance(value, bool) or not isinstance(value, int):
                raise InterpreterError("arity-mismatch", f"expected an identifier for {sort}")
            return Lit(value, sort)
        if sort in ("Int", "Nat"):
            if isinstance(value, bool) or not isinstance(value, int):
                raise InterpreterError("arity-mismatch", f"expected an integer for {sort}, "
                                                         f"got {value!r}")
            if sort == "Nat" and value < 0:
                raise InterpreterError("arity-mismatch", f"{value} is not a Nat")
            return int_lit(value)
        if isinstance(value, str) and value in self.enum_constants(sort):
            return App(value, (), self._constant(value, sort))
        raise InterpreterError("arity-mismatch", f"cannot use {value!r} as a value of sort {sort}")

    def _model_for_sort(self, sort: str) -> OtsModel | None:
        for m in self.models:
            if m.hidden_sort == sort:
                return m
        for m in self.models:
            if self.scope.connected(m.hidden_sort, sort):
                return m
        return None

    def term_value(self, t: Term) -> Any:
        """Convert a normal form back to a data value (or component state)."""
        if isinstance(t, Lit):
            return t.value
        if isinstance(t, App):
            sort = t.op.coarity
            if not self.scope.is_hidden(sort):
                if not t.args:
                    return t.name
                raise InterpreterError("stuck-term", f"not a value: {t}", t)
            model = self._model_for_sort(sort)
            if model is None:
                raise InterpreterError("stuck-term", f"no OTS owns sort {sort}: {t}", t)
            history = []
            cur = t
            trans = {tr.op: tr for tr in model.all_transitions()}
            while isinstance(cur, App) and cur.op in trans:
                tr = trans[cur.op]
                args = tuple(self.term_value(a) for i, a in enumerate(cur.args)
                             if i != tr.state_index)
                history.append((tr.name, args))
                cur = cur.args[tr.state_index]
            if isinstance(cur, App) and not cur.args:
                if cur.name in self._absent_names:
                    return ABSENT
                if cur.name in model.initial_states:
                    return StateValue(model, cur.name, tuple(reversed(history)))
            raise InterpreterError("stuck-term", f"not a state of {model.module_name}: {t}", t)
        raise InterpreterError("stuck-term", f"free variable in value position: {t}", t)

    # -- core operations -----------------------------------------------------------
    def reduce(self, term: Term) -> Term:
        return self.rewriter.reduce(term, self.bounds.max_rewrite_steps)

    def _check_args(self, what: str, sorts: Sequence[str], args: Sequence[Any]) -> list[Term]:
        if len(args) != len(sorts):
            raise InterpreterError("arity-mismatch",
                                   f"{what} takes {len(sorts)} argument(s), got {len(args)}")
        return [self.value_term(v, s) for v, s in zip(args, sorts)]

    def _build(self, op: OperatorDecl, state_index: int, state: StateValue,
               arg_terms: list[Term]) -> App:
        args = list(arg_terms)
        args.insert(state_index, self.state_term(state))
        return App(op.name, tuple(args), op)

    def observe(self, state: StateValue, observer: str, args: Sequence[Any] = ()) -> Any:
        """Value of ``observer(state, args)``; ABSENT when it hits an absent component."""
        model = state.model
        spec = None
        for o in model.all_observers():
            if o.name == observer:
                spec = o
                op, si, sorts = o.op, o.state_index, o.param_sorts
        if spec is None:
            for p in model.projections:
                if p.name == observer:
                    spec = p
                    op, si, sorts = p.op, p.state_index, p.id_sorts
        if spec is None:
            raise InterpreterError("unknown-observer",
                                   f"{observer} is not an observer of {model.module_name}")
        term = self._build(op, si, state, self._check_args(observer, sorts, args))
        nf = self.rewriter.normalize(term, self.bounds.max_rewrite_steps)
        stuck = self.rewriter.stuck_subterm(nf)
        if stuck is not None:
            if self._touches_absent(stuck):
                return ABSENT
            raise StuckTerm(stuck_message(stuck, term), term, stuck)
        return self.term_value(nf)

    def _touches_absent(self, t: Term) -> bool:
        return any(isinstance(s, App) and not s.args and s.name in self._absent_names
                   for s in t.walk())

    def check_effective(self, state: StateValue, transition: str,
                        args: Sequence[Any] = ()) -> bool:
        tr = self._transition(state.model, transition)
        arg_terms = self._check_args(transition, tr.param_sorts, args)
        cond = tr.effective_condition
        if cond is None:
            return True
        term = self._build(cond.op, tr.state_index, state, arg_terms)
        nf = self.reduce(term)
        if not (isinstance(nf, Lit) and isinstance(nf.value, bool)):
            raise InterpreterError("non-boolean-condition",
                                   f"{cond.name} reduced to {nf}, not a boolean", term)
        return nf.value

    def _transition(self, model: OtsModel, name: str):
        try:
            return model.transition(name)
        except KeyError:
            raise InterpreterError("unknown-transition",
                                   f"{name} is not a transition of {model.module_name}") from None

    def apply_transition(self, state: StateValue, transition: str,
                         args: Sequence[Any] = ()) -> StateValue:
        """Successor state; total regardless of the effective condition."""
        tr = self._transition(state.model, transition)
        terms = self._check_args(transition, tr.param_sorts, args)
        return state.then(transition, tuple(self.term_value(t) for t in terms))

    # -- equivalence -------------------------------------------------------------
    def domain(self, sort: str) -> list[Any]:
        lo, hi = self.bounds.int_range
        if sort == "Int":
            return list(range(lo, hi + 1))
        if sort == "Nat":
            return list(range(max(lo, 0), hi + 1))
        if sort == "Bool":
            return [False, True]
        if self.is_id_sort(sort):
            a, b = self.bounds.id_range
            return list(range(a, b + 1))
        consts = self.enum_constants(sort)
        if consts:
            return consts
        raise InterpreterError("arity-mismatch", f"cannot enumerate values of sort {sort}")

    def experiments(self, model: OtsModel | None = None) -> Iterator[tuple[str, tuple]]:
        """Every (observer, args) pair over the bounded domains, in a fixed order."""
        model = model or self.model
        for o in model.all_observers():
            for args in itertools.product(*(self.domain(s) for s in o.param_sorts)):
                yield o.name, args
        for p in model.projections:
            for args in itertools.product(*(self.domain(s) for s in p.id_sorts)):
                yield p.name, args

    def behaviorally_equal(self, s1: StateValue, s2: StateValue) -> Equivalence:
        """Do all observers agree on ``s1`` and ``s2`` over the tested domains?"""
        if s1.model.module_name != s2.model.module_name:
            raise InterpreterError("arity-mismatch", "states belong to different models")
        if s1 is s2:
            return Equivalence(True)
        for name, args in self.experiments(s1.model):
            v1 = self.observe(s1, name, args)
            v2 = self.observe(s2, name, args)
            if isinstance(v1, StateValue) and isinstance(v2, StateValue):
                inner = self.for_model(v1.model).behaviorally_equal(v1, v2)
                if not inner:
                    return Equivalence(False, Witness(name, args, v1, v2, inner.witness))
            elif isinstance(v1, StateValue) or isinstance(v2, StateValue):
                return Equivalence(False, Witness(name, args, v1, v2))
            elif v1 is ABSENT or v2 is ABSENT:
                if v1 is not v2:
                    return Equivalence(False, Witness(name, args, v1, v2))
            elif type(v1) is not type(v2) or v1 != v2:
                return Equivalence(False, Witness(name, args, v1, v2))
        return Equivalence(True)

    # -- exploration -------------------------------------------------------------
    def transition_instances(self, model: OtsModel | None = None) -> list[tuple[str, tuple]]:
        model = model or self.model
        out = []
        for t in model.all_transitions():
            for args in itertools.product(*(self.domain(s) for s in t.param_sorts)):
                out.append((t.name, args))
        return out

    def reachable_states(self, depth: int) -> list[StateValue]:
        """All histories of length <= ``depth`` over the bounded argument domains."""
        moves = self.transition_instances()
        frontier = [self.initial_state(i) for i in self.model.initial_states]
        out = list(frontier)
        for _ in range(depth):
            frontier = [s.then(n, a) for s in frontier for n, a in moves]
            out.extend(frontier)
        return out

    # -- scenarios -----------------------------------------------------------------
    def snapshot(self, state: StateValue) -> dict:
        obs: dict[str, Any] = {}
        for name, args in self.experiments(state.model):
            key = f"{name}({', '.join(map(str, args))})" if args else name
            v = self.observe(state, name, args)
            if v is ABSENT:
                obs[key] = None
            elif isinstance(v, StateValue):
                obs[key] = self.for_model(v.model).snapshot(v)
            else:
                obs[key] = v
        return obs

    def check_preconditions(self, state: StateValue, transition: str, args: Sequence[Any]):
        """Reject composite transitions aimed at an absent (or, for creation,
        an already present) component."""
        for eff in state.model.effects_of(transition):
            if eff.kind not in (UPDATE, CREATE, DELETE) or eff.negated:
                continue
            if any(b is None for b in eff.id_binding):
                continue
            ids = tuple(args[b] for b in eff.id_binding)
            current = self.observe(state, eff.projection, ids)
            shown = f"{eff.projection}({', '.join(map(str, ids))})"
            if eff.kind == CREATE and current is not ABSENT:
                raise InterpreterError("projection-present",
                                       f"{transition} creates {shown}, which already exists")
            if eff.kind != CREATE and current is ABSENT:
                raise InterpreterError("projection-absent",
                                       f"{transition} needs {shown}, which is absent")

    def run_scenario(self, scenario: Iterable, initial: str | None = None,
                     check: bool = True) -> list[TraceStep]:
        """Apply transitions in order, recording every observation after each step."""
        steps = [_scenario_entry(e) for e in scenario]
        state = self.initial_state(initial)
        trace = [TraceStep(0, None, (), self.snapshot(state))]
        for i, (name, args) in enumerate(steps, 1):
            state_next = self.apply_transition(state, name, args)
            args = state_next.history[-1][1]
            if check:
                self.check_preconditions(state, name, args)
            state = state_next
            trace.append(TraceStep(i, name, args, self.snapshot(state)))
        return trace


def _scenario_entry(entry) -> tuple[str, tuple]:
    if isinstance(entry, dict):
        if "transition" not in entry:
            raise InterpreterError("bad-scenario", f"scenario entry without 'transition': {entry}")
        return str(entry["transition"]), tuple(entry.get("args", ()))
    if isinstance(entry, (list, tuple)) and len(entry) == 2:
        return str(entry[0]), tuple(entry[1])
    raise InterpreterError("bad-scenario", f"malformed scenario entry {entry!r}")


def load_scenario(text: str) -> list[tuple[str, tuple]]:
    """Parse the JSON scenario format ``[{"transition": name, "args": [...]}, ...]``."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InterpreterError("bad-scenario", f"scenario is not valid JSON: {exc}") from None
    if not isinstance(data, list):
        raise InterpreterError("bad-scenario", "scenario must be a JSON list")
    return [_scenario_entry(e) for e in data]


def _related_models(model: OtsModel) -> list[OtsModel]:
    out: list[OtsModel] = []
    seen: set[str] = set()

    def visit(m: OtsModel):
        if m.module_name in seen:
            return
        seen.add(m.module_name)
        out.append(m)
        if m.parent is not None:
            visit(m.parent)
        for c in m.components.values():
            visit(c)

    visit(model)
    return out


def _stutter_rules(models: list[OtsModel], scope: Scope) -> list[Equation]:
    not_op = scope.ops["not_"][0]
    rules = []
    for m in models:
        for tr in m.all_transitions():
            cond = tr.effective_condition
            if cond is None:
                continue
            state = Var("S#", m.hidden_sort)
            xs = [Var(f"X{i}#", s) for i, s in enumerate(tr.param_sorts)]
            targs: list[Term] = list(xs)
            targs.insert(tr.state_index, state)
            applied = App(tr.op.name, tuple(targs), tr.op)
            guard = App("not_", (App(cond.op.name, tuple(targs), cond.op),), not_op)
            for o in m.all_observers():
                if not scope.leq(tr.op.coarity, o.op.arity[o.state_index]):
                    continue
                ys = [Var(f"Y{i}#", s) for i, s in enumerate(o.param_sorts)]
                lhs_args: list[Term] = list(ys)
                rhs_args: list[Term] = list(ys)
                lhs_args.insert(o.state_index, applied)
                rhs_args.insert(o.state_index, state)
                rules.append(Equation(App(o.op.name, tuple(lhs_args), o.op),
                                      App(o.op.name, tuple(rhs_args), o.op), guard,
                                      label=f"stutter-{tr.name}-{o.name}"))
    return rules
