"""Recover the OTS structure of a checked module.

Behavioral operators are split into observers, transitions and projections;
nullary hidden constants become initial states and ``c-<name>`` Boolean
operators are bound as effective conditions.  For composite modules the
projection equations are classified by shape so the composition conditions
can be checked syntactically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .diagnostics import Diagnostic, SpecError, error, warning
from .modules import ModuleSet, Scope
from .spec_ast import App, Equation, OperatorDecl, Term, Var, format_equation

SCHEMA_VERSION = "otscontract.model/1"

# Shapes of a projection equation on a transition term.
UPDATE = "update"
CREATE = "create"
DELETE = "delete"
IDENTITY = "identity"
UNMATCHED = "unmatched"


@dataclass(frozen=True)
class ObserverSpec:
    name: str
    op: OperatorDecl
    param_sorts: tuple[str, ...]
    result_sort: str
    state_index: int
    equations: tuple[Equation, ...] = ()


@dataclass(frozen=True)
class EffectiveCondition:
    name: str
    op: OperatorDecl
    equation: Equation | None


@dataclass(frozen=True)
class TransitionSpec:
    name: str
    op: OperatorDecl
    param_sorts: tuple[str, ...]
    state_index: int
    effective_condition: EffectiveCondition | None = None
    equations: tuple[Equation, ...] = ()

    def param_positions(self) -> list[int]:
        return [i for i in range(len(self.op.arity)) if i != self.state_index]


@dataclass(frozen=True)
class ProjectionSpec:
    name: str
    op: OperatorDecl
    id_sorts: tuple[str, ...]
    component_module: str
    component_hidden_sort: str
    state_index: int
    absent_value: str | None = None
    equations: tuple[Equation, ...] = ()


@dataclass(frozen=True)
class ComponentEffect:
    """How one projection equation says a transition changes a component."""

    transition: str
    projection: str
    kind: str
    equation: Equation
    # per projection id argument: index into the transition's parameters
    # bound by an ``U == U'`` guard, or None when unconstrained
    id_binding: tuple[int | None, ...]
    negated: bool  # guarded by ``U =/= U'``
    guards: tuple[Term, ...]
    component_transitions: tuple[str, ...]
    depends_on: tuple[str, ...]


@dataclass(frozen=True)
class OtsModel:
    module_name: str
    hidden_sort: str
    observers: tuple[ObserverSpec, ...] = ()
    initial_states: tuple[str, ...] = ()
    transitions: tuple[TransitionSpec, ...] = ()
    projections: tuple[ProjectionSpec, ...] = ()
    extends_module: str | None = None
    auxiliary_ops: tuple[str, ...] = ()
    parent: "OtsModel | None" = field(default=None, compare=False, repr=False)
    components: dict = field(default_factory=dict, compare=False, repr=False)
    effects: tuple[ComponentEffect, ...] = field(default=(), compare=False, repr=False)
    warnings: tuple[Diagnostic, ...] = field(default=(), compare=False, repr=False)

    @property
    def is_composite(self) -> bool:
        return bool(self.projections)

    def observer(self, name: str) -> ObserverSpec:
        for o in self.all_observers():
            if o.name == name:
                return o
        raise KeyError(name)

    def transition(self, name: str) -> TransitionSpec:
        for t in self.all_transitions():
            if t.name == name:
                return t
        raise KeyError(name)

    def projection(self, name: str) -> ProjectionSpec:
        for p in self.projections:
            if p.name == name:
                return p
        raise KeyError(name)

    def all_observers(self) -> list[ObserverSpec]:
        """Own observers followed by inherited ones not redeclared here."""
        out = list(self.observers)
        if self.parent is not None:
            own = {o.name for o in out}
            out += [o for o in self.parent.all_observers() if o.name not in own]
        return out

    def all_transitions(self) -> list[TransitionSpec]:
        out = list(self.transitions)
        if self.parent is not None:
            own = {t.name for t in out}
            out += [t for t in self.parent.all_transitions() if t.name not in own]
        return out

    def all_initial_states(self) -> list[str]:
        return list(self.initial_states)

    def effects_of(self, transition: str) -> list[ComponentEffect]:
        return [e for e in self.effects if e.transition == transition]

    def behavioral_names(self) -> list[str]:
        return ([o.name for o in self.observers] + [t.name for t in self.transitions]
                + [p.name for p in self.projections])


# ---------------------------------------------------------------------------
# classify

def classify(module_set: ModuleSet, module_name: str) -> OtsModel:
    """Classify ``module_name`` into an OtsModel or raise SpecError."""
    return _classify(module_set, module_name, {})


def _classify(ms: ModuleSet, name: str, cache: dict[str, OtsModel]) -> OtsModel:
    if name in cache:
        return cache[name]
    mod = ms.module(name)
    scope = ms.scope(name)
    diags: list[Diagnostic] = []
    hidden = mod.hidden_sorts()
    if not hidden:
        raise SpecError([error("no-hidden-sort",
                               f"module {name} declares no hidden sort, so it has no state space",
                               mod.span)])
    if len(hidden) > 1:
        raise SpecError([error("multiple-hidden-sorts",
                               f"module {name} declares hidden sorts "
                               f"{', '.join(s.name for s in hidden)}; an OTS has exactly one",
                               hidden[1].span or mod.span)])
    H = hidden[0].name

    parent = None
    extends = None
    for sup in hidden[0].supersorts:
        decl = scope.sort(sup)
        if decl.hidden and decl.module != name:
            extends = decl.module
            parent = _classify(ms, extends, cache)
            break

    def own_state(sort: str) -> bool:
        return scope.leq(sort, H) or scope.leq(H, sort)

    observers: list[ObserverSpec] = []
    transitions: list[TransitionSpec] = []
    projections: list[ProjectionSpec] = []
    initial: list[str] = []
    cond_ops: list[OperatorDecl] = []
    aux: list[OperatorDecl] = []

    def defining(op: OperatorDecl) -> tuple[Equation, ...]:
        return tuple(e for e in mod.equations if e.lhs.op == op)

    for op in mod.operators:
        if not op.behavioral:
            if not op.arity and op.coarity == H:
                initial.append(op.name)
            elif op.name.startswith("c-") and op.coarity == "Bool":
                cond_ops.append(op)
            else:
                aux.append(op)
            continue
        hidden_pos = [i for i, s in enumerate(op.arity) if scope.is_hidden(s)]
        if scope.is_hidden(op.coarity):
            state_pos = [i for i in hidden_pos if own_state(op.arity[i])]
            if not state_pos:
                diags.append(error("transition-without-state-argument",
                                   f"behavioral operator {op.name} yields a hidden sort but takes "
                                   f"no {H} argument", op.span))
                continue
            if len(hidden_pos) != 1:
                diags.append(error("invalid-behavioral-operator",
                                   f"{op.name} takes {len(hidden_pos)} hidden arguments; "
                                   f"expected exactly one", op.span))
                continue
            si = state_pos[0]
            params = op.arity[:si] + op.arity[si + 1:]
            if own_state(op.coarity):
                transitions.append(TransitionSpec(op.name, op, params, si))
            else:
                comp_sort = op.coarity
                projections.append(ProjectionSpec(
                    op.name, op, params, scope.sort(comp_sort).module, comp_sort, si,
                    equations=defining(op)))
        else:
            if len(hidden_pos) != 1 or not own_state(op.arity[hidden_pos[0]]):
                diags.append(error("invalid-behavioral-operator",
                                   f"observer {op.name} must take exactly one {H} argument",
                                   op.span))
                continue
            si = hidden_pos[0]
            observers.append(ObserverSpec(op.name, op, op.arity[:si] + op.arity[si + 1:],
                                          op.coarity, si, defining(op)))

    # effective conditions
    bound: dict[str, EffectiveCondition] = {}
    for cop in cond_ops:
        tname = cop.name[2:]
        cands = [t for t in transitions if t.name == tname]
        if not cands:
            diags.append(error("dangling-effective-condition",
                               f"{cop.name} names no transition {tname} of module {name}",
                               cop.span))
            continue
        match = [t for t in cands if t.op.arity == cop.arity]
        if not match:
            diags.append(error("effective-condition-signature",
                               f"{cop.name} : {' '.join(cop.arity)} must take the same "
                               f"arguments as {tname} : {' '.join(cands[0].op.arity)}",
                               cop.span))
            continue
        eqs = defining(cop)
        bound[match[0].op.key] = EffectiveCondition(cop.name, cop, eqs[0] if eqs else None)

    # equations describing each transition's effect: o(tau(...), ...) = ...
    observed_ops = {o.op for o in observers} | {p.op for p in projections}
    if parent is not None:
        observed_ops |= {o.op for o in parent.all_observers()}
    effect_eqs: dict[tuple, list[Equation]] = {}
    for eq in mod.equations:
        lhs = eq.lhs
        if lhs.op in observed_ops:
            for a in lhs.args:
                if isinstance(a, App) and a.op is not None and any(a.op == t.op for t in transitions):
                    effect_eqs.setdefault(a.op.key, []).append(eq)
    final_transitions = []
    for t in transitions:
        cond = bound.get(t.op.key)
        eqs = tuple(effect_eqs.get(t.op.key, ()))
        if cond is not None:
            for eq in eqs:
                if eq.condition is not None and not _mentions(eq.condition, cond.op):
                    diags.append(warning(
                        "unguarded-effect",
                        f"conditional equation for {t.name} is not guarded by {cond.name}: "
                        f"{format_equation(eq)}", eq.span))
        final_transitions.append(TransitionSpec(t.name, t.op, t.param_sorts, t.state_index,
                                                cond, eqs))

    components: dict[str, OtsModel] = {}
    for p in projections:
        if p.component_module not in components:
            components[p.component_module] = _classify(ms, p.component_module, cache)

    # absent values: nullary constants of a component sort that are not
    # initial states of the component and appear as projection results
    bound_names = {c.name for c in bound.values()}
    final_projections = []
    for p in projections:
        comp = components[p.component_module]
        absent = None
        for eq in p.equations:
            r = eq.rhs
            if isinstance(r, App) and not r.args and r.op.coarity == p.component_hidden_sort \
                    and r.name not in comp.initial_states:
                absent = r.name
                break
        final_projections.append(ProjectionSpec(
            p.name, p.op, p.id_sorts, p.component_module, p.component_hidden_sort,
            p.state_index, absent, p.equations))

    if any(d.is_error for d in diags):
        raise SpecError(diags)

    model = OtsModel(
        module_name=name,
        hidden_sort=H,
        observers=tuple(observers),
        initial_states=tuple(initial),
        transitions=tuple(final_transitions),
        projections=tuple(final_projections),
        extends_module=extends,
        auxiliary_ops=tuple(op.name for op in aux) + tuple(
            c.name for c in cond_ops if c.name not in bound_names),
        parent=parent,
        components=components,
        warnings=tuple(diags),
    )
    if final_projections:
        model = _with_effects(model, scope)
    cache[name] = model
    return model


def _mentions(term: Term, op: OperatorDecl) -> bool:
    return any(isinstance(t, App) and t.op == op for t in term.walk())


def _conjuncts(t: Term | None) -> list[Term]:
    if t is None:
        return []
    if isinstance(t, App) and t.op is not None and t.op.name == "_and_":
        return _conjuncts(t.args[0]) + _conjuncts(t.args[1])
    return [t]


def _with_effects(model: OtsModel, scope: Scope) -> OtsModel:
    effects = []
    for p in model.projections:
        for eq in p.equations:
            eff = _classify_projection_equation(model, p, eq)
            if eff is not None:
                effects.append(eff)
    return OtsModel(model.module_name, model.hidden_sort, model.observers,
                    model.initial_states, model.transitions, model.projections,
                    model.extends_module, model.auxiliary_ops, model.parent,
                    model.components, tuple(effects), model.warnings)


def _classify_projection_equation(model: OtsModel, p: ProjectionSpec,
                                  eq: Equation) -> ComponentEffect | None:
    lhs = eq.lhs
    state = lhs.args[p.state_index]
    trans = None
    if isinstance(state, App):
        for t in model.transitions:
            if state.op == t.op:
                trans = t
    if trans is None:
        return None
    comp = model.components[p.component_module]
    ids = [a for i, a in enumerate(lhs.args) if i != p.state_index]
    targs = [a for i, a in enumerate(state.args) if i != trans.state_index]
    pre_state = state.args[trans.state_index]

    binding: list[int | None] = [None] * len(ids)
    negated = False
    guards: list[Term] = []
    for atom in _conjuncts(eq.condition):
        handled = False
        if isinstance(atom, App) and atom.op.name in ("_==_", "_=/=_"):
            a, b = atom.args
            for x, y in ((a, b), (b, a)):
                if isinstance(x, Var) and x in ids and isinstance(y, Var) and y in targs:
                    if atom.op.name == "_==_":
                        binding[ids.index(x)] = targs.index(y)
                    else:
                        negated = True
                    handled = True
                    break
        if not handled:
            guards.append(atom)

    rhs = eq.rhs
    chain: list[str] = []
    comp_trans = {t.op: t for t in comp.all_transitions()}
    cur = rhs
    while isinstance(cur, App) and cur.op in comp_trans:
        t = comp_trans[cur.op]
        chain.append(t.name)
        cur = cur.args[t.state_index]
    depends = sorted({q.name for q in model.projections for s in rhs.walk()
                      if isinstance(s, App) and s.op == q.op and q.name != p.name})

    kind = UNMATCHED
    if isinstance(cur, App) and cur.op == p.op and cur.args[p.state_index] == pre_state:
        same_ids = [a for i, a in enumerate(cur.args) if i != p.state_index] == ids
        if not chain:
            kind = IDENTITY if same_ids else UNMATCHED
        else:
            kind = UPDATE
    elif isinstance(cur, App) and not cur.args and cur.op.coarity == p.component_hidden_sort:
        if cur.name in comp.initial_states:
            kind = CREATE
        elif not chain:
            kind = DELETE
    return ComponentEffect(trans.name, p.name, kind, eq, tuple(binding), negated,
                           tuple(guards), tuple(reversed(chain)), tuple(depends))


# ---------------------------------------------------------------------------
# composition checks

def _chain_base(term: Term, model: OtsModel) -> tuple[bool, bool]:
    """(is a chain rooted at a projection of a state variable, contains a transition)."""
    if not isinstance(term, App):
        return False, False
    for p in model.projections:
        if term.op == p.op:
            base = term.args[p.state_index]
            return isinstance(base, Var), False
    for comp in model.components.values():
        for o in comp.all_observers():
            if term.op == o.op:
                ok, tr = _chain_base(term.args[o.state_index], model)
                return ok, tr
        for t in comp.all_transitions():
            if term.op == t.op:
                ok, _ = _chain_base(term.args[t.state_index], model)
                return ok, True
    return False, False


def _observer_rhs_ok(term: Term, model: OtsModel) -> tuple[bool, int]:
    """Check an observer RHS is ``f(chains...)``; returns (ok, chains seen)."""
    if isinstance(term, Var):
        return not term.sort == model.hidden_sort, 0
    if not isinstance(term, App):
        return True, 0
    ok, _ = _chain_base(term, model)
    if ok:
        return True, 1
    if any(term.op == p.op for p in model.projections):
        return False, 0
    for comp in model.components.values():
        if any(term.op == o.op for o in comp.all_observers()) or \
                any(term.op == t.op for t in comp.all_transitions()):
            return False, 0
    total = 0
    for a in term.args:
        ok, n = _observer_rhs_ok(a, model)
        if not ok:
            return False, 0
        total += n
    return True, total


def check_composition(composite: OtsModel, components: list[OtsModel] | None,
                      module_set: ModuleSet) -> list[Diagnostic]:
    """Syntactic check of the three composition conditions.

    Returns diagnostics; never raises.  ``components`` defaults to the
    component models found during classification.
    """
    mod = module_set.module(composite.module_name)
    if not composite.projections:
        return [error("not-composite",
                      f"module {composite.module_name} has no projection operators, "
                      f"so it is not a composite object", mod.span)]
    diags: list[Diagnostic] = []
    given = {c.module_name for c in (components if components is not None
                                     else composite.components.values())}
    for p in composite.projections:
        if p.component_module not in given:
            diags.append(error("component-missing",
                               f"projection {p.name} targets module {p.component_module}, "
                               f"which is not among the components", p.op.span))
    if diags:
        return diags

    note = " (syntactic shape check only)"
    covered: set[int] = set()

    # condition 1: component state changes only through composite transitions
    for eff in composite.effects:
        covered.add(id(eff.equation))
        if eff.kind == UNMATCHED:
            diags.append(error(
                "composition-cond1",
                f"projection {eff.projection} of transition {eff.transition} has no matching "
                f"component transition, identity or absent value on the right: "
                f"{format_equation(eff.equation)}{note}", eff.equation.span))

    # condition 2: composite observers are projections composed with chains
    for o in composite.observers:
        if not o.equations:
            diags.append(warning("composition-cond2",
                                 f"composite observer {o.name} has no defining equation{note}",
                                 o.op.span))
        for eq in o.equations:
            covered.add(id(eq))
            state = eq.lhs.args[o.state_index]
            if not isinstance(state, Var):
                diags.append(warning(
                    "composition-unmatched",
                    f"observer equation is stated on a specific state rather than through "
                    f"projections: {format_equation(eq)}{note}", eq.span))
                continue
            ok, n = _observer_rhs_ok(eq.rhs, composite)
            if not ok or n == 0:
                diags.append(warning(
                    "composition-cond2",
                    f"composite observer {o.name} is not defined as projections composed "
                    f"with component chains: {format_equation(eq)}{note}", eq.span))

    # condition 3: initial states project to component constants
    for init in composite.initial_states:
        for p in composite.projections:
            comp = composite.components[p.component_module]
            eqs = [eq for eq in p.equations
                   if isinstance(eq.lhs.args[p.state_index], App)
                   and eq.lhs.args[p.state_index].name == init]
            if not eqs:
                diags.append(error("composition-cond3",
                                   f"initial state {init} has no equation for projection "
                                   f"{p.name}{note}", p.op.span))
            for eq in eqs:
                covered.add(id(eq))
                r = eq.rhs
                is_const = isinstance(r, App) and not r.args and \
                    r.op.coarity == p.component_hidden_sort and \
                    (r.name in comp.initial_states or r.name == p.absent_value)
                if not is_const:
                    diags.append(error(
                        "composition-cond3",
                        f"initial state {init} projects through {p.name} to {r}, which is "
                        f"neither a constant state of {p.component_module} nor the absent "
                        f"value{note}", eq.span))

    cond_eqs = {id(t.effective_condition.equation) for t in composite.transitions
                if t.effective_condition and t.effective_condition.equation}
    for p in composite.projections:
        for eq in p.equations:
            if id(eq) not in covered and id(eq) not in cond_eqs:
                diags.append(warning("composition-unmatched",
                                     f"projection equation matches none of the composition "
                                     f"shapes: {format_equation(eq)}{note}", eq.span))
    return diags


# ---------------------------------------------------------------------------
# method groups

@dataclass(frozen=True)
class MethodGroup:
    components: tuple[str, ...]  # projection names whose state the transitions change
    transitions: tuple[str, ...]
    synchronized: bool


def method_groups(composite: OtsModel) -> list[MethodGroup]:
    """Partition the composite's transitions by the components they change."""
    touched: dict[str, set[str]] = {t.name: set() for t in composite.transitions}
    dependent: set[str] = set()
    for eff in composite.effects:
        if eff.kind not in (IDENTITY,):
            touched[eff.transition].add(eff.projection)
        if eff.depends_on:
            dependent.add(eff.transition)
    groups: dict[tuple[str, ...], list[str]] = {}
    for t in composite.transitions:
        key = tuple(sorted(touched[t.name]))
        groups.setdefault(key, [])
        if t.name not in groups[key]:
            groups[key].append(t.name)
    out = []
    for key in sorted(groups):
        names = tuple(groups[key])
        sync = len(key) > 1 or any(n in dependent for n in names)
        out.append(MethodGroup(key, names, sync))
    return out


# ---------------------------------------------------------------------------
# JSON dump

def model_document(model: OtsModel) -> dict[str, Any]:
    def eqs(es):
        return [format_equation(e) for e in es]

    return {
        "schema": SCHEMA_VERSION,
        "module": model.module_name,
        "hiddenSort": model.hidden_sort,
        "extends": model.extends_module,
        "initialStates": list(model.initial_states),
        "observers": [
            {"name": o.name, "params": list(o.param_sorts), "result": o.result_sort,
             "equations": eqs(o.equations)} for o in model.observers],
        "transitions": [
            {"name": t.name, "params": list(t.param_sorts),
             "effectiveCondition": None if t.effective_condition is None else {
                 "name": t.effective_condition.name,
                 "equation": (format_equation(t.effective_condition.equation)
                              if t.effective_condition.equation else None)},
             "equations": eqs(t.equations)} for t in model.transitions],
        "projections": [
            {"name": p.name, "idSorts": list(p.id_sorts), "componentModule": p.component_module,
             "componentHiddenSort": p.component_hidden_sort, "absentValue": p.absent_value,
             "equations": eqs(p.equations)} for p in model.projections],
        "auxiliaryOps": list(model.auxiliary_ops),
    }


def dump_model(model: OtsModel) -> str:
    """Deterministic, schema-versioned JSON rendering of a classified model."""
    return json.dumps(model_document(model), indent=2) + "\n"
