import json

import pytest

from otscontract import parse_spec
from otscontract.analyzer import (CREATE, DELETE, IDENTITY, UPDATE, check_composition, classify,
                                  dump_model, method_groups)
from otscontract.diagnostics import SpecError

from conftest import ACCOUNT, GOLDEN, fixture


def _ms(src: str, *deps):
    return parse_spec(list(deps) + ["inline.cafe"], texts={"inline.cafe": src})


def test_account_model(account_ms):
    m = classify(account_ms, "ACCOUNT")
    assert m.hidden_sort == "Account"
    assert [(o.name, o.param_sorts, o.result_sort) for o in m.observers] == [("read", (), "Int")]
    assert m.initial_states == ("init",)
    (add,) = m.transitions
    assert add.name == "add" and add.param_sorts == ("Int",)
    assert add.effective_condition.name == "c-add"
    assert add.effective_condition.op.arity == ("Account", "Int")
    assert add.effective_condition.op.coarity == "Bool"
    assert not m.is_composite


def test_account_system_model(corpus_ms):
    m = classify(corpus_ms, "ACCOUNT-SYSTEM")
    assert [t.name for t in m.transitions] == ["add", "del", "deposit", "withdraw"]
    assert all(t.effective_condition is None for t in m.transitions)
    (p,) = m.projections
    assert (p.name, p.id_sorts, p.component_module) == ("account", ("UId",), "ACCOUNT")
    assert p.absent_value == "no-account"
    assert [(o.name, o.param_sorts, o.result_sort) for o in m.observers] == \
        [("balance", ("UId",), "Nat")]


def test_partition_of_behavioral_operators(extra_ms):
    for name in extra_ms.names():
        m = classify(extra_ms, name)
        bops = sorted(op.name for op in extra_ms.module(name).operators if op.behavioral)
        assert sorted(m.behavioral_names()) == bops
        assert len(set(m.behavioral_names())) == len(bops)


def test_classify_is_deterministic(corpus_ms):
    for name in corpus_ms.names():
        assert dump_model(classify(corpus_ms, name)) == dump_model(classify(corpus_ms, name))


def test_degenerate_ots():
    m = classify(_ms("mod* E { *[ S ]* op s0 : -> S }"), "E")
    assert (m.observers, m.transitions, m.initial_states) == ((), (), ("s0",))
    doc = json.loads(dump_model(m))
    assert doc["observers"] == doc["transitions"] == doc["projections"] == []


@pytest.mark.parametrize("src, code", [
    ("mod! P { pr(INT) [ S ] op s : -> S }", "no-hidden-sort"),
    ("mod* M { *[ A ]* *[ B ]* op a : -> A }", "multiple-hidden-sorts"),
    ("mod* D { pr(INT) *[ S ]* op s0 : -> S bop v : S -> Int op c-go : S -> Bool }",
     "dangling-effective-condition"),
    ("mod* G { pr(INT) *[ S ]* op s0 : -> S bop go : S Int -> S op c-go : S -> Bool }",
     "effective-condition-signature"),
])
def test_classify_errors(src, code):
    with pytest.raises(SpecError) as exc:
        classify(_ms(src), _ms(src).names()[-1])
    assert exc.value.codes == [code]


def test_transition_without_state_argument():
    src = "mod* W { pr(ACCOUNT) *[ S ]* op s0 : -> S bop wrap : Account -> S }"
    with pytest.raises(SpecError) as exc:
        classify(_ms(src, ACCOUNT), "W")
    assert exc.value.codes == ["transition-without-state-argument"]


def test_unknown_module(account_ms):
    with pytest.raises(SpecError) as exc:
        classify(account_ms, "NOPE")
    assert exc.value.codes == ["unknown-module"]


def test_unguarded_effect_warns():
    src = """mod* U { pr(INT) *[ S ]* op s0 : -> S bop v : S -> Int bop go : S Int -> S
               op c-go : S Int -> Bool var X : Int var A : S
               eq c-go(A, X) = X > 0 . eq v(s0) = 0 .
               ceq v(go(A, X)) = X if X > 1 . }"""
    m = classify(_ms(src), "U")
    assert [w.code for w in m.warnings] == ["unguarded-effect"]


def test_inheritance_edge(extra_ms):
    m = classify(extra_ms, "SAVINGS-ACCOUNT")
    assert m.extends_module == "ACCOUNT"
    assert [o.name for o in m.all_observers()] == ["rate", "read"]
    assert classify(extra_ms, "ACCOUNT").extends_module is None


# -- composition ---------------------------------------------------------------

def test_account_system_effects(corpus_ms):
    m = classify(corpus_ms, "ACCOUNT-SYSTEM")
    kinds = {(e.transition, e.negated): e.kind for e in m.effects}
    assert kinds == {
        ("add", False): CREATE, ("add", True): IDENTITY,
        ("del", False): DELETE, ("del", True): IDENTITY,
        ("deposit", False): UPDATE, ("deposit", True): IDENTITY,
        ("withdraw", False): UPDATE, ("withdraw", True): IDENTITY,
    }
    dep = next(e for e in m.effects_of("deposit") if e.kind == UPDATE)
    assert dep.component_transitions == ("add",)
    assert dep.id_binding == (0,)


def test_account_system_composes_cleanly(corpus_ms):
    m = classify(corpus_ms, "ACCOUNT-SYSTEM")
    assert check_composition(m, [classify(corpus_ms, "ACCOUNT")], corpus_ms) == []


@pytest.mark.parametrize("name, code, severity", [
    ("cond1.cafe", "composition-cond1", "error"),
    ("cond2.cafe", "composition-cond2", "warning"),
    ("cond3.cafe", "composition-cond3", "error"),
])
def test_negative_composition_fixtures(name, code, severity):
    ms = parse_spec([ACCOUNT, fixture(name)])
    m = classify(ms, ms.names()[-1])
    diags = check_composition(m, None, ms)
    assert [(d.code, d.severity) for d in diags] == [(code, severity)]
    assert "syntactic" in diags[0].message


def test_composition_requires_projections(account_ms):
    diags = check_composition(classify(account_ms, "ACCOUNT"), [], account_ms)
    assert [d.code for d in diags] == ["not-composite"]


def test_composition_requires_component_models(corpus_ms):
    m = classify(corpus_ms, "ACCOUNT-SYSTEM")
    assert [d.code for d in check_composition(m, [], corpus_ms)] == ["component-missing"]


def test_method_groups_single_component(corpus_ms):
    (g,) = method_groups(classify(corpus_ms, "ACCOUNT-SYSTEM"))
    assert g.components == ("account",)
    assert g.transitions == ("add", "del", "deposit", "withdraw")
    assert not g.synchronized


def test_method_groups_independent_components():
    ms = parse_spec([ACCOUNT, fixture("components.cafe"), fixture("two_components.cafe")])
    m = classify(ms, "WALLET")
    assert check_composition(m, None, ms) == []
    groups = method_groups(m)
    assert [(g.components, g.transitions) for g in groups] == \
        [(("purse",), ("fund",)), (("tally",), ("tick",))]
    assert not any(g.synchronized for g in groups)


def test_method_groups_synchronized(extra_ms):
    (g,) = method_groups(classify(extra_ms, "AUDITED-BANK"))
    assert g.components == ("account", "log") and g.synchronized


def test_method_groups_empty():
    src = """mod* HOLDER { pr(ACCOUNT) [ K ] *[ H ]* op h0 : -> H op none : -> Account
               bop slot : K H -> Account var K : K eq slot(K, h0) = none . }"""
    m = classify(_ms(src, ACCOUNT), "HOLDER")
    assert m.is_composite and method_groups(m) == []


# -- dump ------------------------------------------------------------------------

@pytest.mark.parametrize("module, golden", [
    ("ACCOUNT", "account.model.json"),
    ("ACCOUNT-SYSTEM", "account_sys.model.json"),
])
def test_dump_matches_golden(corpus_ms, module, golden):
    assert dump_model(classify(corpus_ms, module)) == (GOLDEN / golden).read_text()


def test_dump_composite_names_component(corpus_ms):
    doc = json.loads(dump_model(classify(corpus_ms, "ACCOUNT-SYSTEM")))
    assert doc["schema"] == "otscontract.model/1"
    assert doc["projections"][0]["componentModule"] == "ACCOUNT"
    assert list(doc) == ["schema", "module", "hiddenSort", "extends", "initialStates",
                         "observers", "transitions", "projections", "auxiliaryOps"]
