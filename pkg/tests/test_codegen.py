import json

import pytest

from otscontract import parse_spec
from otscontract.analyzer import classify
from otscontract.codegen import (ContractClass, ContractMethod, NameTable, TranslationOptions,
                                 default_sort_mapping, emit_java_jml, emit_json, normalize_jml,
                                 output_filename, render_expr, translate_all,
                                 translate_composite, translate_inheritance, translate_single)
from otscontract.codegen.mapping import TypeInfo, lower_camel, upper_camel
from otscontract.codegen.model import (BinOp, Call, ContractCase, ContractClause, Forall, Ghost,
                                       IntConst, Name, Neg, Not, Null, Result, This, conj,
                                       implies, negate)
from otscontract.codegen.purity import check_side_effects
from otscontract.diagnostics import SpecError

from conftest import ACCOUNT, ACCOUNT_SYS, GOLDEN, fixture


def _ms(src: str, *deps):
    return parse_spec([ACCOUNT, *deps, "inline.cafe"], texts={"inline.cafe": src})


@pytest.fixture(scope="module")
def corpus_classes(corpus_ms, corpus_options):
    return {c.module: c for c in translate_all(corpus_ms, corpus_options)}


@pytest.fixture(scope="module")
def extra_classes(extra_ms):
    return {c.module: c for c in translate_all(extra_ms, TranslationOptions(names=NameTable()))}


# -- goldens ---------------------------------------------------------------------

@pytest.mark.parametrize("module, golden", [
    ("ACCOUNT", "Account.java"),
    ("ACCOUNT-SYSTEM", "AccountSystem.java"),
])
def test_golden_bytes(corpus_classes, module, golden):
    assert emit_java_jml(corpus_classes[module]) == (GOLDEN / golden).read_text()


def test_golden_normalized(corpus_classes):
    text = emit_java_jml(corpus_classes["ACCOUNT"])
    assert normalize_jml(text) == normalize_jml((GOLDEN / "Account.java").read_text())


def test_account_contract_elements(corpus_classes):
    text = normalize_jml(emit_java_jml(corpus_classes["ACCOUNT"]))
    for piece in ["public ghost Account temp;",
                  "ensures balance() == 0;",
                  "requires this.balance() + x >= 0;",
                  "requires this.balance() + x < 0;",
                  "assignable \\nothing;",
                  "ensures (this.balance() == another.balance()) ==> (\\result == true);",
                  "requires another != null;",
                  "set temp = new Account(this);",
                  "also"]:
        assert piece in text, piece


def test_account_method_shapes(corpus_classes):
    cls = corpus_classes["ACCOUNT"]
    assert [(m.name, m.role) for m in cls.methods] == [
        ("balance", "observer"), ("Account", "constructor"), ("equals", "equals"),
        ("Account", "copy"), ("add", "transition")]
    add = cls.method("add")
    assert add.params == (("x", "int"),) and add.return_type == "Account"
    assert len(add.cases) == 2 and add.cases[1].assignable == "\\nothing"
    assert cls.ghost_fields == (("temp", "Account"),)


def test_account_system_contract_elements(corpus_classes):
    text = normalize_jml(emit_java_jml(corpus_classes["ACCOUNT-SYSTEM"]))
    for piece in [
        "public /*@ pure @*/ Account getAcc(int i)",
        "(\\forall int j; ((getAcc(i) != null) && (i != j)) ==> (getAcc(i) != getAcc(j)))",
        "requires this.getAcc(id) != null; ensures \\result == this.getAcc(id).balance();",
        "\\result.getAcc(id).equals(temp.getAcc(id).add(n))",
        "\\result.getAcc(id).equals(temp.getAcc(id).add(-n))",
        "requires (this.getAcc(id) == null) && (n >= 0);",
        "ensures (\\result.getAcc(id) == null) && (\\result == this);",
        "(\\forall int i; this.getAcc(i) == null)",
    ]:
        assert normalize_jml(piece) in text, piece


def test_composite_method_names(corpus_classes):
    cls = corpus_classes["ACCOUNT-SYSTEM"]
    assert cls.name == "AccountSystem"
    assert [m.name for m in cls.methods_by_role("transition")] == \
        ["add", "del", "deposit", "withdraw"]
    assert cls.method("getAcc").pure and cls.method("getBalance").pure


# -- translation rules on fixtures ------------------------------------------------

def test_no_transitions_means_no_ghost(extra_classes):
    flag = extra_classes["FLAG"]
    assert flag.ghost_fields == ()
    assert not flag.methods_by_role("transition")
    assert [m.name for m in flag.methods_by_role("factory")] == ["down"]
    assert flag.method("down").static


def test_two_parameter_observer(extra_classes):
    grid = extra_classes["GRID"]
    assert grid.method("cell").params == (("x1", "int"), ("x2", "int"))
    eq = render_expr(grid.method("equals").cases[0].ensures[0].expression)
    assert eq.startswith("(\\forall int d1, int d2; this.cell(d1, d2) == another.cell(d1, d2))")


def test_inheritance(extra_classes):
    sav = extra_classes["SAVINGS-ACCOUNT"]
    assert sav.extends_name == "Account"
    assert [m.name for m in sav.methods_by_role("observer")] == ["rate"]
    assert "add" not in [m.name for m in sav.methods]
    assert extra_classes["ACCOUNT"].extends_name is None


def test_child_redeclaring_observer():
    ms = _ms("""mod* GOLD { pr(ACCOUNT) *[ Gold < Account ]* op g0 : -> Gold
                 bop read : Gold -> Int eq read(g0) = 100 . }""")
    gold = {c.module: c for c in translate_all(ms)}["GOLD"]
    assert gold.extends_name == "Account"
    assert [m.name for m in gold.methods_by_role("observer")] == ["read"]
    assert "ensures read() == 100;" in emit_java_jml(gold)


def test_synchronized_composite(extra_classes):
    text = emit_java_jml(extra_classes["AUDITED-BANK"])
    assert "\\result.getAccount(id).equals(temp.getAccount(id).add(x))" in text
    assert "\\result.getLog(id).equals(temp.getLog(id).inc())" in text
    assert "requires this.getLog(id) != null;" in text


def test_minimal_composite():
    ms = _ms("""mod* HOLD { pr(ACCOUNT) [ K ] *[ H ]* op h0 : -> H op none : -> Account
                 bop add : K H -> H bop del : K H -> H bop slot : K H -> Account
                 vars K K2 : K var B : H
                 eq slot(K, h0) = none .
                 ceq slot(K, add(K2, B)) = init if K == K2 .
                 ceq slot(K, add(K2, B)) = slot(K, B) if K =/= K2 .
                 ceq slot(K, del(K2, B)) = none if K == K2 .
                 ceq slot(K, del(K2, B)) = slot(K, B) if K =/= K2 . }""")
    hold = translate_all(ms, modules=["HOLD"])[0]
    assert [m.role for m in hold.methods] == \
        ["getter", "constructor", "equals", "copy", "transition", "transition"]
    text = emit_java_jml(hold)
    assert "\\result.getSlot(id).equals(new Account())" in text
    assert "ensures (\\result.getSlot(id) == null) && (\\result == this);" in text


def test_every_clause_uses_declared_names(corpus_classes, extra_classes):
    for group in (corpus_classes, extra_classes):
        for cls in group.values():
            known = [c for c in group.values() if c is not cls]
            assert check_side_effects(cls, known) == []


def test_ghost_iff_transitions(extra_classes, corpus_classes):
    for cls in [*extra_classes.values(), *corpus_classes.values()]:
        has_transitions = bool(cls.methods_by_role("transition"))
        assert (cls.ghost_fields == (("temp", cls.name),)) == has_transitions


# -- errors ---------------------------------------------------------------------------

def test_unmapped_sort():
    ms = _ms("""mod* C { [ Color ] op red : -> Color *[ S ]* op s0 : -> S
                 bop painted : S -> Bool bop paint : S Color -> S var A : S var K : Color
                 eq painted(s0) = false . eq painted(paint(A, K)) = true . }""")
    with pytest.raises(SpecError) as exc:
        translate_all(ms)
    assert exc.value.codes == ["unmapped-sort"]
    mapping = default_sort_mapping().with_overrides({"Color": TypeInfo("String", "null", "c")})
    cls = translate_all(ms, TranslationOptions(mapping=mapping), modules=["C"])[0]
    assert cls.method("paint").params == (("c", "String"),)


def test_untranslatable_observer_equation():
    ms = _ms("""mod* T { pr(INT) *[ S ]* op s0 : -> S op twice : Int -> Int
                 bop v : S -> Int bop put : S Int -> S var A : S var X : Int
                 eq twice(X) = X + X . eq v(s0) = 0 . eq v(put(A, X)) = twice(X) . }""")
    with pytest.raises(SpecError) as exc:
        translate_all(ms)
    assert exc.value.codes == ["observer-equation-not-translatable"]


def test_component_class_missing(corpus_ms):
    model = classify(corpus_ms, "ACCOUNT-SYSTEM")
    with pytest.raises(SpecError) as exc:
        translate_composite(model, [], corpus_ms)
    assert exc.value.codes == ["component-class-missing"]


def test_parent_not_translated(extra_ms):
    with pytest.raises(SpecError) as exc:
        translate_inheritance(classify(extra_ms, "SAVINGS-ACCOUNT"), None, extra_ms)
    assert exc.value.codes == ["parent-not-translated"]


def test_translate_single_rejects_composite(corpus_ms):
    with pytest.raises(ValueError):
        translate_single(classify(corpus_ms, "ACCOUNT-SYSTEM"), corpus_ms)


def test_composition_errors_block_translation():
    ms = parse_spec([ACCOUNT, fixture("cond1.cafe")])
    with pytest.raises(SpecError) as exc:
        translate_all(ms)
    assert exc.value.codes == ["composition-cond1"]


def test_purity_checker_flags_live_mutation():
    bad = ContractMethod("m", (), "boolean", cases=(ContractCase(ensures=(
        ContractClause("ensures", Call(This(), "add", (IntConst(1),))),
        ContractClause("ensures", BinOp("==", Name("ghostly"), Ghost("pre"))),)),))
    cls = ContractClass("K", methods=(bad,))
    codes = [d.code for d in check_side_effects(cls)]
    assert codes == ["contract-not-side-effect-free"] * 3


# -- model invariants ---------------------------------------------------------------

def test_model_invariants():
    with pytest.raises(ValueError):
        ContractMethod("K", (), "K", is_constructor=True)
    with pytest.raises(ValueError):
        ContractMethod("q", (), "int", pure=True, cases=(ContractCase(assignable="\\nothing"),))
    with pytest.raises(ValueError):
        ContractClause("ensures")
    with pytest.raises(ValueError):
        BinOp("%", IntConst(1), IntConst(2))
    m = ContractMethod("f", (("x", "int"),), "int")
    with pytest.raises(ValueError):
        ContractClass("K", methods=(m, m))


def test_empty_class():
    assert emit_java_jml(ContractClass("Empty")) == "public class Empty {\n}\n"


# -- rendering -------------------------------------------------------------------------

@pytest.mark.parametrize("expr, text", [
    (BinOp("+", Call(This(), "read"), Name("x")), "this.read() + x"),
    (BinOp("-", Name("a"), BinOp("-", Name("b"), Name("c"))), "a - (b - c)"),
    (BinOp("*", BinOp("+", Name("a"), Name("b")), Name("c")), "(a + b) * c"),
    (conj([BinOp("==", Name("a"), Null()), BinOp(">=", Name("n"), IntConst(0))]),
     "(a == null) && (n >= 0)"),
    (implies(BinOp("==", Name("a"), Name("b")), BinOp("==", Result(), Name("t"))),
     "(a == b) ==> (\\result == t)"),
    (Not(BinOp("==", Name("a"), Name("b"))), "!(a == b)"),
    (Neg(IntConst(3)), "-(3)"),
    (Neg(Name("n")), "-n"),
    (Forall((("int", "i"),), BinOp("==", Call(This(), "g", (Name("i"),)), Null())),
     "(\\forall int i; this.g(i) == null)"),
    (Call(BinOp("+", Name("a"), Name("b")), "m"), "(a + b).m()"),
])
def test_render_expr(expr, text):
    assert render_expr(expr) == text


def test_negate_flips_comparisons():
    assert negate(BinOp(">=", Name("a"), IntConst(0))) == BinOp("<", Name("a"), IntConst(0))
    assert negate(Not(Name("b"))) == Name("b")
    assert negate(Call(This(), "ok")) == Not(Call(This(), "ok"))


def test_naming_helpers():
    assert upper_camel("ACCOUNT-SYSTEM") == "AccountSystem"
    assert lower_camel("set-rate") == "setRate"
    names = NameTable({"ACCOUNT.read": "balance"})
    assert names.method("ACCOUNT", "read") == "balance"
    assert names.getter("ACCOUNT-SYSTEM", "account") == "getAccount"


def test_default_sort_mapping(corpus_ms):
    m = default_sort_mapping()
    scope = corpus_ms.scope()
    assert m.lookup("Int").type == "int"
    assert m.lookup("Bool").type == "boolean"
    assert m.lookup("Nat").non_negative
    assert m.lookup("UId", scope).type == "int"
    with pytest.raises(SpecError):
        m.lookup("UId")


# -- JSON and determinism ---------------------------------------------------------------

def test_json_rendering(corpus_classes):
    doc = json.loads(emit_json(corpus_classes["ACCOUNT"]))
    assert doc["schema"] == "otscontract.class/1"
    add = next(m for m in doc["methods"] if m["name"] == "add")
    assert add["cases"][1]["assignable"] == "\\nothing"
    assert add["bodyPreamble"][0]["kind"] == "set-ghost"
    assert output_filename(corpus_classes["ACCOUNT"], "json") == "Account.json"
    assert output_filename(corpus_classes["ACCOUNT"]) == "Account.java"


def test_translation_is_deterministic(corpus_ms, corpus_options):
    first = [emit_java_jml(c) for c in translate_all(corpus_ms, corpus_options)]
    fresh = parse_spec([ACCOUNT, ACCOUNT_SYS])
    again = [emit_java_jml(c) for c in translate_all(fresh, corpus_options)]
    assert first == again


def test_emission_is_stable(corpus_classes):
    for cls in corpus_classes.values():
        text = emit_java_jml(cls)
        assert text == emit_java_jml(cls)
        assert "\r" not in text and "\t" not in text and text.endswith("}\n")
