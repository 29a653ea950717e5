import pytest

from otscontract import parse_spec
from otscontract.diagnostics import SpecError
from otscontract.modules import resolve_sort, sort_of
from otscontract.parser import parse_term

from conftest import ACCOUNT, fixture


def test_module_order_and_names(corpus_ms):
    assert corpus_ms.names() == ["ACCOUNT", "ACCOUNT-SYSTEM"]
    assert [m.name for m in corpus_ms] == corpus_ms.names()


def test_resolve_sort_finds_hidden_sort(corpus_ms):
    decl = resolve_sort(corpus_ms, "Account")
    assert decl.hidden and decl.module == "ACCOUNT"
    assert resolve_sort(corpus_ms, "UId", "ACCOUNT-SYSTEM").module == "ACCOUNT-SYSTEM"


def test_resolve_sort_respects_visibility(corpus_ms):
    with pytest.raises(SpecError) as exc:
        resolve_sort(corpus_ms, "UId", "ACCOUNT")
    assert exc.value.codes == ["unknown-sort"]


def test_builtin_ordering(account_ms):
    scope = account_ms.scope()
    assert scope.leq("Nat", "Int")
    assert not scope.leq("Int", "Nat")
    assert scope.connected("Nat", "Int")
    assert not scope.connected("Int", "Bool")


@pytest.mark.parametrize("text, sort", [
    ("read(init)", "Int"),
    ("add(init, 3)", "Account"),
    ("c-add(init, -1)", "Bool"),
    ("read(init) + 1 >= 0", "Bool"),
])
def test_sort_of(account_ms, text, sort):
    assert sort_of(parse_term(text), account_ms) == sort


def test_least_sort_of_literals(account_ms):
    assert sort_of(parse_term("3"), account_ms) == "Nat"
    assert sort_of(parse_term("-3"), account_ms) == "Int"


def test_ill_sorted_term_reports_position(account_ms):
    with pytest.raises(SpecError) as exc:
        sort_of(parse_term("add(init, true)"), account_ms)
    assert exc.value.codes == ["ill-sorted-term"]
    assert "position" in str(exc.value)


def test_unknown_operator(account_ms):
    with pytest.raises(SpecError) as exc:
        sort_of(parse_term("withdraw(init, 1)"), account_ms)
    assert exc.value.codes == ["unknown-operator"]


def test_unknown_sort_fixture():
    with pytest.raises(SpecError) as exc:
        parse_spec([fixture("unknown_sort.cafe")])
    assert exc.value.codes == ["unknown-sort"]


def test_equation_rhs_variables_must_occur_on_left():
    src = """mod* BAD { pr(INT) *[ S ]* op s0 : -> S bop v : S -> Int
               var X : Int var Y : S eq v(Y) = X . }"""
    with pytest.raises(SpecError) as exc:
        parse_spec(["bad.cafe"], texts={"bad.cafe": src})
    assert exc.value.codes == ["non-executable-equation"]


def test_equation_sides_must_be_related():
    src = """mod* BAD { pr(INT) *[ S ]* op s0 : -> S bop v : S -> Int
               eq v(s0) = true . }"""
    with pytest.raises(SpecError) as exc:
        parse_spec(["bad.cafe"], texts={"bad.cafe": src})
    assert exc.value.codes == ["ill-sorted-equation"]


def test_equations_are_checked_terms(account_ms):
    for eq in account_ms.equations:
        assert all(t.op is not None for t in eq.lhs.walk() if hasattr(t, "op"))


def test_parse_is_deterministic():
    a, b = parse_spec([ACCOUNT]), parse_spec([ACCOUNT])
    assert [str(e) for e in a.equations] == [str(e) for e in b.equations]
