import pytest

from otscontract.diagnostics import SpecError
from otscontract.lexer import tokenize


def kinds(text):
    return [(t.kind, t.text) for t in tokenize(text)]


def test_module_header_and_hidden_sort():
    assert kinds("mod* A { *[ S ]* }") == [
        ("keyword", "mod*"), ("ident", "A"), ("lbrace", "{"), ("hidden_open", "*["),
        ("ident", "S"), ("hidden_close", "]*"), ("rbrace", "}")]


def test_comment_runs_to_end_of_line():
    toks = tokenize("op f : -> S -- an initial state\nop g : -> S")
    assert [t.text for t in toks if t.kind == "ident"] == ["f", "S", "g", "S"]


def test_primes_and_hyphens_belong_to_identifiers():
    assert kinds("U' c-add init-account-sys") == [
        ("ident", "U'"), ("ident", "c-add"), ("ident", "init-account-sys")]


def test_arrow_and_symbols():
    assert [t.kind for t in tokenize("-> >= =/= -")] == ["arrow", "symbol", "symbol", "symbol"]


def test_terminating_dot_needs_whitespace():
    assert kinds("eq a = b .")[-1] == ("dot", ".")
    with pytest.raises(SpecError) as exc:
        tokenize("eq a = b.")
    assert exc.value.codes == ["lexical-error"]


def test_illegal_character_is_reported_with_position():
    with pytest.raises(SpecError) as exc:
        tokenize("mod* A {\n  op f : -> S ;\n}")
    d = exc.value.diagnostics[0]
    assert d.code == "lexical-error"
    assert (d.span.start_line, d.span.start_col) == (2, 15)


def test_spans_track_lines_and_columns():
    toks = tokenize("mod* A\n  { }", file="x.cafe")
    assert str(toks[2].span) == "x.cafe:2:3"
