import re

from otscontract.diagnostics import CODES, NO_SPAN, SourceSpan, error, has_errors, warning

from conftest import ROOT


def test_every_code_is_documented():
    text = (ROOT / "docs" / "diagnostics.md").read_text()
    assert set(re.findall(r"\| `([a-z0-9-]+)` \|", text)) == set(CODES)


def test_render_format():
    span = SourceSpan("a.cafe", 3, 5, 3, 9)
    assert error("syntax-error", "boom", span).render() == "a.cafe:3:5: error: syntax-error: boom"
    assert str(NO_SPAN) == "<builtin>:1:1"
    assert not has_errors([warning("composition-cond2", "w")])
    assert has_errors([warning("composition-cond2", "w"), error("io-error", "e")])
