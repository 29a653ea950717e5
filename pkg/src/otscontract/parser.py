"""Recursive-descent parser producing unchecked :class:`SpecModule` values.

Terms come out *raw*: applications carry an operator name but no resolved
declaration.  :func:`parse_spec` runs import resolution and sort checking
(see :mod:`otscontract.modules`) to produce checked modules.

Grammar (EBNF, see docs/grammar.md)::

    spec     ::= module*
    module   ::= ("mod*" | "mod!") NAME "{" item* "}"
    item     ::= "pr" "(" NAME ")" | sorts | opdecl | vardecl | equation
    sorts    ::= "[" sortlist "]" | "*[" sortlist "]*"
    sortlist ::= NAME+ ("<" NAME+)*
    opdecl   ::= ("op" | "bop") opname ":" NAME* "->" NAME
               | ("ops" | "bops") opname+ ":" NAME* "->" NAME
    vardecl  ::= "var" NAME ":" NAME | "vars" NAME+ ":" NAME
    equation ::= "eq" label? term "=" term "."
               | "ceq" label? term "=" term "if" term "."
    label    ::= "[" NAME "]" ":"
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Iterable, Sequence

from .diagnostics import Diagnostic, SourceSpan, SpecError, error
from .lexer import Token, tokenize
from .spec_ast import (
    HIDDEN, INFIX_PRECEDENCE, NOT_PRECEDENCE, UNARY_MINUS_PRECEDENCE,
    USER_INFIX_PRECEDENCE, VISIBLE, App, Equation, Lit, OperatorDecl, SortDecl,
    SpecModule, Term, Var, int_lit,
)

WORD_INFIX = {"and", "or"}


class _Parser:
    def __init__(self, tokens: Sequence[Token], file: str = "<string>"):
        self.toks = list(tokens)
        self.pos = 0
        self.file = tokens[0].span.file if tokens else file
        self.vars: dict[str, str] = {}

    # -- token helpers -----------------------------------------------------
    def peek(self, offset: int = 0) -> Token | None:
        i = self.pos + offset
        return self.toks[i] if i < len(self.toks) else None

    def eof_span(self) -> SourceSpan:
        if self.toks:
            s = self.toks[-1].span
            return SourceSpan(s.file, s.end_line, s.end_col, s.end_line, s.end_col)
        return SourceSpan(self.file, 1, 1, 1, 1)

    def fail(self, expected: Iterable[str], code: str = "syntax-error"):
        tok = self.peek()
        found = f"{tok.text!r}" if tok else "end of input"
        exp = ", ".join(sorted(set(expected)))
        raise SpecError([error(code, f"expected one of {{{exp}}}, found {found}",
                               tok.span if tok else self.eof_span())])

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == kind and (text is None or tok.text == text)

    def expect(self, kind: str, text: str | None = None) -> Token:
        if not self.at(kind, text):
            self.fail([text or kind])
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def take(self) -> Token:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    # -- modules -------------------------------------------------------------
    def modules(self) -> list[SpecModule]:
        out = []
        while self.peek() is not None:
            out.append(self.module())
        return out

    def module(self) -> SpecModule:
        if not (self.at("keyword", "mod*") or self.at("keyword", "mod!")):
            self.fail(["mod*", "mod!"])
        head = self.take()
        name = self.expect("ident").text
        self.expect("lbrace")
        self.vars = {}
        imports: list[str] = []
        import_spans: list[SourceSpan] = []
        sorts: list[SortDecl] = []
        ops: list[OperatorDecl] = []
        variables: list[tuple[str, str]] = []
        equations: list[Equation] = []
        item_starts = ["pr", "op", "ops", "bop", "bops", "var", "vars", "eq", "ceq",
                       "[", "*[", "}"]
        while True:
            tok = self.peek()
            if tok is None:
                raise SpecError([error("unterminated-module",
                                       f"module {name} is missing its closing '}}'",
                                       head.span.to(self.eof_span()))])
            if tok.kind == "rbrace":
                end = self.take()
                break
            if tok.kind == "keyword" and tok.text == "pr":
                self.take()
                self.expect("lparen")
                imp = self.expect("ident")
                self.expect("rparen")
                imports.append(imp.text)
                import_spans.append(imp.span)
            elif tok.kind in ("lbracket", "hidden_open"):
                sorts.extend(self.sort_block(name))
            elif tok.kind == "keyword" and tok.text in ("op", "ops", "bop", "bops"):
                ops.extend(self.op_decl(name))
            elif tok.kind == "keyword" and tok.text in ("var", "vars"):
                for vname, vsort in self.var_decl():
                    variables.append((vname, vsort))
                    self.vars[vname] = vsort
            elif tok.kind == "keyword" and tok.text in ("eq", "ceq"):
                equations.append(self.equation())
            else:
                self.fail(item_starts)
        return SpecModule(
            name=name,
            semantics="loose" if head.text == "mod*" else "tight",
            imports=tuple(imports),
            sorts=tuple(sorts),
            operators=tuple(ops),
            variables=tuple(variables),
            equations=tuple(equations),
            span=head.span.to(end.span),
            import_spans=tuple(import_spans),
        )

    def sort_block(self, module: str) -> list[SortDecl]:
        opener = self.take()
        hidden = opener.kind == "hidden_open"
        closer = "hidden_close" if hidden else "rbracket"
        groups: list[list[Token]] = [[]]
        while not self.at(closer):
            if self.at("symbol", "<"):
                self.take()
                groups.append([])
            elif self.at("ident"):
                groups[-1].append(self.take())
            else:
                self.fail(["sort name", "<", "]*" if hidden else "]"])
        self.take()
        if any(not g for g in groups):
            self.fail(["sort name"])
        kind = HIDDEN if hidden else VISIBLE
        declared = groups if len(groups) == 1 else groups[:-1]
        out = []
        for gi, group in enumerate(declared):
            supers = tuple(t.text for t in groups[gi + 1]) if gi + 1 < len(groups) else ()
            for t in group:
                out.append(SortDecl(t.text, kind, supers, module, t.span))
        return out

    def op_decl(self, module: str) -> list[OperatorDecl]:
        kw = self.take()
        behavioral = kw.text.startswith("b")
        plural = kw.text.endswith("s")
        names: list[Token] = []
        while self.at("ident") or self.at("mixfix"):
            names.append(self.take())
            if not plural:
                break
        if not names:
            self.fail(["operator name"])
        self.expect("colon")
        arity = []
        while self.at("ident"):
            arity.append(self.take().text)
        self.expect("arrow")
        coarity = self.expect("ident")
        return [OperatorDecl(n.text, tuple(arity), coarity.text, behavioral, module,
                             span=kw.span.to(coarity.span)) for n in names]

    def var_decl(self) -> list[tuple[str, str]]:
        kw = self.take()
        names = []
        while self.at("ident"):
            names.append(self.take().text)
            if kw.text == "var":
                break
        if not names:
            self.fail(["variable name"])
        self.expect("colon")
        sort = self.expect("ident").text
        return [(n, sort) for n in names]

    def equation(self) -> Equation:
        kw = self.take()
        label = None
        if self.at("lbracket"):
            self.take()
            label = self.expect("ident").text
            self.expect("rbracket")
            self.expect("colon")
        lhs = self.term()
        self.expect("symbol", "=")
        rhs = self.term()
        cond = None
        if kw.text == "ceq":
            self.expect("keyword", "if")
            cond = self.term()
        elif self.at("keyword", "if"):
            self.fail(["."])
        end = self.expect("dot")
        return Equation(lhs, rhs, cond, label, kw.span.to(end.span))

    # -- terms ---------------------------------------------------------------
    def term(self) -> Term:
        try:
            return self.expr(0)
        except RecursionError:
            raise SpecError([error("syntax-error", "term nested too deeply",
                                   self.peek().span if self.peek() else self.eof_span())])

    def infix_prec(self) -> tuple[str, int] | None:
        tok = self.peek()
        if tok is None:
            return None
        if tok.kind == "symbol" and tok.text != "=":
            return tok.text, INFIX_PRECEDENCE.get(tok.text, USER_INFIX_PRECEDENCE)
        if tok.kind == "ident" and tok.text in WORD_INFIX and tok.text not in self.vars:
            return tok.text, INFIX_PRECEDENCE[tok.text]
        return None

    def expr(self, min_prec: int) -> Term:
        left = self.unary()
        while True:
            info = self.infix_prec()
            if info is None or info[1] < min_prec:
                return left
            sym, prec = info
            self.take()
            right = self.expr(prec + 1)
            left = App(f"_{sym}_", (left, right), span=_join(left.span, right.span))

    def unary(self) -> Term:
        tok = self.peek()
        if tok is not None and tok.kind == "symbol" and tok.text == "-":
            self.take()
            operand = self.expr(UNARY_MINUS_PRECEDENCE)
            if isinstance(operand, Lit) and operand.sort in ("Nat", "Int") \
                    and not isinstance(operand.value, bool):
                return int_lit(-operand.value, _join(tok.span, operand.span))
            return App("-_", (operand,), span=_join(tok.span, operand.span))
        if tok is not None and tok.kind == "ident" and tok.text == "not" \
                and tok.text not in self.vars:
            self.take()
            operand = self.expr(NOT_PRECEDENCE + 1)
            return App("not_", (operand,), span=_join(tok.span, operand.span))
        return self.primary()

    def primary(self) -> Term:
        tok = self.peek()
        if tok is None:
            self.fail(["term"])
        if tok.kind == "int":
            self.take()
            return int_lit(int(tok.text), tok.span)
        if tok.kind == "lparen":
            self.take()
            inner = self.expr(0)
            self.expect("rparen")
            return inner
        if tok.kind == "ident":
            self.take()
            if self.at("lparen"):
                self.take()
                args = [self.expr(0)]
                while self.at("comma"):
                    self.take()
                    args.append(self.expr(0))
                close = self.expect("rparen")
                return App(tok.text, tuple(args), span=tok.span.to(close.span))
            if tok.text in self.vars:
                return Var(tok.text, self.vars[tok.text], tok.span)
            if tok.text in ("true", "false"):
                return Lit(tok.text == "true", "Bool", tok.span)
            return App(tok.text, (), span=tok.span)
        self.fail(["term"])


def _join(a: SourceSpan | None, b: SourceSpan | None) -> SourceSpan | None:
    if a is None:
        return b
    return a.to(b)


def parse_module(tokens: Sequence[Token]) -> SpecModule:
    """Parse exactly one module from ``tokens`` (unchecked)."""
    p = _Parser(tokens)
    mod = p.module()
    if p.peek() is not None:
        p.fail(["end of input"])
    return mod


def parse_modules(tokens: Sequence[Token]) -> list[SpecModule]:
    return _Parser(tokens).modules()


def parse_text(text: str, file: str = "<string>") -> list[SpecModule]:
    """Tokenize and parse every module in ``text`` (unchecked)."""
    return _Parser(tokenize(text, file), file).modules()


def parse_term(text: str, variables: dict[str, str] | None = None) -> Term:
    """Parse a standalone raw term, e.g. for the interpreter or tests."""
    p = _Parser(tokenize(text, "<term>"), "<term>")
    p.vars = dict(variables or {})
    t = p.term()
    if p.peek() is not None:
        p.fail(["end of term"])
    return t


def parse_spec(files: Sequence[str | os.PathLike], *, texts: dict[str, str] | None = None):
    """Parse and check a set of spec files.

    Returns a :class:`~otscontract.modules.ModuleSet` (a sequence of the user
    modules in dependency order).  Raises :class:`SpecError` carrying every
    diagnostic when any file fails to lex, parse or check.  ``texts`` maps a
    file name to in-memory source and skips the disk read for that name.
    """
    from .modules import ModuleSet

    diags: list[Diagnostic] = []
    parsed: list[SpecModule] = []
    for f in files:
        fname = str(f)
        try:
            if texts is not None and fname in texts:
                text = texts[fname]
            else:
                text = Path(f).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            diags.append(error("io-error", f"cannot read {fname}: {exc}",
                               SourceSpan(fname, 1, 1, 1, 1)))
            continue
        try:
            parsed.extend(parse_text(text, fname))
        except SpecError as exc:
            diags.extend(exc.diagnostics)
    if diags:
        raise SpecError(diags)
    return ModuleSet.check(parsed)
