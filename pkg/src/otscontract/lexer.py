"""Tokenizer for the CafeOBJ subset.

Comments run from ``--`` to end of line.  A ``.`` is only a token when it is
preceded by whitespace, which is how equations are terminated.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .diagnostics import SourceSpan, SpecError, error

KEYWORDS = frozenset({
    "mod*", "mod!", "op", "ops", "bop", "bops", "eq", "ceq", "var", "vars", "pr", "if",
})

IDENT_START = re.compile(r"[A-Za-z]")
IDENT_CHARS = re.compile(r"[A-Za-z0-9\-'’]*")
SYMBOL_CHARS = set("+-*/<>=~&|^%$#@?!")
MIXFIX = re.compile(r"_[^\s_(){}\[\],:]+_|[A-Za-z]+_")
PUNCT = {"(": "lparen", ")": "rparen", "{": "lbrace", "}": "rbrace",
         "[": "lbracket", "]": "rbracket", ",": "comma", ":": "colon"}


@dataclass(frozen=True)
class Token:
    kind: str  # keyword | ident | int | symbol | arrow | dot | mixfix | punctuation kinds
    text: str
    span: SourceSpan

    def __repr__(self) -> str:
        return f"{self.kind}:{self.text}"


def tokenize(text: str, file: str = "<string>") -> list[Token]:
    """Split ``text`` into tokens, raising SpecError on an illegal character."""
    tokens: list[Token] = []
    i = 0
    line, col = 1, 1
    n = len(text)

    def span(length: int) -> SourceSpan:
        return SourceSpan(file, line, col, line, col + max(length, 1) - 1)

    def emit(kind: str, lexeme: str):
        tokens.append(Token(kind, lexeme, span(len(lexeme))))

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if text.startswith("--", i):
            j = text.find("\n", i)
            j = n if j == -1 else j
            col += j - i
            i = j
            continue
        if text.startswith("mod*", i) or text.startswith("mod!", i):
            emit("keyword", text[i:i + 4])
            i += 4
            col += 4
            continue
        if text.startswith("*[", i):
            emit("hidden_open", "*[")
            i += 2
            col += 2
            continue
        if text.startswith("]*", i):
            emit("hidden_close", "]*")
            i += 2
            col += 2
            continue
        if ch == "_" or (IDENT_START.match(ch) and text.startswith("_", i + 1 + len(
                IDENT_CHARS.match(text, i + 1).group()))):
            m = MIXFIX.match(text, i)
            if m and (m.end() == n or not (text[m.end()].isalnum())):
                emit("mixfix", m.group())
                i = m.end()
                col += len(m.group())
                continue
            if ch == "_":
                raise SpecError([error("lexical-error", "malformed mixfix operator name",
                                       span(1))])
        if IDENT_START.match(ch):
            m = IDENT_CHARS.match(text, i + 1)
            word = ch + m.group()
            kind = "keyword" if word in KEYWORDS else "ident"
            emit(kind, word)
            i += len(word)
            col += len(word)
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and (IDENT_START.match(text[j]) or text[j] == "_"):
                raise SpecError([error("lexical-error",
                                       "identifier must not begin with a digit", span(j - i + 1))])
            emit("int", text[i:j])
            col += j - i
            i = j
            continue
        if ch == ".":
            if i > 0 and not text[i - 1].isspace():
                raise SpecError([error(
                    "lexical-error", "equation terminator '.' must be preceded by whitespace",
                    span(1))])
            emit("dot", ".")
            i += 1
            col += 1
            continue
        if ch in PUNCT:
            emit(PUNCT[ch], ch)
            i += 1
            col += 1
            continue
        if ch in SYMBOL_CHARS:
            j = i
            while j < n and text[j] in SYMBOL_CHARS:
                if text.startswith("--", j) and j > i:
                    break
                j += 1
            sym = text[i:j]
            # a run like "->-" never occurs in the grammar; split arrows off eagerly
            if sym.startswith("->"):
                sym = "->"
            elif sym.startswith("-") and len(sym) > 1 and sym[1] not in "=":
                sym = "-"
            emit("arrow" if sym == "->" else "symbol", sym)
            i += len(sym)
            col += len(sym)
            continue
        raise SpecError([error("lexical-error", f"illegal character {ch!r}", span(1))])
    return tokens
