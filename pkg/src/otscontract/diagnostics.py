"""Source spans, diagnostics and the exception that carries them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

# Closed set of diagnostic codes.  Keep docs/diagnostics.md in sync.
CODES = frozenset({
    # lexer / parser
    "lexical-error",
    "syntax-error",
    "unterminated-module",
    "unresolved-import",
    "duplicate-module-name",
    "cyclic-import",
    "io-error",
    # module checking
    "unknown-sort",
    "ambiguous-sort",
    "duplicate-sort",
    "sort-kind-mismatch",
    "duplicate-operator",
    "invalid-behavioral-operator",
    "invalid-mixfix",
    "unknown-operator",
    "ambiguous-operator",
    "ill-sorted-term",
    "ill-sorted-equation",
    "non-executable-equation",
    # analyzer
    "unknown-module",
    "no-hidden-sort",
    "multiple-hidden-sorts",
    "transition-without-state-argument",
    "dangling-effective-condition",
    "effective-condition-signature",
    "unguarded-effect",
    "not-composite",
    "component-missing",
    "composition-cond1",
    "composition-cond2",
    "composition-cond3",
    "composition-unmatched",
    # interpreter
    "fuel-exhausted",
    "stuck-term",
    "stuck-condition",
    "non-boolean-condition",
    "unknown-transition",
    "unknown-observer",
    "arity-mismatch",
    "projection-absent",
    "projection-present",
    "bad-scenario",
    # codegen
    "unmapped-sort",
    "observer-equation-not-translatable",
    "chain-not-translatable",
    "chain-has-transition",
    "component-class-missing",
    "parent-not-translated",
    "contract-not-side-effect-free",
})


@dataclass(frozen=True)
class SourceSpan:
    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self):
        if (self.start_line, self.start_col) > (self.end_line, self.end_col):
            raise ValueError(f"span start after end: {self}")

    def __str__(self) -> str:
        return f"{self.file}:{self.start_line}:{self.start_col}"

    def to(self, other: "SourceSpan | None") -> "SourceSpan":
        """Span covering ``self`` through ``other``."""
        if other is None:
            return self
        return SourceSpan(self.file, self.start_line, self.start_col,
                          other.end_line, other.end_col)


NO_SPAN = SourceSpan("<builtin>", 1, 1, 1, 1)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    code: str
    message: str
    span: SourceSpan = NO_SPAN

    def __post_init__(self):
        if self.code not in CODES:
            raise ValueError(f"undocumented diagnostic code {self.code!r}")
        if self.severity not in ("error", "warning"):
            raise ValueError(f"bad severity {self.severity!r}")

    @property
    def is_error(self) -> bool:
        return self.severity == "error"

    def render(self) -> str:
        return f"{self.span}: {self.severity}: {self.code}: {self.message}"


def error(code: str, message: str, span: SourceSpan | None = None) -> Diagnostic:
    return Diagnostic("error", code, message, span or NO_SPAN)


def warning(code: str, message: str, span: SourceSpan | None = None) -> Diagnostic:
    return Diagnostic("warning", code, message, span or NO_SPAN)


def has_errors(diags: Iterable[Diagnostic]) -> bool:
    return any(d.is_error for d in diags)


class SpecError(Exception):
    """Raised when a stage produces error diagnostics.

    ``diagnostics`` holds everything the stage reported, warnings included.
    """

    def __init__(self, diagnostics: Iterable[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(d.render() for d in self.diagnostics))

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]
