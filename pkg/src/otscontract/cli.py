"""``otscontract`` command-line entry point.

Exit status: 0 success, 1 the input has errors, 2 usage error, 3 internal or
write failure.  Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .analyzer import check_composition, classify, dump_model
from .codegen import emit_java_jml, emit_json, output_filename, translate_all
from .codegen.translate import translatable_modules
from .config import FORMATS, Config, ConfigError, load_config
from .diagnostics import Diagnostic, SourceSpan, SpecError, error, has_errors
from .interpreter import (DomainBounds, Interpreter, InterpreterError, load_scenario,
                          trace_to_json, trace_to_text)
from .modules import ModuleSet
from .parser import parse_spec
from .rewrite import RewriteError

EXIT_OK, EXIT_ERRORS, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class _UsageError(Exception):
    pass


def _report(diags: Sequence[Diagnostic], stream=None):
    stream = stream or sys.stderr
    for d in diags:
        print(d.render(), file=stream)


def _load(files: Sequence[str]) -> ModuleSet:
    ms = parse_spec(files)
    _report(ms.warnings)
    return ms


def _require_module(ms: ModuleSet, name: str) -> None:
    if name not in ms.names():
        raise _UsageError(f"no module named {name}; known modules: {', '.join(ms.names())}")


def cmd_check(args, cfg: Config) -> int:
    ms = _load(args.files)
    diags: list[Diagnostic] = []
    for name in translatable_modules(ms):
        try:
            model = classify(ms, name)
        except SpecError as exc:
            diags += exc.diagnostics
            continue
        diags += model.warnings
        if model.is_composite:
            diags += check_composition(model, None, ms)
    _report(diags)
    return EXIT_ERRORS if has_errors(diags) else EXIT_OK


def cmd_translate(args, cfg: Config) -> int:
    ms = _load(args.files)
    fmt = args.format or cfg.format
    out = Path(args.out) if args.out else cfg.output_dir
    if out is None:
        raise _UsageError("translate needs --out DIR (or output_dir in the configuration)")
    for m in args.module or ():
        _require_module(ms, m)
    classes = translate_all(ms, cfg.translation_options(), args.module or None)
    for c in classes:
        _report(c.warnings)
    rendered = [(output_filename(c, fmt), emit_json(c) if fmt == "json" else emit_java_jml(c))
                for c in classes]
    try:
        out.mkdir(parents=True, exist_ok=True)
        for name, text in rendered:
            path = out / name
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            print(path)
    except OSError as exc:
        print(f"otscontract: cannot write output: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def _bounds(args, cfg: Config) -> DomainBounds:
    b = cfg.bounds
    try:
        return DomainBounds(tuple(args.int_range) if args.int_range else b.int_range,
                            tuple(args.id_range) if args.id_range else b.id_range,
                            args.max_steps if args.max_steps is not None else b.max_rewrite_steps)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None


def cmd_simulate(args, cfg: Config) -> int:
    bounds = _bounds(args, cfg)
    ms = _load(args.files)
    _require_module(ms, args.module)
    where = SourceSpan(args.scenario, 1, 1, 1, 1)
    try:
        with open(args.scenario, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        _report([error("io-error", f"cannot read scenario: {exc.strerror}", where)])
        return EXIT_ERRORS
    stutter = cfg.implicit_stutter if args.implicit_stutter is None else args.implicit_stutter
    try:
        scenario = load_scenario(text)
        machine = Interpreter(ms, args.module, bounds, implicit_stutter=stutter)
        trace = machine.run_scenario(scenario)
    except InterpreterError as exc:
        _report([error(exc.code, str(exc), where)])
        return EXIT_ERRORS
    except RewriteError as exc:
        _report([error(exc.code, str(exc), where)])
        return EXIT_ERRORS
    _report(machine.warnings)
    sys.stdout.write(trace_to_json(trace) if args.json else trace_to_text(trace))
    return EXIT_OK


def cmd_dump(args, cfg: Config) -> int:
    ms = _load(args.files)
    _require_module(ms, args.module)
    model = classify(ms, args.module)
    _report(model.warnings)
    sys.stdout.write(dump_model(model))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="otscontract",
        description="Check, simulate and translate OTS/CafeOBJ specifications into "
                    "JML-annotated Java.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(sp):
        sp.add_argument("files", nargs="+", metavar="FILE", help="CafeOBJ source files")
        sp.add_argument("--config", metavar="PATH",
                        help="TOML configuration (default: $OTSCONTRACT_CONFIG)")

    sp = sub.add_parser("check", help="parse, classify and check composition conditions")
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("translate", help="write one contract class per OTS module")
    common(sp)
    sp.add_argument("--out", metavar="DIR", help="output directory")
    sp.add_argument("--format", choices=FORMATS, help="output format (default java-jml)")
    sp.add_argument("--module", action="append", metavar="NAME",
                    help="translate only this module (repeatable)")
    sp.set_defaults(func=cmd_translate)

    sp = sub.add_parser("simulate", help="run a scenario and print the observer trace")
    common(sp)
    sp.add_argument("--module", required=True, metavar="NAME")
    sp.add_argument("--scenario", required=True, metavar="PATH",
                    help='JSON list of {"transition": name, "args": [...]}')
    sp.add_argument("--int-range", nargs=2, type=int, metavar=("LO", "HI"))
    sp.add_argument("--id-range", nargs=2, type=int, metavar=("LO", "HI"))
    sp.add_argument("--max-steps", type=int, metavar="N", help="rewrite fuel per reduction")
    sp.add_argument("--json", action="store_true", help="one JSON object per step")
    sp.add_argument("--implicit-stutter", action=argparse.BooleanOptionalAction, default=None,
                    help="add stuttering equations for ineffective transitions")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("dump", help="print the classified model as JSON")
    common(sp)
    sp.add_argument("--module", required=True, metavar="NAME")
    sp.set_defaults(func=cmd_dump)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except (_UsageError, ConfigError) as exc:
        print(f"otscontract: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpecError as exc:
        _report(exc.diagnostics)
        return EXIT_ERRORS if has_errors(exc.diagnostics) else EXIT_OK
    except RewriteError as exc:
        print(f"otscontract: {exc}", file=sys.stderr)
        return EXIT_ERRORS
    except Exception as exc:  # noqa: BLE001 - last-resort handler for exit status 3
        print(f"otscontract: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
