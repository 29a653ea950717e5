"""TOML configuration shared by the command-line tools.

Every setting is optional; command-line flags override the file.  See
docs/config.md for the format.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .codegen.mapping import NameTable, SortMapping, TypeInfo, default_sort_mapping
from .codegen.translate import TranslationOptions
from .interpreter import DomainBounds

ENV_VAR = "OTSCONTRACT_CONFIG"
FORMATS = ("java-jml", "json")

_TOP_KEYS = {"implicit_stutter", "ghost", "output_dir", "format", "method_names", "class_names",
             "sort_mapping", "bounds"}
_BOUND_KEYS = {"int_range", "id_range", "max_rewrite_steps"}
_TYPE_KEYS = {"type", "default", "param", "non_negative"}


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    sort_mapping: dict[str, TypeInfo] = field(default_factory=dict)
    class_names: dict[str, str] = field(default_factory=dict)
    method_names: dict[str, str] = field(default_factory=dict)
    ghost: str = "temp"
    bounds: DomainBounds = field(default_factory=DomainBounds)
    output_dir: Path | None = None
    format: str = "java-jml"
    implicit_stutter: bool = False

    def translation_options(self) -> TranslationOptions:
        mapping: SortMapping = default_sort_mapping().with_overrides(self.sort_mapping)
        return TranslationOptions(mapping, NameTable(dict(self.method_names),
                                                     dict(self.class_names), self.ghost))


def _range(value, key: str) -> tuple[int, int]:
    if (not isinstance(value, list) or len(value) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)):
        raise ConfigError(f"bounds.{key} must be a list of two integers")
    return value[0], value[1]


def _str_table(value, key: str) -> dict[str, str]:
    if not isinstance(value, dict) or not all(isinstance(v, str) for v in value.values()):
        raise ConfigError(f"[{key}] must map names to strings")
    return dict(value)


def parse_config(data: dict, base: Path | None = None) -> Config:
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration key(s): {', '.join(sorted(unknown))}")
    cfg = Config()
    if "implicit_stutter" in data:
        if not isinstance(data["implicit_stutter"], bool):
            raise ConfigError("implicit_stutter must be true or false")
        cfg.implicit_stutter = data["implicit_stutter"]
    if "ghost" in data:
        if not isinstance(data["ghost"], str) or not data["ghost"].isidentifier():
            raise ConfigError("ghost must be a Java identifier")
        cfg.ghost = data["ghost"]
    if "format" in data:
        if data["format"] not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}")
        cfg.format = data["format"]
    if "output_dir" in data:
        out = Path(str(data["output_dir"]))
        cfg.output_dir = out if out.is_absolute() or base is None else base / out
    cfg.method_names = _str_table(data.get("method_names", {}), "method_names")
    cfg.class_names = _str_table(data.get("class_names", {}), "class_names")

    mapping = data.get("sort_mapping", {})
    if not isinstance(mapping, dict):
        raise ConfigError("[sort_mapping] must be a table")
    for sort, spec in mapping.items():
        if isinstance(spec, str):
            spec = {"type": spec}
        if not isinstance(spec, dict) or "type" not in spec or set(spec) - _TYPE_KEYS:
            raise ConfigError(f"sort_mapping.{sort} needs 'type' and optionally "
                              f"'default', 'param', 'non_negative'")
        t = str(spec["type"])
        cfg.sort_mapping[sort] = TypeInfo(
            t, str(spec.get("default", "null" if t[:1].isupper() else "0")),
            str(spec.get("param", sort[:1].lower())), bool(spec.get("non_negative", False)))

    bounds = data.get("bounds", {})
    if not isinstance(bounds, dict) or set(bounds) - _BOUND_KEYS:
        raise ConfigError(f"[bounds] accepts only {', '.join(sorted(_BOUND_KEYS))}")
    d = DomainBounds()
    try:
        cfg.bounds = DomainBounds(
            _range(bounds["int_range"], "int_range") if "int_range" in bounds else d.int_range,
            _range(bounds["id_range"], "id_range") if "id_range" in bounds else d.id_range,
            int(bounds.get("max_rewrite_steps", d.max_rewrite_steps)))
    except ValueError as exc:
        raise ConfigError(f"invalid bounds: {exc}") from None
    return cfg


def load_config(path: str | os.PathLike | None = None) -> Config:
    """Read ``path``, else the file named by $OTSCONTRACT_CONFIG, else defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return Config()
    p = Path(path)
    try:
        with open(p, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {p}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{p}: {exc}") from None
    return parse_config(data, p.parent)
