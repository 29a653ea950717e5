"""Translation of OTS models into JML-annotated Java contract classes."""

from .java import emit_java_jml, emit_json, normalize_jml, output_filename, render_expr
from .mapping import NameTable, SortMapping, TypeInfo, default_sort_mapping
from .model import (ContractCase, ContractClass, ContractClause, ContractMethod)
from .purity import check_side_effects
from .translate import (TranslationOptions, translate_all, translate_composite,
                        translate_inheritance, translate_model, translate_single)

__all__ = [
    "ContractCase", "ContractClass", "ContractClause", "ContractMethod", "NameTable",
    "SortMapping", "TranslationOptions", "TypeInfo", "check_side_effects",
    "default_sort_mapping", "emit_java_jml", "emit_json", "normalize_jml", "output_filename",
    "render_expr", "translate_all", "translate_composite", "translate_inheritance",
    "translate_model", "translate_single",
]
