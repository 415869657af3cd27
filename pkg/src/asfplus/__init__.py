"""Parser, flattener and diagram tool for modular algebraic specifications."""

from .errors import (
    AsfError, ExportabilityConflict, NameClash, NormError, ParseError, SemanticError, SpecError,
)
from .macros import expand_macro, expand_module
from .normalizer import NormalForm, Normalizer, nf, normal_form
from .parser import parse_module, parse_specification
from .printer import print_module

__all__ = [
    "AsfError", "ExportabilityConflict", "NameClash", "NormError", "ParseError", "SemanticError",
    "SpecError", "expand_macro", "expand_module", "NormalForm", "Normalizer", "nf", "normal_form",
    "parse_module", "parse_specification", "print_module",
]
