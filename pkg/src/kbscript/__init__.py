"""Knowledge-base programs: typed first-order theories, partial structures
and procedures that drive inference over them."""

from .errors import (
    ConflictError, DivisionByZero, DomainError, ExportUnsupportedError, GroundingError,
    InferenceError, KBError, NotTwoValuedError, OpenSymbolUnknownError, OracleError, ParseError,
    RangeError, ResolveError, ShapeError, SolverTimeout, SortError, StructureError,
    UnboundedSortError,
)
from .grounder import ground
from .inference import (
    INCONSISTENT, QueryResult, SolverOptions, apply_definition, entails, eval_definition,
    model_check, model_expand, propagate, query, render_structure,
)
from .logic import Definition, Function, Predicate, Rule, Sort, Theory, Vocabulary
from .parser import parse_file, parse_formula, parse_program
from .printer import format_program
from .program import Program
from .runtime import Interpreter, ScriptError
from .structures import Structure, format_structure
from .tptp import check_tptp, export_tptp

__all__ = [
    "ConflictError", "DivisionByZero", "DomainError", "ExportUnsupportedError", "GroundingError",
    "InferenceError", "KBError", "NotTwoValuedError", "OpenSymbolUnknownError", "OracleError",
    "ParseError", "RangeError", "ResolveError", "ShapeError", "SolverTimeout", "SortError",
    "StructureError", "UnboundedSortError", "ground", "INCONSISTENT", "QueryResult",
    "SolverOptions", "apply_definition", "entails", "eval_definition", "model_check",
    "model_expand", "propagate", "query", "render_structure", "Definition", "Function",
    "Predicate", "Rule", "Sort", "Theory", "Vocabulary", "parse_file", "parse_formula",
    "parse_program", "format_program", "Program", "Interpreter", "ScriptError", "Structure",
    "format_structure", "check_tptp", "export_tptp",
]
