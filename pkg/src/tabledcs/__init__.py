"""Single-table lambda DCS query engine with cell-level provenance,
natural-language readouts, SQL translation and a feedback-trained reranker."""

from .table import (  # noqa: F401
    CellRef,
    CellValue,
    Table,
    column_cells,
    infer_value,
    load_table,
)
from .formula import (  # noqa: F401
    Formula,
    decompose,
    format_formula,
    parse_formula,
    typecheck,
)
from .evaluator import Denotation, evaluate, result_equals  # noqa: F401

__all__ = [
    "CellRef",
    "CellValue",
    "Table",
    "column_cells",
    "infer_value",
    "load_table",
    "Formula",
    "decompose",
    "format_formula",
    "parse_formula",
    "typecheck",
    "Denotation",
    "evaluate",
    "result_equals",
]
