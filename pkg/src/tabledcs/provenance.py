"""Cell-level provenance for formulas over a table.

Three nested cell sets explain one evaluation:

- output_cells: the cells the answer is read from (or, for an aggregate, the
  cells attaining it).
- executed_cells: every cell some subquery output while computing the answer;
  the union of output cells over the whole decompose closure, including the
  formula itself.
- column_cells: every cell of every column the formula mentions.

Aggregates additionally mark (fn, column) pairs for header rendering; fused
difference nodes record their two operand cell groups so row sampling can
show one row per side.
"""
from __future__ import annotations

from dataclasses import dataclass

from .evaluator import (
    argmax_rows,
    compare_values_rows,
    eval_bag,
    eval_records,
    evaluate,
    matching_rows,
    most_frequent_values,
)
from .formula import (
    Aggregate,
    AllRecords,
    ArgmaxRecords,
    ColumnValues,
    CompareValues,
    ExtremeIndexValue,
    Formula,
    Intersect,
    Join,
    MAX,
    MostFrequent,
    NextValues,
    NumCompare,
    PrevValues,
    RECORDS,
    SubCounts,
    SubValues,
    Union,
    ValueLit,
    decompose,
    subformulas,
    typecheck,
)
from .table import CellRef, Table


@dataclass(frozen=True)
class ProvenanceChain:
    """Nested explanation sets for one formula on one table.

    output_cells <= executed_cells <= column_cells always holds (marks are
    tracked separately and do not participate in the inclusions).
    output_groups is set only for difference formulas: the two operand cell
    groups, in operand order.
    """

    output_cells: frozenset[CellRef]
    executed_cells: frozenset[CellRef]
    column_cells: frozenset[CellRef]
    aggregate_marks: frozenset[tuple[str, str]]
    output_groups: tuple[frozenset[CellRef], frozenset[CellRef]] | None = None


def _column_refs(table: Table, column: str, rows) -> frozenset[CellRef]:
    return frozenset(CellRef(column, i) for i in rows)


def output_cells(f: Formula, table: Table) -> frozenset[CellRef]:
    """Cells the formula's own result is read from."""
    if isinstance(f, (ValueLit, AllRecords, NumCompare)):
        return frozenset()
    if not mentioned_columns(f):
        # literal/comparison trees inside a join touch no cells
        return frozenset()
    if isinstance(f, Join):
        return _column_refs(table, f.column, matching_rows(table, f.column, f.value))
    if isinstance(f, ColumnValues):
        return _column_refs(table, f.column, eval_records(f.records, table))
    if isinstance(f, PrevValues):
        rows = eval_records(f.records, table)
        return _column_refs(
            table, f.column, (i - 1 for i in rows if i - 1 >= 0)
        )
    if isinstance(f, NextValues):
        rows = eval_records(f.records, table)
        return _column_refs(
            table, f.column, (i + 1 for i in rows if i + 1 < table.n_rows)
        )
    if isinstance(f, Union):
        return output_cells(f.left, table) | output_cells(f.right, table)
    if isinstance(f, Intersect):
        surviving = eval_records(f, table)
        return frozenset(
            c for c in output_cells(f.left, table) if c.row_index in surviving
        )
    if isinstance(f, Aggregate):
        operand = output_cells(f.operand, table)
        if f.fn in ("max", "min"):
            best = evaluate(f, table).scalar
            return frozenset(
                c for c in operand if table.cell_at(c) == best
            )
        return operand
    if isinstance(f, (SubValues, SubCounts)):
        left, right = decompose(f)
        return output_cells(left, table) | output_cells(right, table)
    if isinstance(f, ArgmaxRecords):
        rows = argmax_rows(table, f.column, f.records, f.direction)
        return _column_refs(table, f.column, rows)
    if isinstance(f, ExtremeIndexValue):
        rows = eval_records(f.records, table)
        if not rows:
            return frozenset()
        pick = max(rows) if f.direction == MAX else min(rows)
        return frozenset([CellRef(f.column, pick)])
    if isinstance(f, MostFrequent):
        winners = set(most_frequent_values(table, f))
        return frozenset(
            CellRef(f.column, i)
            for i in range(table.n_rows)
            if table.cell(i, f.column) in winners
        )
    if isinstance(f, CompareValues):
        return _column_refs(table, f.column_key, compare_values_rows(table, f))
    raise TypeError(f"not a formula node: {f!r}")


def execution_extras(f: Formula, table: Table) -> frozenset[CellRef]:
    """Cells a node examines that are no subquery's output.

    Only value comparison has such cells: the comparison-column cells of the
    rows it ranked, plus the key cells naming the ranked values.
    """
    if not isinstance(f, CompareValues):
        return frozenset()
    candidates = set(eval_bag(f.values, table))
    rows = [
        i
        for i in range(table.n_rows)
        if table.cell(i, f.column_key) in candidates
    ]
    out: set[CellRef] = set()
    for i in rows:
        out.add(CellRef(f.column_by, i))
        out.add(CellRef(f.column_key, i))
    return frozenset(out)


def mentioned_columns(f: Formula) -> frozenset[str]:
    if isinstance(f, (ValueLit, AllRecords, NumCompare)):
        return frozenset()
    if isinstance(f, Join):
        return frozenset([f.column])
    if isinstance(f, (ColumnValues, PrevValues, NextValues)):
        return frozenset([f.column]) | mentioned_columns(f.records)
    if isinstance(f, Aggregate):
        return mentioned_columns(f.operand)
    if isinstance(f, SubValues):
        return frozenset([f.column_out, f.column_key])
    if isinstance(f, SubCounts):
        return frozenset([f.column])
    if isinstance(f, (Union, Intersect)):
        return mentioned_columns(f.left) | mentioned_columns(f.right)
    if isinstance(f, (ArgmaxRecords, ExtremeIndexValue)):
        return frozenset([f.column]) | mentioned_columns(f.records)
    if isinstance(f, MostFrequent):
        return frozenset([f.column]) | mentioned_columns(f.values)
    if isinstance(f, CompareValues):
        return frozenset([f.column_key, f.column_by]) | mentioned_columns(f.values)
    raise TypeError(f"not a formula node: {f!r}")


def _output_column(f: Formula) -> str | None:
    """The column a result is read off, for header marking."""
    if isinstance(f, Join):
        return f.column
    if isinstance(f, (ColumnValues, PrevValues, NextValues, ExtremeIndexValue)):
        return f.column
    if isinstance(f, MostFrequent):
        return f.column
    if isinstance(f, CompareValues):
        return f.column_key
    if isinstance(f, (Union, Intersect)):
        return _output_column(f.left) or _output_column(f.right)
    if isinstance(f, ArgmaxRecords):
        if isinstance(f.records, AllRecords):
            return f.column
        return _output_column(f.records) or f.column
    return None


def _collect_marks(f: Formula) -> set[tuple[str, str]]:
    marks: set[tuple[str, str]] = set()
    if isinstance(f, Aggregate):
        column = _output_column(f.operand)
        if column is not None:
            marks.add((f.fn, column))
        marks |= _collect_marks(f.operand)
        return marks
    if isinstance(f, (SubValues, SubCounts)):
        # fused differences never mark headers
        return marks
    for child in decompose(f):
        marks |= _collect_marks(child)
    return marks


def provenance_chain(f: Formula, table: Table) -> ProvenanceChain:
    """Compute the three nested cell sets plus marks for f on table."""
    typecheck(f, table)
    out = output_cells(f, table)
    executed = set(out)
    for g in subformulas(f):
        executed |= output_cells(g, table)
        executed |= execution_extras(g, table)
    columns = mentioned_columns(f)
    column_refs = frozenset(
        CellRef(c, i) for c in columns for i in range(table.n_rows)
    )
    groups = None
    if isinstance(f, (SubValues, SubCounts)):
        left, right = decompose(f)
        groups = (output_cells(left, table), output_cells(right, table))
    return ProvenanceChain(
        output_cells=out,
        executed_cells=frozenset(executed),
        column_cells=column_refs,
        aggregate_marks=frozenset(_collect_marks(f)),
        output_groups=groups,
    )


def record_sets(
    chain: ProvenanceChain, table: Table
) -> tuple[frozenset[int], frozenset[int], frozenset[int]]:
    """Rows touched at each chain level: (output, executed, column)."""
    del table
    return (
        frozenset(c.row_index for c in chain.output_cells),
        frozenset(c.row_index for c in chain.executed_cells),
        frozenset(c.row_index for c in chain.column_cells),
    )
