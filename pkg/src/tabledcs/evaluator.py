"""Formula evaluation over a table.

Values formulas evaluate through an internal bag (one entry per contributing
cell, in row order) so that aggregation counts with multiplicity exactly the
way the SQL translation does; the public denotation exposes the deduplicated
set. Unions deduplicate by value. Record sets are index sets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

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
    SCALAR,
    SubCounts,
    SubValues,
    TypeMismatch,
    Union,
    VALUES,
    ValueLit,
    typecheck,
)
from .table import CellValue, NUMBER, Table, compare_values, number_value


class EvalError(Exception):
    pass


class EmptyAggregate(EvalError):
    pass


class NonNumericAggregate(EvalError):
    pass


class NonSingletonSub(EvalError):
    pass


@dataclass(frozen=True)
class Denotation:
    """Evaluation result: a value set, a record set, or a scalar."""

    kind: str
    values: frozenset[CellValue] = frozenset()
    records: frozenset[int] = frozenset()
    scalar: CellValue | None = None
    scalar_fn: str | None = None


def value_set(values) -> Denotation:
    return Denotation(kind=VALUES, values=frozenset(values))


def record_set(indices) -> Denotation:
    return Denotation(kind=RECORDS, records=frozenset(indices))


def scalar_result(value: CellValue, fn: str) -> Denotation:
    return Denotation(kind=SCALAR, scalar=value, scalar_fn=fn)


def satisfies(cell: CellValue, comp: NumCompare) -> bool:
    c = compare_values(cell, comp.bound)
    if comp.op == "gt":
        return c > 0
    if comp.op == "lt":
        return c < 0
    if comp.op == "geq":
        return c >= 0
    if comp.op == "leq":
        return c <= 0
    raise ValueError(f"unknown comparison op: {comp.op!r}")


def predicate_matches(cell: CellValue, pred: Formula) -> bool:
    """Does a cell match a join's value side (literal / comparison tree)."""
    if isinstance(pred, ValueLit):
        return cell == pred.value
    if isinstance(pred, NumCompare):
        return satisfies(cell, pred)
    if isinstance(pred, Union):
        return predicate_matches(cell, pred.left) or predicate_matches(
            cell, pred.right
        )
    if isinstance(pred, Intersect):
        return predicate_matches(cell, pred.left) and predicate_matches(
            cell, pred.right
        )
    raise TypeMismatch("join value must be literals or comparisons")


def matching_rows(table: Table, column: str, value_formula: Formula) -> list[int]:
    """Rows whose cell in ``column`` matches the join's value side."""
    return [
        i
        for i in range(table.n_rows)
        if predicate_matches(table.cell(i, column), value_formula)
    ]


def eval_records(f: Formula, table: Table) -> frozenset[int]:
    """Record set denoted by a records-typed formula."""
    if isinstance(f, AllRecords):
        return frozenset(range(table.n_rows))
    if isinstance(f, Join):
        return frozenset(matching_rows(table, f.column, f.value))
    if isinstance(f, Union):
        return eval_records(f.left, table) | eval_records(f.right, table)
    if isinstance(f, Intersect):
        return eval_records(f.left, table) & eval_records(f.right, table)
    if isinstance(f, ArgmaxRecords):
        return frozenset(argmax_rows(table, f.column, f.records, f.direction))
    raise TypeMismatch(f"{f.kind} does not denote records")


def argmax_rows(
    table: Table, column: str, scope: Formula, direction: str
) -> list[int]:
    """Rows in scope whose column cell attains the extreme value, ties kept."""
    rows = sorted(eval_records(scope, table))
    if not rows:
        return []
    best = table.cell(rows[0], column)
    sign = 1 if direction == MAX else -1
    for i in rows[1:]:
        if sign * compare_values(table.cell(i, column), best) > 0:
            best = table.cell(i, column)
    return [i for i in rows if compare_values(table.cell(i, column), best) == 0]


def _dedup(values: list[CellValue]) -> list[CellValue]:
    seen: set[CellValue] = set()
    out = []
    for v in values:
        if v not in seen:
            seen.add(v)
            out.append(v)
    return out


def eval_bag(f: Formula, table: Table) -> list[CellValue]:
    """Value bag of a values-typed formula, in row order.

    Projections yield one entry per record; unions deduplicate.
    """
    if isinstance(f, ValueLit):
        return [f.value]
    if isinstance(f, ColumnValues):
        rows = sorted(eval_records(f.records, table))
        return [table.cell(i, f.column) for i in rows]
    if isinstance(f, PrevValues):
        rows = sorted(
            i - 1 for i in eval_records(f.records, table) if i - 1 >= 0
        )
        return [table.cell(i, f.column) for i in rows]
    if isinstance(f, NextValues):
        rows = sorted(
            i + 1
            for i in eval_records(f.records, table)
            if i + 1 < table.n_rows
        )
        return [table.cell(i, f.column) for i in rows]
    if isinstance(f, Union):
        return _dedup(eval_bag(f.left, table) + eval_bag(f.right, table))
    if isinstance(f, ExtremeIndexValue):
        rows = eval_records(f.records, table)
        if not rows:
            return []
        pick = max(rows) if f.direction == MAX else min(rows)
        return [table.cell(pick, f.column)]
    if isinstance(f, MostFrequent):
        return most_frequent_values(table, f)
    if isinstance(f, CompareValues):
        return compare_values_result(table, f)
    raise TypeMismatch(f"{f.kind} does not denote values")


def most_frequent_values(table: Table, f: MostFrequent) -> list[CellValue]:
    candidates = set(eval_bag(f.values, table))
    column = [table.cell(i, f.column) for i in range(table.n_rows)]
    counts: dict[CellValue, int] = {}
    for cell in column:
        if cell in candidates:
            counts[cell] = counts.get(cell, 0) + 1
    if not counts:
        return []
    target = max(counts.values()) if f.direction == MAX else min(counts.values())
    winners = {v for v, c in counts.items() if c == target}
    return _dedup([cell for cell in column if cell in winners])


def compare_values_rows(table: Table, f: CompareValues) -> list[int]:
    """Rows whose key cell is a candidate and whose companion cell is extreme."""
    candidates = set(eval_bag(f.values, table))
    rows = [
        i
        for i in range(table.n_rows)
        if table.cell(i, f.column_key) in candidates
    ]
    if not rows:
        return []
    best = table.cell(rows[0], f.column_by)
    sign = 1 if f.direction == MAX else -1
    for i in rows[1:]:
        if sign * compare_values(table.cell(i, f.column_by), best) > 0:
            best = table.cell(i, f.column_by)
    return [
        i for i in rows if compare_values(table.cell(i, f.column_by), best) == 0
    ]


def compare_values_result(table: Table, f: CompareValues) -> list[CellValue]:
    return _dedup(
        [table.cell(i, f.column_key) for i in compare_values_rows(table, f)]
    )


def _numeric_bag(bag: list[CellValue], fn: str) -> list[float]:
    nums = []
    for v in bag:
        if v.kind != NUMBER:
            raise NonNumericAggregate(
                f"{fn} needs numeric values, got {v.render()!r}"
            )
        nums.append(v.num)
    return nums


def _aggregate(fn: str, bag: list[CellValue]) -> CellValue:
    if fn == "count":
        return number_value(len(bag))
    if not bag:
        raise EmptyAggregate(f"{fn} over an empty set")
    if fn in ("max", "min"):
        sign = 1 if fn == "max" else -1
        best = bag[0]
        for v in bag[1:]:
            if sign * compare_values(v, best) > 0:
                best = v
        return best
    nums = _numeric_bag(bag, fn)
    total = math.fsum(nums)
    if fn == "sum":
        return number_value(total)
    if fn == "avg":
        return number_value(total / len(nums))
    raise ValueError(f"unknown aggregate fn: {fn!r}")


def _lookup_single(table: Table, f: SubValues, key: CellValue) -> float:
    rows = matching_rows(table, f.column_key, ValueLit(key))
    found = _dedup([table.cell(i, f.column_out) for i in rows])
    if len(found) != 1:
        raise NonSingletonSub(
            f"lookup of {key.render()!r} in {f.column_key!r} denotes "
            f"{len(found)} values, expected exactly 1"
        )
    if found[0].kind != NUMBER:
        raise NonNumericAggregate(
            f"difference needs numeric values, got {found[0].render()!r}"
        )
    return found[0].num


def evaluate(f: Formula, table: Table) -> Denotation:
    """Evaluate a formula; typechecks first.

    Raises UnknownColumn/TypeMismatch for ill-formed input and
    EmptyAggregate/NonNumericAggregate/NonSingletonSub for runtime failures.
    """
    t = typecheck(f, table)
    if t == RECORDS:
        return record_set(eval_records(f, table))
    if t == VALUES:
        return value_set(eval_bag(f, table))
    return _evaluate_scalar(f, table)


def _evaluate_scalar(f: Formula, table: Table) -> Denotation:
    if isinstance(f, Aggregate):
        if typecheck(f.operand, table) == RECORDS:
            # count over a record set; other fns are rejected by typecheck
            n = len(eval_records(f.operand, table))
            return scalar_result(number_value(n), f.fn)
        return scalar_result(_aggregate(f.fn, eval_bag(f.operand, table)), f.fn)
    if isinstance(f, SubValues):
        left = _lookup_single(table, f, f.left)
        right = _lookup_single(table, f, f.right)
        return scalar_result(number_value(left - right), "sub")
    if isinstance(f, SubCounts):
        left = len(matching_rows(table, f.column, ValueLit(f.left)))
        right = len(matching_rows(table, f.column, ValueLit(f.right)))
        return scalar_result(number_value(left - right), "sub")
    raise TypeMismatch(f"{f.kind} does not denote a scalar")


def _numbers_close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12)


def _payload_equal(a: CellValue, b: CellValue) -> bool:
    if a.kind == NUMBER and b.kind == NUMBER:
        return _numbers_close(a.num, b.num)
    return a == b


def result_equals(a: Denotation, b: Denotation) -> bool:
    """Structural set equality; a scalar equals the singleton value set
    holding the same value."""
    if a.kind == SCALAR and b.kind == SCALAR:
        return _payload_equal(a.scalar, b.scalar)
    if a.kind == SCALAR and b.kind == VALUES:
        return len(b.values) == 1 and _payload_equal(a.scalar, next(iter(b.values)))
    if b.kind == SCALAR and a.kind == VALUES:
        return result_equals(b, a)
    if a.kind != b.kind:
        return False
    if a.kind == RECORDS:
        return a.records == b.records
    return a.values == b.values
