"""SQL transpilation over a fixed single-table schema.

Every formula becomes one executable SELECT against a table named T that
carries an extra integer record-index column. Record-set formulas flatten to
WHERE predicates; embedding a record set inside a projection goes through
`"Index" IN (SELECT "Index" ...)` so nesting stays uniform.

Most-frequent defaults to a tie-preserving GROUP BY/HAVING form; the
paper_faithful flag switches to the ORDER BY/LIMIT 1 form, which drops ties.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .formula import (
    Aggregate,
    AllRecords,
    ArgmaxRecords,
    ColumnValues,
    CompareValues,
    ExtremeIndexValue,
    Formula,
    FormulaError,
    Intersect,
    Join,
    MAX,
    MostFrequent,
    NextValues,
    NumCompare,
    PrevValues,
    SubCounts,
    SubValues,
    Union,
    ValueLit,
    COMPARE_OPS,
)
from .table import CellValue, DATE, NUMBER, Table, UnknownColumn

NUMERIC = "numeric"
TEXT = "text"
DATE_TYPE = "date"


class UnsupportedNode(FormulaError):
    """A formula node with no SQL translation (should not happen)."""


_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

# SQLite reserved words; identifiers matching these get quoted.
_SQL_KEYWORDS = frozenset(
    """
    ABORT ACTION ADD AFTER ALL ALTER ALWAYS ANALYZE AND AS ASC ATTACH
    AUTOINCREMENT BEFORE BEGIN BETWEEN BY CASCADE CASE CAST CHECK COLLATE
    COLUMN COMMIT CONFLICT CONSTRAINT CREATE CROSS CURRENT CURRENT_DATE
    CURRENT_TIME CURRENT_TIMESTAMP DATABASE DEFAULT DEFERRABLE DEFERRED
    DELETE DESC DETACH DISTINCT DO DROP EACH ELSE END ESCAPE EXCEPT EXCLUDE
    EXCLUSIVE EXISTS EXPLAIN FAIL FILTER FIRST FOLLOWING FOR FOREIGN FROM
    FULL GENERATED GLOB GROUP GROUPS HAVING IF IGNORE IMMEDIATE IN INDEX
    INDEXED INITIALLY INNER INSERT INSTEAD INTERSECT INTO IS ISNULL JOIN KEY
    LAST LEFT LIKE LIMIT MATCH MATERIALIZED NATURAL NO NOT NOTHING NOTNULL
    NULL NULLS OF OFFSET ON OR ORDER OTHERS OUTER OVER PARTITION PLAN PRAGMA
    PRECEDING PRIMARY QUERY RAISE RANGE RECURSIVE REFERENCES REGEXP REINDEX
    RELEASE RENAME REPLACE RESTRICT RETURNING RIGHT ROLLBACK ROW ROWS
    SAVEPOINT SELECT SET TABLE TEMP TEMPORARY THEN TIES TO TRANSACTION
    TRIGGER UNBOUNDED UNION UNIQUE UPDATE USING VACUUM VALUES VIEW VIRTUAL
    WHEN WHERE WINDOW WITH WITHOUT
    """.split()
)


def quote_ident(name: str) -> str:
    """Bare identifier when legal, double-quoted otherwise."""
    if _IDENT_RE.fullmatch(name) and name.upper() not in _SQL_KEYWORDS:
        return name
    return '"' + name.replace('"', '""') + '"'


def _escape_text(text: str) -> str:
    return "'" + text.replace("'", "''") + "'"


def date_iso(v: CellValue) -> str:
    """ISO-style date text; lexicographic order matches date order."""
    if v.kind != DATE:
        raise ValueError("not a date value")
    out = f"{v.year:04d}"
    if v.month is not None:
        out += f"-{v.month:02d}"
        if v.day is not None:
            out += f"-{v.day:02d}"
    return out


def _number_sql(num: float) -> str:
    if num == int(num) and abs(num) < 1e16:
        return str(int(num))
    return repr(num)


def sql_literal(v: CellValue) -> str:
    if v.kind == NUMBER:
        return _number_sql(v.num)
    if v.kind == DATE:
        return _escape_text(date_iso(v))
    return _escape_text(v.text)


@dataclass(frozen=True)
class SqlSchema:
    """Column layout the generated SQL runs against."""

    columns: tuple
    types: dict
    table_name: str = "T"
    index_column: str = "Index"

    def __post_init__(self) -> None:
        for c in self.columns:
            if c not in self.types:
                raise ValueError(f"column {c!r} has no type")

    def has_column(self, name: str) -> bool:
        return name in self.types


def column_sql_type(table: Table, column: str) -> str:
    kinds = {table.cell(i, column).kind for i in range(table.n_rows)}
    if kinds == {NUMBER}:
        return NUMERIC
    if kinds == {DATE}:
        return DATE_TYPE
    return TEXT


def schema_for_table(table: Table) -> SqlSchema:
    index_column = "Index"
    while index_column in table.headers:
        index_column += "_"
    return SqlSchema(
        columns=tuple(table.headers),
        types={c: column_sql_type(table, c) for c in table.headers},
        index_column=index_column,
    )


class _Generator:
    def __init__(self, schema: SqlSchema, paper_faithful: bool) -> None:
        self.schema = schema
        self.paper_faithful = paper_faithful
        self.table = quote_ident(schema.table_name)
        self.index = quote_ident(schema.index_column)

    def column(self, name: str) -> str:
        if not self.schema.has_column(name):
            raise UnknownColumn(f"schema has no column {name!r}")
        return quote_ident(name)

    def literal(self, v: CellValue, column: str) -> str:
        del column  # literals follow their own kind; column affinity coerces
        return sql_literal(v)

    # -- record sets as WHERE predicates ---------------------------------

    def join_condition(self, column: str, pred: Formula) -> str:
        col = self.column(column)
        if isinstance(pred, ValueLit):
            return f"{col} = {self.literal(pred.value, column)}"
        if isinstance(pred, NumCompare):
            op = COMPARE_OPS[pred.op]
            return f"{col} {op} {self.literal(pred.bound, column)}"
        if isinstance(pred, Union):
            left = self.join_condition(column, pred.left)
            right = self.join_condition(column, pred.right)
            return f"({left} OR {right})"
        if isinstance(pred, Intersect):
            left = self.join_condition(column, pred.left)
            right = self.join_condition(column, pred.right)
            return f"({left} AND {right})"
        raise UnsupportedNode(f"join value has no SQL form: {pred!r}")

    def records_pred(self, f: Formula) -> str | None:
        """WHERE condition selecting f's records; None keeps all rows."""
        if isinstance(f, AllRecords):
            return None
        if isinstance(f, Join):
            return self.join_condition(f.column, f.value)
        if isinstance(f, Union):
            left, right = self.records_pred(f.left), self.records_pred(f.right)
            if left is None or right is None:
                return None
            return f"({left} OR {right})"
        if isinstance(f, Intersect):
            left, right = self.records_pred(f.left), self.records_pred(f.right)
            if left is None:
                return right
            if right is None:
                return left
            return f"({left} AND {right})"
        if isinstance(f, ArgmaxRecords):
            col = self.column(f.column)
            fn = "MAX" if f.direction == MAX else "MIN"
            child = self.records_pred(f.records)
            inner = f"SELECT {fn}({col}) FROM {self.table}"
            if child is not None:
                inner += f" WHERE {child}"
            core = f"{col} = ({inner})"
            if child is None:
                return core
            return f"({child} AND {core})"
        raise UnsupportedNode(f"not a record-set formula: {f!r}")

    def _where(self, pred: str | None) -> str:
        return "" if pred is None else f" WHERE {pred}"

    def select_records(self, f: Formula) -> str:
        return (
            f"SELECT * FROM {self.table}{self._where(self.records_pred(f))}"
        )

    def _index_subquery(self, f: Formula, shift: str = "") -> str:
        pred = self.records_pred(f)
        return (
            f"SELECT {self.index}{shift} FROM {self.table}"
            f"{self._where(pred)}"
        )

    # -- value sets as SELECT statements ----------------------------------

    def values_column(self, f: Formula) -> str:
        """Name of the column a values SELECT projects."""
        if isinstance(f, (ColumnValues, PrevValues, NextValues)):
            return quote_ident(f.column)
        if isinstance(f, ExtremeIndexValue):
            return quote_ident(f.column)
        if isinstance(f, MostFrequent):
            return quote_ident(f.column)
        if isinstance(f, CompareValues):
            return quote_ident(f.column_key)
        if isinstance(f, Union):
            return self.values_column(f.left)
        if isinstance(f, ValueLit):
            return "v"
        raise UnsupportedNode(f"not a value-set formula: {f!r}")

    def select_values(self, f: Formula) -> str:
        if isinstance(f, ValueLit):
            return f"SELECT {sql_literal(f.value)} AS v"
        if isinstance(f, ColumnValues):
            col = self.column(f.column)
            pred = self.records_pred(f.records)
            if pred is None:
                return f"SELECT {col} FROM {self.table}"
            return (
                f"SELECT {col} FROM {self.table} WHERE {self.index} IN "
                f"({self._index_subquery(f.records)})"
            )
        if isinstance(f, PrevValues):
            col = self.column(f.column)
            return (
                f"SELECT {col} FROM {self.table} WHERE {self.index} IN "
                f"({self._index_subquery(f.records, ' - 1')})"
            )
        if isinstance(f, NextValues):
            col = self.column(f.column)
            return (
                f"SELECT {col} FROM {self.table} WHERE {self.index} IN "
                f"({self._index_subquery(f.records, ' + 1')})"
            )
        if isinstance(f, Union):
            return (
                f"{self._union_operand(f.left)} UNION "
                f"{self._union_operand(f.right)}"
            )
        if isinstance(f, ExtremeIndexValue):
            col = self.column(f.column)
            fn = "MAX" if f.direction == MAX else "MIN"
            pred = self.records_pred(f.records)
            inner = (
                f"SELECT {fn}({self.index}) FROM {self.table}"
                f"{self._where(pred)}"
            )
            return (
                f"SELECT {col} FROM {self.table} "
                f"WHERE {self.index} = ({inner})"
            )
        if isinstance(f, MostFrequent):
            return self._most_frequent(f)
        if isinstance(f, CompareValues):
            return self._compare_values(f)
        raise UnsupportedNode(f"not a value-set formula: {f!r}")

    def _union_operand(self, side: Formula) -> str:
        # a LIMIT-ended select cannot sit inside a compound; hide it in a
        # derived table
        sql = self.select_values(side)
        if self.paper_faithful and isinstance(side, MostFrequent):
            return f"SELECT {self.values_column(side)} FROM ({sql})"
        return sql

    def _most_frequent(self, f: MostFrequent) -> str:
        col = self.column(f.column)
        vals = self.select_values(f.values)
        member = f"{col} IN ({vals})"
        if self.paper_faithful:
            order = "DESC" if f.direction == MAX else "ASC"
            return (
                f"SELECT {col} FROM {self.table} WHERE {member} "
                f"GROUP BY {col} "
                f"ORDER BY COUNT({self.index}) {order} LIMIT 1"
            )
        fn = "MAX" if f.direction == MAX else "MIN"
        counts = (
            f"SELECT COUNT({self.index}) AS cnt FROM {self.table} "
            f"WHERE {member} GROUP BY {col}"
        )
        return (
            f"SELECT {col} FROM {self.table} WHERE {member} "
            f"GROUP BY {col} "
            f"HAVING COUNT({self.index}) = (SELECT {fn}(cnt) FROM ({counts}))"
        )

    def _compare_values(self, f: CompareValues) -> str:
        key = self.column(f.column_key)
        by = self.column(f.column_by)
        fn = "MAX" if f.direction == MAX else "MIN"
        vals = self.select_values(f.values)
        return (
            f"SELECT DISTINCT {key} FROM {self.table} "
            f"WHERE {key} IN ({vals}) "
            f"AND {by} = (SELECT {fn}({by}) FROM {self.table} "
            f"WHERE {key} IN ({vals}))"
        )

    # -- scalars -----------------------------------------------------------

    def select_scalar(self, f: Formula) -> str:
        if isinstance(f, Aggregate):
            if f.fn == "count" and _is_records(f.operand):
                pred = self.records_pred(f.operand)
                return (
                    f"SELECT COUNT({self.index}) FROM {self.table}"
                    f"{self._where(pred)}"
                )
            col = self.values_column(f.operand)
            fn = f.fn.upper()
            return f"SELECT {fn}({col}) FROM ({self.select_values(f.operand)})"
        if isinstance(f, SubValues):
            left = self._lookup_side(f.column_out, f.column_key, f.left)
            right = self._lookup_side(f.column_out, f.column_key, f.right)
            return f"SELECT ({left}) - ({right})"
        if isinstance(f, SubCounts):
            col = self.column(f.column)
            left = self.literal(f.left, f.column)
            right = self.literal(f.right, f.column)
            return (
                f"SELECT (SELECT COUNT({self.index}) FROM {self.table} "
                f"WHERE {col} = {left}) - "
                f"(SELECT COUNT({self.index}) FROM {self.table} "
                f"WHERE {col} = {right})"
            )
        raise UnsupportedNode(f"not a scalar formula: {f!r}")

    def _lookup_side(self, column_out: str, column_key: str, v: CellValue) -> str:
        out = self.column(column_out)
        key = self.column(column_key)
        lit = self.literal(v, column_key)
        return (
            f"SELECT {out} FROM {self.table} WHERE {self.index} IN "
            f"(SELECT {self.index} FROM {self.table} WHERE {key} = {lit})"
        )


def _is_records(f: Formula) -> bool:
    if isinstance(f, (AllRecords, Join, ArgmaxRecords)):
        return True
    if isinstance(f, (Union, Intersect)):
        return _is_records(f.left) and _is_records(f.right)
    return False


def _is_scalar(f: Formula) -> bool:
    return isinstance(f, (Aggregate, SubValues, SubCounts))


def to_sql(
    f: Formula, schema: SqlSchema, paper_faithful: bool = False
) -> str:
    """One executable SELECT statement computing f over the schema's table."""
    gen = _Generator(schema, paper_faithful)
    if _is_scalar(f):
        return gen.select_scalar(f)
    if _is_records(f):
        return gen.select_records(f)
    return gen.select_values(f)


def export_table_sql(table: Table, schema: SqlSchema | None = None) -> str:
    """CREATE TABLE plus one INSERT per row, record indices included."""
    schema = schema or schema_for_table(table)
    tname = quote_ident(schema.table_name)
    index = quote_ident(schema.index_column)
    type_names = {NUMERIC: "NUMERIC", DATE_TYPE: "TEXT", TEXT: "TEXT"}
    defs = [f"{index} INTEGER"]
    for c in schema.columns:
        defs.append(f"{quote_ident(c)} {type_names[schema.types[c]]}")
    lines = [f"CREATE TABLE {tname} ({', '.join(defs)});"]
    names = ", ".join([index] + [quote_ident(c) for c in schema.columns])
    for i in range(table.n_rows):
        vals = [str(i)]
        for c in schema.columns:
            cell = table.cell(i, c)
            ctype = schema.types[c]
            if ctype == NUMERIC:
                vals.append(_number_sql(cell.num))
            elif ctype == DATE_TYPE:
                vals.append(_escape_text(date_iso(cell)))
            else:
                vals.append(_escape_text(cell.render()))
        lines.append(
            f"INSERT INTO {tname} ({names}) VALUES ({', '.join(vals)});"
        )
    return "\n".join(lines) + "\n"
