"""Formula language over single tables: AST, parser, printer, typing.

The language is set oriented. A formula denotes a set of values, a set of
records, or a scalar produced by aggregation or arithmetic difference.
Concrete syntax is dotted: ``Country.Greece`` selects records,
``R[Year].Country.Greece`` projects their Year cells, ``max(...)``,
``count(...)``, ``sub(a, b)``, ``argmax/argmin``, ``u`` / ``n`` for union and
intersection, ``gt/lt/geq/leq(bound)`` for comparison joins.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, fields as dc_fields

from .table import (
    CellValue,
    DATE,
    NUMBER,
    TEXT,
    Table,
    UnknownColumn,
    date_value,
    infer_value,
    number_value,
    text_value,
)


class FormulaError(Exception):
    pass


class FormulaSyntaxError(FormulaError):
    """Parse failure; ``offset`` is the byte offset into the source."""

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class ArityError(FormulaError):
    pass


class TypeMismatch(FormulaError):
    pass


VALUES = "values"
RECORDS = "records"
SCALAR = "scalar"

MAX = "max"
MIN = "min"

AGGREGATE_FNS = ("count", "max", "min", "sum", "avg")
COMPARE_OPS = {"gt": ">", "lt": "<", "geq": ">=", "leq": "<="}


class Formula:
    """Base class; all nodes are frozen dataclasses."""

    kind: str = ""


@dataclass(frozen=True)
class ValueLit(Formula):
    value: CellValue
    kind = "literal"


@dataclass(frozen=True)
class AllRecords(Formula):
    kind = "all_records"


@dataclass(frozen=True)
class NumCompare(Formula):
    op: str
    bound: CellValue
    kind = "num_compare"


@dataclass(frozen=True)
class Join(Formula):
    column: str
    value: Formula
    kind = "join"


@dataclass(frozen=True)
class ColumnValues(Formula):
    column: str
    records: Formula
    kind = "column_values"


@dataclass(frozen=True)
class PrevValues(Formula):
    column: str
    records: Formula
    kind = "prev_values"


@dataclass(frozen=True)
class NextValues(Formula):
    column: str
    records: Formula
    kind = "next_values"


@dataclass(frozen=True)
class Aggregate(Formula):
    fn: str
    operand: Formula
    kind = "aggregate"


@dataclass(frozen=True)
class SubValues(Formula):
    """Difference of two single values picked by key lookups.

    Reads column_out at the record where column_key equals left, minus the
    same at right.
    """

    column_out: str
    column_key: str
    left: CellValue
    right: CellValue
    kind = "sub_values"


@dataclass(frozen=True)
class SubCounts(Formula):
    """Difference of two row counts for two values of one column."""

    column: str
    left: CellValue
    right: CellValue
    kind = "sub_counts"


@dataclass(frozen=True)
class Union(Formula):
    left: Formula
    right: Formula
    kind = "union"


@dataclass(frozen=True)
class Intersect(Formula):
    left: Formula
    right: Formula
    kind = "intersect"


@dataclass(frozen=True)
class ArgmaxRecords(Formula):
    """Records achieving the extreme value of one column.

    ``records`` scopes the competition; AllRecords means the whole table.
    Ties all survive.
    """

    direction: str
    column: str
    records: Formula = AllRecords()
    kind = "argmax_records"


@dataclass(frozen=True)
class ExtremeIndexValue(Formula):
    """Column values of the positionally first or last record in a set."""

    direction: str
    column: str
    records: Formula
    kind = "extreme_index"


@dataclass(frozen=True)
class MostFrequent(Formula):
    """Values among ``values`` occurring most (or least) often in a column."""

    direction: str
    values: Formula
    column: str
    kind = "most_frequent"


@dataclass(frozen=True)
class CompareValues(Formula):
    """Which of ``values`` (looked up in column_key) has the extreme
    column_by value on its records."""

    direction: str
    values: Formula
    column_key: str
    column_by: str
    kind = "compare_values"


NODE_KINDS = (
    "literal", "all_records", "num_compare", "join", "column_values",
    "prev_values", "next_values", "aggregate", "sub_values", "sub_counts",
    "union", "intersect", "argmax_records", "extreme_index",
    "most_frequent", "compare_values",
)

_KEYWORDS = frozenset(
    ["R", "Record", "Index", "Prev", "u", "n", "sub", "argmax", "argmin",
     "mostfreq", "leastfreq", "comparemax", "comparemin"]
    + list(AGGREGATE_FNS)
    + list(COMPARE_OPS)
)

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUM_TOKEN_RE = re.compile(r"-?(?:\d+(?:\.\d+)?|\.\d+)(?:[eE][+-]?\d+)?")


# ---------------------------------------------------------------------------
# Tokenizer


@dataclass(frozen=True)
class _Token:
    kind: str  # ident, number, quoted, tquoted, backtick, punct, lam, end
    value: str
    pos: int  # character position; byte offset derived on error


def _byte_offset(src: str, pos: int) -> int:
    return len(src[:pos].encode("utf-8"))


def _tokenize(src: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c == "λ":
            tokens.append(_Token("lam", c, i))
            i += 1
            continue
        if src.startswith("||", i):
            tokens.append(_Token("punct", "u", i))
            i += 2
            continue
        if src.startswith("&&", i):
            tokens.append(_Token("punct", "n", i))
            i += 2
            continue
        if c in "()[].,":
            tokens.append(_Token("punct", c, i))
            i += 1
            continue
        if c == "'" or (c == "t" and i + 1 < n and src[i + 1] == "'"):
            forced = c == "t"
            j = i + (2 if forced else 1)
            buf = []
            while True:
                if j >= n:
                    raise FormulaSyntaxError(
                        "unterminated quoted literal", _byte_offset(src, i)
                    )
                if src[j] == "'":
                    if j + 1 < n and src[j + 1] == "'":
                        buf.append("'")
                        j += 2
                        continue
                    break
                buf.append(src[j])
                j += 1
            tokens.append(
                _Token("tquoted" if forced else "quoted", "".join(buf), i)
            )
            i = j + 1
            continue
        if c == "`":
            j = src.find("`", i + 1)
            if j < 0:
                raise FormulaSyntaxError(
                    "unterminated backtick column name", _byte_offset(src, i)
                )
            tokens.append(_Token("backtick", src[i + 1 : j], i))
            i = j + 1
            continue
        m = _NUM_TOKEN_RE.match(src, i)
        if m and (c.isdigit() or c == "." or c == "-"):
            tokens.append(_Token("number", m.group(), i))
            i = m.end()
            continue
        m = _IDENT_RE.match(src, i)
        if m:
            tokens.append(_Token("ident", m.group(), i))
            i = m.end()
            continue
        raise FormulaSyntaxError(
            f"unexpected character {c!r}", _byte_offset(src, i)
        )
    tokens.append(_Token("end", "", n))
    return tokens


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, src: str) -> None:
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0

    # token helpers

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        if tok.kind != "end":
            self.i += 1
        return tok

    def fail(self, message: str, tok: _Token | None = None) -> FormulaSyntaxError:
        tok = tok or self.peek()
        return FormulaSyntaxError(message, _byte_offset(self.src, tok.pos))

    def expect_punct(self, value: str) -> _Token:
        tok = self.next()
        if tok.kind != "punct" or tok.value != value:
            raise self.fail(f"expected {value!r}", tok)
        return tok

    # grammar

    def parse(self) -> Formula:
        f = self.union_expr()
        tok = self.peek()
        if tok.kind != "end":
            raise self.fail("trailing input after formula", tok)
        return f

    def union_expr(self) -> Formula:
        f = self.intersect_expr()
        while self._at_op("u"):
            self.next()
            f = Union(f, self.intersect_expr())
        return f

    def intersect_expr(self) -> Formula:
        f = self.term()
        while self._at_op("n"):
            self.next()
            f = Intersect(f, self.term())
        return f

    def _at_op(self, name: str) -> bool:
        tok = self.peek()
        if tok.kind == "punct" and tok.value == name:
            return True
        return tok.kind == "ident" and tok.value == name

    def term(self) -> Formula:
        tok = self.peek()
        if tok.kind == "punct" and tok.value == "(":
            self.next()
            f = self.union_expr()
            self.expect_punct(")")
            return f
        if tok.kind == "ident":
            word = tok.value
            if word in AGGREGATE_FNS:
                return self.aggregate()
            if word == "sub":
                return self.sub()
            if word in ("argmax", "argmin"):
                return self.argmax(reverse_column=None)
            if word in ("mostfreq", "leastfreq"):
                return self.most_frequent()
            if word in ("comparemax", "comparemin"):
                return self.compare_values()
            if word in COMPARE_OPS:
                return self.num_compare()
            if word == "R":
                return self.reverse()
            if word == "Record":
                self.next()
                return AllRecords()
            if word in ("Index", "Prev"):
                raise self.fail(f"{word!r} is not valid here", tok)
        return self.join_or_literal()

    def aggregate(self) -> Formula:
        fn = self.next().value
        self.expect_punct("(")
        operand = self.union_expr()
        self.expect_punct(")")
        return Aggregate(fn, operand)

    def sub(self) -> Formula:
        self.next()
        self.expect_punct("(")
        left = self.union_expr()
        self.expect_punct(",")
        right = self.union_expr()
        self.expect_punct(")")
        pair = _difference_shape(left, right)
        if pair is None:
            raise ArityError(
                "sub operands must be two key lookups on the same columns "
                "or two counts over the same column"
            )
        return pair

    def argmax(self, reverse_column: str | None) -> Formula:
        direction = MAX if self.next().value == "argmax" else MIN
        self.expect_punct("(")
        first = self.union_expr()
        self.expect_punct(",")
        second = self.peek()
        if second.kind == "ident" and second.value == "Index":
            self.next()
            self.expect_punct(")")
            if reverse_column is None:
                raise self.fail(
                    "positional superlative needs an R[column] prefix", second
                )
            return ExtremeIndexValue(direction, reverse_column, first)
        column = self._lambda_or_column()
        self.expect_punct(")")
        node: Formula = ArgmaxRecords(direction, column, first)
        if reverse_column is not None:
            node = ColumnValues(reverse_column, node)
        return node

    def _lambda_or_column(self) -> str:
        tok = self.peek()
        if tok.kind == "lam":
            self.next()
            var = self.next()
            if var.kind != "ident":
                raise self.fail("expected a variable name after λ", var)
            self.expect_punct("[")
            column = self.column_name()
            self.expect_punct(".")
            body_var = self.next()
            if body_var.kind != "ident" or body_var.value != var.value:
                raise self.fail(
                    f"lambda body must apply the column to {var.value!r}",
                    body_var,
                )
            self.expect_punct("]")
            return column
        return self.column_name()

    def most_frequent(self) -> Formula:
        direction = MAX if self.next().value == "mostfreq" else MIN
        self.expect_punct("(")
        values = self.union_expr()
        self.expect_punct(",")
        column = self.column_name()
        self.expect_punct(")")
        return MostFrequent(direction, values, column)

    def compare_values(self) -> Formula:
        direction = MAX if self.next().value == "comparemax" else MIN
        self.expect_punct("(")
        values = self.union_expr()
        self.expect_punct(",")
        column_key = self.column_name()
        self.expect_punct(",")
        column_by = self.column_name()
        self.expect_punct(")")
        return CompareValues(direction, values, column_key, column_by)

    def num_compare(self) -> NumCompare:
        op = self.next().value
        self.expect_punct("(")
        tok = self.peek()
        bound = self.literal_value()
        if bound.kind == TEXT:
            raise self.fail("comparison bound must be a number or date", tok)
        self.expect_punct(")")
        return NumCompare(op, bound)

    def reverse(self) -> Formula:
        self.next()  # R
        self.expect_punct("[")
        column = self.column_name()
        self.expect_punct("]")
        self.expect_punct(".")
        tok = self.peek()
        if tok.kind == "ident" and tok.value == "Prev":
            self.next()
            self.expect_punct(".")
            return PrevValues(column, self.records_term())
        if (
            tok.kind == "ident"
            and tok.value == "R"
            and self.peek(1).kind == "punct"
            and self.peek(1).value == "["
            and self.peek(2).kind == "ident"
            and self.peek(2).value == "Prev"
        ):
            self.next()
            self.expect_punct("[")
            self.next()
            self.expect_punct("]")
            self.expect_punct(".")
            return NextValues(column, self.records_term())
        if tok.kind == "ident" and tok.value in ("argmax", "argmin"):
            return self.argmax(reverse_column=column)
        return ColumnValues(column, self.records_term())

    def records_term(self) -> Formula:
        return self.term()

    def join_or_literal(self) -> Formula:
        tok = self.peek()
        if tok.kind in ("ident", "backtick") and (
            self.peek(1).kind == "punct" and self.peek(1).value == "."
        ):
            column = self.column_name()
            self.expect_punct(".")
            return Join(column, self.join_value())
        return ValueLit(self.literal_value())

    def join_value(self) -> Formula:
        tok = self.peek()
        if tok.kind == "ident" and tok.value in COMPARE_OPS:
            return self.num_compare()
        if tok.kind == "punct" and tok.value == "(":
            self.next()
            value = self.predicate_union()
            self.expect_punct(")")
            return value
        return ValueLit(self.literal_value())

    def predicate_union(self) -> Formula:
        value = self.predicate_intersect()
        while self._at_op("u"):
            self.next()
            value = Union(value, self.predicate_intersect())
        return value

    def predicate_intersect(self) -> Formula:
        value = self.predicate_atom()
        while self._at_op("n"):
            self.next()
            value = Intersect(value, self.predicate_atom())
        return value

    def predicate_atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "ident" and tok.value in COMPARE_OPS:
            return self.num_compare()
        if tok.kind == "punct" and tok.value == "(":
            self.next()
            value = self.predicate_union()
            self.expect_punct(")")
            return value
        return ValueLit(self.literal_value())

    def literal_value(self) -> CellValue:
        tok = self.next()
        if tok.kind == "number":
            return number_value(float(tok.value))
        if tok.kind == "quoted":
            return infer_value(tok.value)
        if tok.kind == "tquoted":
            return text_value(tok.value)
        if tok.kind == "ident":
            if tok.value in _KEYWORDS:
                raise self.fail(
                    f"{tok.value!r} is reserved; quote it to use as a value",
                    tok,
                )
            return text_value(tok.value)
        raise self.fail("expected a value", tok)

    def column_name(self) -> str:
        tok = self.next()
        if tok.kind == "backtick":
            return tok.value
        if tok.kind == "ident":
            if tok.value in _KEYWORDS:
                raise self.fail(
                    f"{tok.value!r} is reserved; use backticks for the column",
                    tok,
                )
            return tok.value
        raise self.fail("expected a column name", tok)


def parse_formula(src: str) -> Formula:
    """Parse concrete syntax into a Formula tree."""
    return _Parser(src).parse()


def _difference_shape(left: Formula, right: Formula) -> Formula | None:
    if (
        isinstance(left, ColumnValues)
        and isinstance(right, ColumnValues)
        and isinstance(left.records, Join)
        and isinstance(right.records, Join)
        and isinstance(left.records.value, ValueLit)
        and isinstance(right.records.value, ValueLit)
        and left.column == right.column
        and left.records.column == right.records.column
    ):
        return SubValues(
            column_out=left.column,
            column_key=left.records.column,
            left=left.records.value.value,
            right=right.records.value.value,
        )
    if (
        isinstance(left, Aggregate)
        and isinstance(right, Aggregate)
        and left.fn == "count"
        and right.fn == "count"
        and isinstance(left.operand, Join)
        and isinstance(right.operand, Join)
        and isinstance(left.operand.value, ValueLit)
        and isinstance(right.operand.value, ValueLit)
        and left.operand.column == right.operand.column
    ):
        return SubCounts(
            column=left.operand.column,
            left=left.operand.value.value,
            right=right.operand.value.value,
        )
    return None


# ---------------------------------------------------------------------------
# Printer


def _format_column(name: str) -> str:
    if _IDENT_RE.fullmatch(name) and name not in _KEYWORDS:
        return name
    if "`" in name:
        raise ValueError(f"column name not expressible in syntax: {name!r}")
    return f"`{name}`"


def _format_literal(v: CellValue) -> str:
    if v.kind == NUMBER:
        return v.render()
    if v.kind == DATE:
        return "'" + v.render().replace("'", "''") + "'"
    text = v.text
    if _IDENT_RE.fullmatch(text) and text not in _KEYWORDS:
        return text
    quoted = "'" + text.replace("'", "''") + "'"
    if infer_value(text).kind != TEXT:
        return "t" + quoted
    return quoted


def _format_term(f: Formula) -> str:
    s = format_formula(f)
    if isinstance(f, (Union, Intersect)):
        return f"({s})"
    return s


def format_formula(f: Formula) -> str:
    """Canonical text for a formula; parse_formula inverts it."""
    if isinstance(f, ValueLit):
        return _format_literal(f.value)
    if isinstance(f, AllRecords):
        return "Record"
    if isinstance(f, NumCompare):
        return f"{f.op}({_format_literal(f.bound)})"
    if isinstance(f, Join):
        if isinstance(f.value, (Union, Intersect)):
            return f"{_format_column(f.column)}.({format_formula(f.value)})"
        return f"{_format_column(f.column)}.{format_formula(f.value)}"
    if isinstance(f, ColumnValues):
        return f"R[{_format_column(f.column)}].{_format_term(f.records)}"
    if isinstance(f, PrevValues):
        return f"R[{_format_column(f.column)}].Prev.{_format_term(f.records)}"
    if isinstance(f, NextValues):
        return f"R[{_format_column(f.column)}].R[Prev].{_format_term(f.records)}"
    if isinstance(f, Aggregate):
        return f"{f.fn}({format_formula(f.operand)})"
    if isinstance(f, SubValues):
        c1, c2 = _format_column(f.column_out), _format_column(f.column_key)
        return (
            f"sub(R[{c1}].{c2}.{_format_literal(f.left)}, "
            f"R[{c1}].{c2}.{_format_literal(f.right)})"
        )
    if isinstance(f, SubCounts):
        c = _format_column(f.column)
        return (
            f"sub(count({c}.{_format_literal(f.left)}), "
            f"count({c}.{_format_literal(f.right)}))"
        )
    if isinstance(f, Union):
        left = format_formula(f.left)
        right = (
            f"({format_formula(f.right)})"
            if isinstance(f.right, Union)
            else format_formula(f.right)
        )
        return f"{left} u {right}"
    if isinstance(f, Intersect):
        left = (
            f"({format_formula(f.left)})"
            if isinstance(f.left, Union)
            else format_formula(f.left)
        )
        right = format_formula(f.right)
        if isinstance(f.right, (Union, Intersect)):
            right = f"({right})"
        return f"{left} n {right}"
    if isinstance(f, ArgmaxRecords):
        name = "argmax" if f.direction == MAX else "argmin"
        if isinstance(f.records, AllRecords):
            return f"{name}(Record, {_format_column(f.column)})"
        return f"{name}({format_formula(f.records)}, {_format_column(f.column)})"
    if isinstance(f, ExtremeIndexValue):
        name = "argmax" if f.direction == MAX else "argmin"
        return (
            f"R[{_format_column(f.column)}]."
            f"{name}({format_formula(f.records)}, Index)"
        )
    if isinstance(f, MostFrequent):
        name = "mostfreq" if f.direction == MAX else "leastfreq"
        return f"{name}({format_formula(f.values)}, {_format_column(f.column)})"
    if isinstance(f, CompareValues):
        name = "comparemax" if f.direction == MAX else "comparemin"
        return (
            f"{name}({format_formula(f.values)}, "
            f"{_format_column(f.column_key)}, {_format_column(f.column_by)})"
        )
    raise TypeError(f"not a formula node: {f!r}")


# ---------------------------------------------------------------------------
# Structure


def decompose(f: Formula) -> list[Formula]:
    """Direct subqueries of a formula; empty for atomic nodes.

    Fused difference nodes expand to the two lookups they abbreviate.
    """
    if isinstance(f, (ValueLit, AllRecords, NumCompare)):
        return []
    if isinstance(f, Join):
        return [f.value]
    if isinstance(f, (ColumnValues, PrevValues, NextValues)):
        return [f.records]
    if isinstance(f, Aggregate):
        return [f.operand]
    if isinstance(f, SubValues):
        return [
            ColumnValues(f.column_out, Join(f.column_key, ValueLit(f.left))),
            ColumnValues(f.column_out, Join(f.column_key, ValueLit(f.right))),
        ]
    if isinstance(f, SubCounts):
        return [
            Aggregate("count", Join(f.column, ValueLit(f.left))),
            Aggregate("count", Join(f.column, ValueLit(f.right))),
        ]
    if isinstance(f, (Union, Intersect)):
        return [f.left, f.right]
    if isinstance(f, (ArgmaxRecords, ExtremeIndexValue)):
        return [f.records]
    if isinstance(f, (MostFrequent, CompareValues)):
        return [f.values]
    raise TypeError(f"not a formula node: {f!r}")


def subformulas(f: Formula) -> list[Formula]:
    """The formula plus the transitive closure of decompose, preorder."""
    out = [f]
    for child in decompose(f):
        out.extend(subformulas(child))
    return out


def _check_column(table: Table, column: str) -> None:
    if not table.has_column(column):
        raise UnknownColumn(f"table {table.name!r} has no column {column!r}")


def _check_predicate(v: Formula) -> None:
    """Join values are literals and comparisons combined with u / n."""
    if isinstance(v, ValueLit):
        return
    if isinstance(v, NumCompare):
        if v.bound.kind == TEXT:
            raise TypeMismatch("comparison bound must be a number or date")
        return
    if isinstance(v, (Union, Intersect)):
        _check_predicate(v.left)
        _check_predicate(v.right)
        return
    raise TypeMismatch(
        "join expects literals and comparisons combined with u/n"
    )


def typecheck(f: Formula, table: Table) -> str:
    """Result type of f over table: values, records or scalar.

    Raises UnknownColumn for missing columns and TypeMismatch for ill-typed
    composition.
    """
    if isinstance(f, ValueLit):
        return VALUES
    if isinstance(f, AllRecords):
        return RECORDS
    if isinstance(f, NumCompare):
        raise TypeMismatch("comparison clause is only valid inside a join")
    if isinstance(f, Join):
        _check_column(table, f.column)
        _check_predicate(f.value)
        return RECORDS
    if isinstance(f, (ColumnValues, PrevValues, NextValues)):
        _check_column(table, f.column)
        if typecheck(f.records, table) != RECORDS:
            raise TypeMismatch("column projection needs a record set")
        return VALUES
    if isinstance(f, Aggregate):
        t = typecheck(f.operand, table)
        if f.fn == "count":
            if t == SCALAR:
                raise TypeMismatch("count cannot aggregate a scalar")
        elif t != VALUES:
            raise TypeMismatch(f"{f.fn} needs a value set")
        return SCALAR
    if isinstance(f, SubValues):
        _check_column(table, f.column_out)
        _check_column(table, f.column_key)
        return SCALAR
    if isinstance(f, SubCounts):
        _check_column(table, f.column)
        return SCALAR
    if isinstance(f, Union):
        lt, rt = typecheck(f.left, table), typecheck(f.right, table)
        if lt != rt or lt == SCALAR:
            raise TypeMismatch("union sides must both be values or records")
        return lt
    if isinstance(f, Intersect):
        lt, rt = typecheck(f.left, table), typecheck(f.right, table)
        if lt != RECORDS or rt != RECORDS:
            raise TypeMismatch("intersection requires record sets")
        return RECORDS
    if isinstance(f, ArgmaxRecords):
        _check_column(table, f.column)
        if typecheck(f.records, table) != RECORDS:
            raise TypeMismatch("superlative scope must be a record set")
        return RECORDS
    if isinstance(f, ExtremeIndexValue):
        _check_column(table, f.column)
        if typecheck(f.records, table) != RECORDS:
            raise TypeMismatch("positional superlative needs a record set")
        return VALUES
    if isinstance(f, MostFrequent):
        _check_column(table, f.column)
        if typecheck(f.values, table) != VALUES:
            raise TypeMismatch("frequency superlative needs a value set")
        return VALUES
    if isinstance(f, CompareValues):
        _check_column(table, f.column_key)
        _check_column(table, f.column_by)
        if typecheck(f.values, table) != VALUES:
            raise TypeMismatch("value comparison needs a value set")
        return VALUES
    raise TypeError(f"not a formula node: {f!r}")


# ---------------------------------------------------------------------------
# Serialization (one object per node, for the service API)


def _value_to_dict(v: CellValue) -> dict:
    if v.kind == TEXT:
        return {"kind": TEXT, "text": v.text}
    if v.kind == NUMBER:
        return {"kind": NUMBER, "num": v.num}
    return {"kind": DATE, "year": v.year, "month": v.month, "day": v.day}


def _value_from_dict(d: dict) -> CellValue:
    if d["kind"] == TEXT:
        return text_value(d["text"])
    if d["kind"] == NUMBER:
        return number_value(d["num"])
    return date_value(d["year"], d.get("month"), d.get("day"))


def formula_to_dict(f: Formula) -> dict:
    """Structured form: {"kind": ..., fields...} with nested children."""
    out: dict = {"kind": f.kind}
    for fld in dc_fields(f):
        v = getattr(f, fld.name)
        if isinstance(v, Formula):
            out[fld.name] = formula_to_dict(v)
        elif isinstance(v, CellValue):
            out[fld.name] = _value_to_dict(v)
        else:
            out[fld.name] = v
    return out


_KIND_TO_CLASS = {
    "literal": ValueLit,
    "all_records": AllRecords,
    "num_compare": NumCompare,
    "join": Join,
    "column_values": ColumnValues,
    "prev_values": PrevValues,
    "next_values": NextValues,
    "aggregate": Aggregate,
    "sub_values": SubValues,
    "sub_counts": SubCounts,
    "union": Union,
    "intersect": Intersect,
    "argmax_records": ArgmaxRecords,
    "extreme_index": ExtremeIndexValue,
    "most_frequent": MostFrequent,
    "compare_values": CompareValues,
}


def formula_from_dict(d: dict) -> Formula:
    cls = _KIND_TO_CLASS[d["kind"]]
    kwargs = {}
    for fld in dc_fields(cls):
        raw = d[fld.name]
        if isinstance(raw, dict) and "kind" in raw and raw["kind"] in _KIND_TO_CLASS:
            kwargs[fld.name] = formula_from_dict(raw)
        elif isinstance(raw, dict) and raw.get("kind") in (TEXT, NUMBER, DATE):
            kwargs[fld.name] = _value_from_dict(raw)
        else:
            kwargs[fld.name] = raw
    return cls(**kwargs)
