"""Random tables, random formulas and a differential execution harness.

The table generator stays inside the envelope where the in-memory evaluator
and the generated SQL share semantics: every column is homogeneously typed,
text pools are single-case, dates carry full year-month-day precision,
comparison bounds match the column kind, and numbers have exact float
representations. Inside that envelope the two execution paths must agree
exactly; run_differential executes both on the same random inputs and
reports every disagreement.

quirky_table relaxes the naming rules (keyword headers, spaces, digit-like
text) to stress the concrete syntax instead; it is meant for parse/format
round-trips, not for SQL.
"""
from __future__ import annotations

import random
import sqlite3
import string
from dataclasses import dataclass, field

from .evaluator import (
    Denotation,
    EmptyAggregate,
    NonNumericAggregate,
    NonSingletonSub,
    evaluate,
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
    MIN,
    MostFrequent,
    NextValues,
    NumCompare,
    PrevValues,
    SubCounts,
    SubValues,
    Union,
    ValueLit,
    format_formula,
    subformulas,
)
from .sqlgen import SqlSchema, export_table_sql, schema_for_table, to_sql
from .table import (
    CellValue,
    DATE,
    NUMBER,
    TEXT,
    Table,
    date_value,
    number_value,
    text_value,
)

RESULT_SKIP_ERRORS = (EmptyAggregate, NonNumericAggregate, NonSingletonSub)


# ---------------------------------------------------------------------------
# Random tables


def random_word(rng: random.Random, min_len: int = 3, max_len: int = 8) -> str:
    n = rng.randint(min_len, max_len)
    letters = rng.choices(string.ascii_lowercase, k=n)
    return "".join(letters).capitalize()


def _distinct_words(rng: random.Random, count: int) -> list[str]:
    seen: set[str] = set()
    out = []
    while len(out) < count:
        w = random_word(rng)
        if w not in seen:
            seen.add(w)
            out.append(w)
    return out


def _number_pool(rng: random.Random, size: int) -> list[CellValue]:
    pool: set[float] = set()
    while len(pool) < size:
        x = float(rng.randint(-50, 9999))
        if rng.random() < 0.3:
            x += 0.5
        pool.add(x)
    return [number_value(x) for x in sorted(pool)]


def _date_pool(rng: random.Random, size: int) -> list[CellValue]:
    pool: set[tuple[int, int, int]] = set()
    while len(pool) < size:
        pool.add(
            (rng.randint(1950, 2030), rng.randint(1, 12), rng.randint(1, 28))
        )
    return [date_value(y, m, d) for y, m, d in sorted(pool)]


def _text_pool(rng: random.Random, size: int) -> list[CellValue]:
    return [text_value(w) for w in _distinct_words(rng, size)]


def random_table(
    rng: random.Random,
    min_rows: int = 2,
    max_rows: int = 12,
    max_cols: int = 5,
    name: str = "fuzz",
) -> Table:
    """Random homogeneously typed table with duplicate-friendly pools."""
    n_rows = rng.randint(min_rows, max_rows)
    n_cols = rng.randint(2, max_cols)
    words = _distinct_words(rng, n_cols * 2)
    headers = []
    for i in range(n_cols):
        h = words[2 * i]
        if rng.random() < 0.25:
            h = f"{h} {words[2 * i + 1]}"
        headers.append(h)
    columns = []
    for _ in range(n_cols):
        kind = rng.choices((NUMBER, TEXT, DATE), weights=(4, 4, 2))[0]
        pool_size = rng.randint(2, max(2, min(n_rows, 6)))
        if kind == NUMBER:
            pool = _number_pool(rng, pool_size)
        elif kind == DATE:
            pool = _date_pool(rng, pool_size)
        else:
            pool = _text_pool(rng, pool_size)
        columns.append([rng.choice(pool) for _ in range(n_rows)])
    rows = tuple(
        tuple(columns[c][r] for c in range(n_cols)) for r in range(n_rows)
    )
    return Table(name=name, headers=tuple(headers), rows=rows)


_QUIRKY_HEADER_STYLES = ("plain", "keyword", "spaced", "punctuated")


def quirky_table(rng: random.Random, max_rows: int = 8) -> Table:
    """Table with hostile names and literals for syntax round-trips.

    Headers may collide with grammar keywords or carry spaces; text cells
    may look like numbers or dates or contain apostrophes. Not suitable for
    the SQL differential.
    """
    n_rows = rng.randint(1, max_rows)
    n_cols = rng.randint(2, 4)
    headers: list[str] = []
    seen: set[str] = set()
    while len(headers) < n_cols:
        style = rng.choice(_QUIRKY_HEADER_STYLES)
        if style == "plain":
            h = random_word(rng)
        elif style == "keyword":
            h = rng.choice(("Index", "Record", "Prev", "sub", "count", "R"))
        elif style == "spaced":
            h = f"{random_word(rng)} {random_word(rng).lower()}"
        else:
            h = f"{random_word(rng)}-{rng.randint(1, 99)}"
        if h not in seen:
            seen.add(h)
            headers.append(h)
    columns = []
    for _ in range(n_cols):
        kind = rng.choices((NUMBER, TEXT, DATE), weights=(3, 5, 2))[0]
        pool = [_quirky_value(rng, kind) for _ in range(rng.randint(2, 4))]
        columns.append([rng.choice(pool) for _ in range(n_rows)])
    rows = tuple(
        tuple(columns[c][r] for c in range(n_cols)) for r in range(n_rows)
    )
    return Table(name="quirky", headers=tuple(headers), rows=rows)


def _quirky_value(rng: random.Random, kind: str) -> CellValue:
    if kind == NUMBER:
        style = rng.random()
        if style < 0.4:
            return number_value(rng.randint(-999, 9999))
        if style < 0.7:
            return number_value(rng.randint(0, 500) + 0.25)
        return number_value(rng.uniform(-1e6, 1e6))
    if kind == DATE:
        y, m = rng.randint(1800, 2100), rng.randint(1, 12)
        day = rng.randint(1, 28) if rng.random() < 0.7 else None
        return date_value(y, m, day)
    style = rng.random()
    if style < 0.4:
        return text_value(random_word(rng))
    if style < 0.6:
        return text_value(f"{random_word(rng)} {random_word(rng).lower()}")
    if style < 0.75:
        return text_value(str(rng.randint(0, 99999)))
    if style < 0.9:
        return text_value(f"{random_word(rng)}'{random_word(rng).lower()}")
    return text_value(f"{rng.randint(1, 31)} lost")


# ---------------------------------------------------------------------------
# Random formulas


def column_kind(table: Table, column: str) -> str:
    return table.cell(0, column).kind


def _columns_of_kind(table: Table, kind: str) -> list[str]:
    return [c for c in table.headers if column_kind(table, c) == kind]


def _fresh_value(rng: random.Random, kind: str) -> CellValue:
    if kind == NUMBER:
        return number_value(rng.randint(-60, 10050))
    if kind == DATE:
        return _date_pool(rng, 1)[0]
    return text_value(random_word(rng))


def _pool_value(rng: random.Random, table: Table, column: str) -> CellValue:
    """Mostly a value present in the column, sometimes an absent one."""
    if rng.random() < 0.8:
        return table.cell(rng.randrange(table.n_rows), column)
    return _fresh_value(rng, column_kind(table, column))


def _unique_key_value(
    rng: random.Random, table: Table, column: str
) -> CellValue:
    """Prefer values occurring exactly once; lookups on them stay singular."""
    counts: dict[CellValue, int] = {}
    for i in range(table.n_rows):
        v = table.cell(i, column)
        counts[v] = counts.get(v, 0) + 1
    unique = [v for v, c in counts.items() if c == 1]
    if unique and rng.random() < 0.9:
        return rng.choice(unique)
    return _pool_value(rng, table, column)


_COMPARE_OPS = ("gt", "lt", "geq", "leq")


def _random_predicate(
    rng: random.Random, table: Table, column: str, depth: int
) -> Formula:
    """Join value side: literals and comparisons under u/n."""
    kind = column_kind(table, column)

    def leaf() -> Formula:
        if kind != TEXT and rng.random() < 0.45:
            bound = _pool_value(rng, table, column)
            return NumCompare(rng.choice(_COMPARE_OPS), bound)
        return ValueLit(_pool_value(rng, table, column))

    if depth <= 0 or rng.random() < 0.65:
        return leaf()
    combine = Union if rng.random() < 0.5 else Intersect
    return combine(
        _random_predicate(rng, table, column, depth - 1),
        _random_predicate(rng, table, column, depth - 1),
    )


def random_records(rng: random.Random, table: Table, depth: int) -> Formula:
    if depth <= 0:
        if rng.random() < 0.3:
            return AllRecords()
        column = rng.choice(table.headers)
        return Join(column, ValueLit(_pool_value(rng, table, column)))
    pick = rng.random()
    if pick < 0.35:
        column = rng.choice(table.headers)
        return Join(column, _random_predicate(rng, table, column, 2))
    if pick < 0.55:
        return Union(
            random_records(rng, table, depth - 1),
            random_records(rng, table, depth - 1),
        )
    if pick < 0.7:
        return Intersect(
            random_records(rng, table, depth - 1),
            random_records(rng, table, depth - 1),
        )
    if pick < 0.9:
        direction = rng.choice((MAX, MIN))
        return ArgmaxRecords(
            direction,
            rng.choice(table.headers),
            random_records(rng, table, depth - 1),
        )
    return random_records(rng, table, 0)


def random_values(
    rng: random.Random, table: Table, depth: int, kind: str | None = None
) -> Formula:
    """Values formula whose members all share one cell kind."""
    if kind is None:
        kind = column_kind(table, rng.choice(table.headers))
    columns = _columns_of_kind(table, kind)
    if not columns:
        return ValueLit(_fresh_value(rng, kind))
    column = rng.choice(columns)
    if depth <= 0:
        if rng.random() < 0.2:
            return ValueLit(_pool_value(rng, table, column))
        return ColumnValues(column, random_records(rng, table, 0))
    pick = rng.random()
    if pick < 0.3:
        return ColumnValues(column, random_records(rng, table, depth - 1))
    if pick < 0.4:
        shape = PrevValues if rng.random() < 0.5 else NextValues
        return shape(column, random_records(rng, table, depth - 1))
    if pick < 0.55:
        return Union(
            random_values(rng, table, depth - 1, kind),
            random_values(rng, table, depth - 1, kind),
        )
    if pick < 0.65:
        direction = rng.choice((MAX, MIN))
        return ExtremeIndexValue(
            direction, column, random_records(rng, table, depth - 1)
        )
    if pick < 0.8:
        return _random_most_frequent(rng, table, column, depth)
    if pick < 0.95:
        return _random_compare_values(rng, table, column, depth)
    return random_values(rng, table, 0, kind)


def _random_most_frequent(
    rng: random.Random, table: Table, column: str, depth: int
) -> Formula:
    direction = rng.choice((MAX, MIN))
    if rng.random() < 0.6:
        values: Formula = ColumnValues(
            column, random_records(rng, table, depth - 1)
        )
    else:
        values = _literal_union(rng, table, column)
    return MostFrequent(direction, values, column)


def _random_compare_values(
    rng: random.Random, table: Table, column_key: str, depth: int
) -> Formula:
    direction = rng.choice((MAX, MIN))
    column_by = rng.choice(table.headers)
    if rng.random() < 0.7:
        values = _literal_union(rng, table, column_key)
    else:
        values = ColumnValues(column_key, random_records(rng, table, depth - 1))
    return CompareValues(direction, values, column_key, column_by)


def _literal_union(
    rng: random.Random, table: Table, column: str
) -> Formula:
    out: Formula = ValueLit(_pool_value(rng, table, column))
    for _ in range(rng.randint(0, 2)):
        out = Union(out, ValueLit(_pool_value(rng, table, column)))
    return out


def random_scalar(rng: random.Random, table: Table, depth: int) -> Formula:
    numeric = _columns_of_kind(table, NUMBER)
    pick = rng.random()
    if pick < 0.25:
        return Aggregate("count", random_records(rng, table, depth - 1))
    if pick < 0.4:
        return Aggregate("count", random_values(rng, table, depth - 1))
    if pick < 0.6:
        fn = rng.choice(("max", "min"))
        return Aggregate(fn, random_values(rng, table, depth - 1))
    if pick < 0.75 and numeric:
        fn = rng.choice(("sum", "avg"))
        return Aggregate(
            fn, random_values(rng, table, depth - 1, kind=NUMBER)
        )
    if pick < 0.9 and numeric:
        column_out = rng.choice(numeric)
        keys = [c for c in table.headers if c != column_out] or [column_out]
        column_key = rng.choice(keys)
        return SubValues(
            column_out=column_out,
            column_key=column_key,
            left=_unique_key_value(rng, table, column_key),
            right=_unique_key_value(rng, table, column_key),
        )
    column = rng.choice(table.headers)
    return SubCounts(
        column=column,
        left=_pool_value(rng, table, column),
        right=_pool_value(rng, table, column),
    )


def random_formula(
    rng: random.Random,
    table: Table,
    max_depth: int = 4,
    result_kind: str | None = None,
) -> Formula:
    """Well-typed random formula over the table's columns."""
    if result_kind is None:
        result_kind = rng.choices(
            ("records", "values", "scalar"), weights=(3, 4, 3)
        )[0]
    depth = rng.randint(1, max_depth)
    if result_kind == "records":
        return random_records(rng, table, depth)
    if result_kind == "values":
        return random_values(rng, table, depth)
    return random_scalar(rng, table, depth)


# ---------------------------------------------------------------------------
# Differential harness


def _norm_cell(v: CellValue):
    if v.kind == NUMBER:
        return round(v.num, 9)
    if v.kind == DATE:
        out = f"{v.year:04d}"
        if v.month is not None:
            out += f"-{v.month:02d}"
            if v.day is not None:
                out += f"-{v.day:02d}"
        return out
    return v.text.casefold()


def _norm_sql(x):
    if isinstance(x, (int, float)):
        return round(float(x), 9)
    return str(x).casefold()


def run_table_sql(table: Table, sql: str, schema: SqlSchema | None = None):
    """Execute one statement against a scratch database holding the table."""
    con = sqlite3.connect(":memory:")
    try:
        con.executescript(export_table_sql(table, schema))
        return con.execute(sql).fetchall()
    finally:
        con.close()


def denotation_matches(d: Denotation, sql_rows: list) -> bool:
    """Set-level agreement between the evaluator and raw SQL rows."""
    if d.kind == "records":
        return {r[0] for r in sql_rows} == set(d.records)
    if d.kind == "values":
        got = {_norm_sql(r[0]) for r in sql_rows if r[0] is not None}
        return got == {_norm_cell(v) for v in d.values}
    if not sql_rows or sql_rows[0][0] is None:
        return False
    return {_norm_sql(sql_rows[0][0])} == {_norm_cell(d.scalar)}


def has_most_frequent_tie(f: Formula, table: Table) -> bool:
    """Does any frequency superlative in f have several winners here?"""
    for g in subformulas(f):
        if isinstance(g, MostFrequent):
            try:
                winners = most_frequent_values(table, g)
            except RESULT_SKIP_ERRORS:
                continue
            if len(set(winners)) > 1:
                return True
    return False


@dataclass(frozen=True)
class Mismatch:
    formula: str
    sql: str
    table: Table
    expected: str
    got: str
    most_frequent_tie: bool


@dataclass
class DiffReport:
    requested: int
    executed: int = 0
    skipped: dict = field(default_factory=dict)
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.executed >= self.requested and not self.mismatches

    def summary(self) -> str:
        lines = [
            f"executed {self.executed} differential pairs, "
            f"{len(self.mismatches)} mismatches"
        ]
        for reason in sorted(self.skipped):
            lines.append(
                f"  skipped {self.skipped[reason]} ({reason}), replaced"
            )
        for m in self.mismatches[:10]:
            tie = " [tie]" if m.most_frequent_tie else ""
            lines.append(f"  MISMATCH{tie} {m.formula}")
            lines.append(f"    sql: {m.sql}")
            lines.append(f"    evaluator: {m.expected}  sql: {m.got}")
        return "\n".join(lines)


def _describe(d: Denotation) -> str:
    if d.kind == "records":
        return f"records {sorted(d.records)}"
    if d.kind == "values":
        return "values {" + ", ".join(
            sorted(v.render() for v in d.values)
        ) + "}"
    return f"scalar {d.scalar.render()}"


def run_differential(
    n_cases: int = 1000,
    seed: int = 0,
    paper_faithful: bool = False,
    max_rows: int = 12,
    max_cols: int = 5,
    max_depth: int = 4,
) -> DiffReport:
    """Random formulas executed by the evaluator and by SQLite, compared.

    Formulas whose evaluation raises a typed runtime error (empty
    aggregates, non-numeric sums, non-singular lookups) are skipped and
    replaced so the report always covers n_cases genuine comparisons.
    """
    rng = random.Random(seed)
    report = DiffReport(requested=n_cases)
    while report.executed < n_cases:
        table = random_table(rng, max_rows=max_rows, max_cols=max_cols)
        f = random_formula(rng, table, max_depth)
        try:
            d = evaluate(f, table)
        except RESULT_SKIP_ERRORS as e:
            name = type(e).__name__
            report.skipped[name] = report.skipped.get(name, 0) + 1
            continue
        schema = schema_for_table(table)
        sql = to_sql(f, schema, paper_faithful=paper_faithful)
        rows = run_table_sql(table, sql, schema)
        if not denotation_matches(d, rows):
            got = sorted(
                {str(r[0]) for r in rows if r[0] is not None}
            )
            report.mismatches.append(
                Mismatch(
                    formula=format_formula(f),
                    sql=sql,
                    table=table,
                    expected=_describe(d),
                    got="{" + ", ".join(got) + "}",
                    most_frequent_tie=has_most_frequent_tie(f, table),
                )
            )
        report.executed += 1
    return report
