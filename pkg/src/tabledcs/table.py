"""Immutable single-table data model with typed cells.

A table is an ordered list of records. Records keep their top-to-bottom file
order and are addressed by a gapless integer index starting at 0, so "the row
above" is always index - 1. Every cell holds a CellValue: text, a finite
number, or a calendar date.
"""
from __future__ import annotations

import csv
import datetime
import re
from dataclasses import dataclass, field
from pathlib import Path


class TableError(Exception):
    """Base class for table loading and access errors."""


class EmptyTable(TableError):
    pass


class DuplicateHeader(TableError):
    pass


class MalformedRow(TableError):
    pass


class UnknownColumn(TableError):
    pass


TEXT = "text"
NUMBER = "number"
DATE = "date"

_MONTH_NAMES = (
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
)
_MONTH_INDEX: dict[str, int] = {}
for _i, _name in enumerate(_MONTH_NAMES, start=1):
    _MONTH_INDEX[_name.lower()] = _i
    _MONTH_INDEX[_name[:3].lower()] = _i

# Thousands separators only in full groups of three; exponent accepted so that
# render() output always re-parses as a number.
_NUMBER_RE = re.compile(
    r"[+-]?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?(?:[eE][+-]?\d+)?"
    r"|[+-]?\.\d+(?:[eE][+-]?\d+)?"
)
_ISO_DATE_RE = re.compile(r"(\d{4})-(\d{1,2})-(\d{1,2})")
_NAMED_DATE_RE = re.compile(r"([A-Za-z]+)\.? (\d{1,2}),? (\d{4})")
_MONTH_YEAR_RE = re.compile(r"([A-Za-z]+)\.? (\d{4})")


@dataclass(frozen=True)
class CellValue:
    """One typed cell value.

    Exactly one variant is populated, chosen by ``kind``:

    - text: ``text`` holds the trimmed string.
    - number: ``num`` holds a finite float (never NaN or inf).
    - date: ``year`` always set; ``month``/``day`` optional, ``day`` only
      together with ``month``.

    Equality and hashing are semantic: text compares casefolded, numbers
    numerically, dates by calendar position. Variants never equal each other.
    """

    kind: str
    text: str = ""
    num: float = 0.0
    year: int = 0
    month: int | None = None
    day: int | None = None

    def __post_init__(self) -> None:
        if self.kind == NUMBER:
            if self.num != self.num or self.num in (float("inf"), float("-inf")):
                raise ValueError("numbers must be finite")
        elif self.kind == DATE:
            if self.day is not None and self.month is None:
                raise ValueError("day requires month")
            if self.month is not None:
                datetime.date(self.year, self.month, self.day or 1)
        elif self.kind != TEXT:
            raise ValueError(f"unknown cell kind: {self.kind!r}")

    def _key(self):
        if self.kind == TEXT:
            return (TEXT, self.text.casefold())
        if self.kind == NUMBER:
            return (NUMBER, self.num)
        return (DATE, self.year, self.month, self.day)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CellValue):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def render(self) -> str:
        """Canonical text form; infer_value(render(v)) == v.

        Year-only dates are the one exception: a bare year string always
        parses as a number, so they fall back to the year digits. The loader
        never produces year-only dates.
        """
        if self.kind == TEXT:
            return self.text
        if self.kind == NUMBER:
            if self.num == int(self.num) and abs(self.num) < 1e16:
                return str(int(self.num))
            return repr(self.num)
        if self.month is None:
            return str(self.year)
        # zero-pad so pre-1000 years still match the 4-digit date patterns
        if self.day is None:
            return f"{_MONTH_NAMES[self.month - 1]} {self.year:04d}"
        return f"{_MONTH_NAMES[self.month - 1]} {self.day} {self.year:04d}"

    def date_sort_key(self) -> tuple[int, int, int]:
        return (self.year, self.month or 0, self.day or 0)


def text_value(s: str) -> CellValue:
    return CellValue(kind=TEXT, text=s.strip())


def number_value(x: float) -> CellValue:
    return CellValue(kind=NUMBER, num=float(x))


def date_value(year: int, month: int | None = None, day: int | None = None) -> CellValue:
    return CellValue(kind=DATE, year=year, month=month, day=day)


def infer_value(raw: str) -> CellValue:
    """Type a raw cell string: number, then date, then trimmed text.

    Total: never raises. Bare 4-digit years stay numbers. Thousands
    separators ("6,260") are stripped. Date forms: 2013-06-08,
    June 8 2013, June 8, 2013, June 2013 (month names or 3-letter forms).
    """
    s = raw.strip()
    m = _NUMBER_RE.fullmatch(s)
    if m:
        return number_value(float(s.replace(",", "")))
    m = _ISO_DATE_RE.fullmatch(s)
    if m:
        y, mo, d = int(m.group(1)), int(m.group(2)), int(m.group(3))
        if _valid_date(y, mo, d):
            return date_value(y, mo, d)
        return CellValue(kind=TEXT, text=s)
    m = _NAMED_DATE_RE.fullmatch(s)
    if m and m.group(1).lower() in _MONTH_INDEX:
        y, mo, d = int(m.group(3)), _MONTH_INDEX[m.group(1).lower()], int(m.group(2))
        if _valid_date(y, mo, d):
            return date_value(y, mo, d)
        return CellValue(kind=TEXT, text=s)
    m = _MONTH_YEAR_RE.fullmatch(s)
    if m and m.group(1).lower() in _MONTH_INDEX:
        return date_value(int(m.group(2)), _MONTH_INDEX[m.group(1).lower()], None)
    return CellValue(kind=TEXT, text=s)


def _valid_date(y: int, mo: int, d: int) -> bool:
    try:
        datetime.date(y, mo, d)
    except ValueError:
        return False
    return True


def compare_values(a: CellValue, b: CellValue) -> int:
    """Total comparison: -1, 0 or 1.

    Same-variant pairs compare natively (numbers numerically, dates
    chronologically, text by casefolded code points). Mixed variants fall
    back to comparing canonical renderings.
    """
    if a.kind == b.kind:
        if a.kind == NUMBER:
            return (a.num > b.num) - (a.num < b.num)
        if a.kind == DATE:
            ka, kb = a.date_sort_key(), b.date_sort_key()
            return (ka > kb) - (ka < kb)
        ta, tb = a.text.casefold(), b.text.casefold()
        return (ta > tb) - (ta < tb)
    ra, rb = a.render().casefold(), b.render().casefold()
    return (ra > rb) - (ra < rb)


@dataclass(frozen=True, order=True)
class CellRef:
    """Address of one cell: column name plus record index."""

    column: str
    row_index: int


@dataclass(frozen=True)
class Table:
    """Named table with unique headers and index-ordered records."""

    name: str
    headers: tuple[str, ...]
    rows: tuple[tuple[CellValue, ...], ...]
    _column_index: dict[str, int] = field(
        default_factory=dict, compare=False, repr=False
    )

    def __post_init__(self) -> None:
        if not self.headers:
            raise EmptyTable(f"table {self.name!r} has no columns")
        if len(set(self.headers)) != len(self.headers):
            raise DuplicateHeader(f"table {self.name!r} repeats a header")
        for i, row in enumerate(self.rows):
            if len(row) != len(self.headers):
                raise MalformedRow(
                    f"table {self.name!r} row {i} has {len(row)} cells, "
                    f"expected {len(self.headers)}"
                )
        self._column_index.update({h: i for i, h in enumerate(self.headers)})

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def column_position(self, column: str) -> int:
        try:
            return self._column_index[column]
        except KeyError:
            raise UnknownColumn(
                f"table {self.name!r} has no column {column!r}"
            ) from None

    def has_column(self, column: str) -> bool:
        return column in self._column_index

    def cell(self, row_index: int, column: str) -> CellValue:
        return self.rows[row_index][self.column_position(column)]

    def cell_at(self, ref: CellRef) -> CellValue:
        return self.cell(ref.row_index, ref.column)


def table_from_strings(
    name: str, headers: list[str], rows: list[list[str]]
) -> Table:
    """Build a table from raw strings, typing every cell."""
    clean = [_sanitize_header(h) for h in headers]
    return Table(
        name=name,
        headers=tuple(clean),
        rows=tuple(tuple(infer_value(c) for c in row) for row in rows),
    )


def _sanitize_header(h: str) -> str:
    return " ".join(h.split())


def load_table(path: str | Path, fmt: str | None = None) -> Table:
    """Load a TSV or CSV file into a Table.

    fmt is "tsv" or "csv"; when omitted the file suffix decides. TSV cells
    are split on literal tabs with no quoting; CSV follows the usual quoting
    rules.
    """
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "tsv"
    if fmt not in ("tsv", "csv"):
        raise ValueError(f"unknown table format: {fmt!r}")
    text = path.read_text(encoding="utf-8")
    if fmt == "tsv":
        lines = text.splitlines()
        records = [line.split("\t") for line in lines if line != ""]
    else:
        records = [row for row in csv.reader(text.splitlines()) if row]
    if not records:
        raise EmptyTable(f"{path} is empty")
    headers = [_sanitize_header(h) for h in records[0]]
    if not any(headers):
        raise EmptyTable(f"{path} has a blank header row")
    if len(set(headers)) != len(headers):
        raise DuplicateHeader(f"{path} repeats a header after sanitizing")
    width = len(headers)
    rows = []
    for lineno, rec in enumerate(records[1:], start=2):
        if len(rec) != width:
            raise MalformedRow(
                f"{path} line {lineno}: {len(rec)} cells, expected {width}"
            )
        rows.append(rec)
    return table_from_strings(path.stem, headers, rows)


def column_cells(table: Table, column: str) -> list[CellRef]:
    """All cell refs of one column, top to bottom."""
    table.column_position(column)
    return [CellRef(column, i) for i in range(table.n_rows)]
