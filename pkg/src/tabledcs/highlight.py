"""Visual highlight annotations derived from provenance chains.

A highlight paints each relevant cell with its strongest applicable style:
colored for answer cells, framed for cells examined along the way, lit for
the rest of the touched columns. Aggregates mark their column header. Large
tables are reduced to a few sampled rows, one per provenance level.
"""
from __future__ import annotations

import html
from dataclasses import dataclass, field
from random import Random

from .provenance import ProvenanceChain, provenance_chain, record_sets
from .table import Table, TableError
from .formula import Formula

COLORED = "colored"
FRAMED = "framed"
LIT = "lit"

STYLES = (COLORED, FRAMED, LIT)


class DanglingCellRef(TableError):
    """An annotation points at a cell the table does not have."""


@dataclass(frozen=True)
class SamplePolicy:
    """How to pick one row from a candidate set.

    kind "first" takes the lowest index; "random" draws with a fixed seed.
    """

    kind: str = "first"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("first", "random"):
            raise ValueError(f"unknown sample policy kind: {self.kind!r}")


@dataclass(frozen=True)
class HighlightConfig:
    sample_threshold: int = 50
    policy: SamplePolicy = field(default_factory=SamplePolicy)


@dataclass(frozen=True)
class HighlightAnnotation:
    """Strongest style per cell, header marks, optional row sample."""

    styles: dict
    header_marks: frozenset
    sampled_rows: tuple | None = None


def _pick(rows: set, policy: SamplePolicy, rng: Random) -> int:
    if policy.kind == "first":
        return min(rows)
    return rng.choice(sorted(rows))


def sample_rows(
    chain: ProvenanceChain, table: Table, policy: SamplePolicy | None = None
) -> tuple:
    """One representative row per provenance level, ascending.

    Levels: output rows, executed-but-not-output rows, remaining column
    rows. Difference formulas contribute one row per operand group instead
    of a single output pick, so up to four rows come back. Empty levels
    contribute nothing; duplicate picks collapse.
    """
    policy = policy or SamplePolicy()
    rng = Random(policy.seed)
    r_o, r_e, r_c = record_sets(chain, table)
    picks = []
    if chain.output_groups is not None:
        for group in chain.output_groups:
            rows = {c.row_index for c in group}
            if rows:
                picks.append(_pick(rows, policy, rng))
    elif r_o:
        picks.append(_pick(r_o, policy, rng))
    executed_only = r_e - r_o
    if executed_only:
        picks.append(_pick(executed_only, policy, rng))
    context_only = r_c - r_e
    if context_only:
        picks.append(_pick(context_only, policy, rng))
    return tuple(sorted(set(picks)))


def highlight(
    f: Formula, table: Table, config: HighlightConfig | None = None
) -> HighlightAnnotation:
    """Compute the highlight annotation of f on table.

    Styles overwrite weakest-first so each cell keeps only its strongest.
    Tables larger than the sampling threshold get a row sample attached.
    """
    config = config or HighlightConfig()
    chain = provenance_chain(f, table)
    styles: dict = {}
    for c in chain.column_cells:
        styles[c] = LIT
    for c in chain.executed_cells:
        styles[c] = FRAMED
    for c in chain.output_cells:
        styles[c] = COLORED
    sampled = None
    if table.n_rows > config.sample_threshold:
        sampled = sample_rows(chain, table, config.policy)
    return HighlightAnnotation(
        styles=styles,
        header_marks=chain.aggregate_marks,
        sampled_rows=sampled,
    )


# ---------------------------------------------------------------------------
# Serialization: the annotation document consumed by the review UI


def annotation_to_doc(a: HighlightAnnotation, table_id: str) -> dict:
    """Plain-data form of an annotation, deterministically ordered."""
    styles = [
        {"column": ref.column, "row": ref.row_index, "style": style}
        for ref, style in sorted(
            a.styles.items(), key=lambda kv: (kv[0].column, kv[0].row_index)
        )
    ]
    marks = [
        {"fn": fn, "column": column}
        for fn, column in sorted(a.header_marks)
    ]
    return {
        "table_id": table_id,
        "styles": styles,
        "header_marks": marks,
        "sampled_rows": list(a.sampled_rows)
        if a.sampled_rows is not None
        else None,
    }


def annotation_from_doc(doc: dict) -> HighlightAnnotation:
    from .table import CellRef

    styles = {}
    for item in doc["styles"]:
        if item["style"] not in STYLES:
            raise ValueError(f"unknown style: {item['style']!r}")
        styles[CellRef(item["column"], item["row"])] = item["style"]
    marks = frozenset(
        (item["fn"], item["column"]) for item in doc["header_marks"]
    )
    sampled = doc.get("sampled_rows")
    return HighlightAnnotation(
        styles=styles,
        header_marks=marks,
        sampled_rows=tuple(sampled) if sampled is not None else None,
    )


# ---------------------------------------------------------------------------
# HTML rendering

_CSS = """\
body { font-family: system-ui, sans-serif; margin: 1.5em; }
table.hl { border-collapse: collapse; }
table.hl th, table.hl td { border: 1px solid #b7b7b7; padding: 4px 10px; }
table.hl th { background: #f2f2f2; text-align: left; }
td.hl-lit { background: #ddebf7; }
td.hl-framed { background: #ddebf7; box-shadow: inset 0 0 0 3px #2e75b6; }
td.hl-colored { background: #2e75b6; color: #ffffff; }
p.hl-note { color: #555555; font-size: 0.9em; }
"""


def _check_annotation(table: Table, a: HighlightAnnotation) -> None:
    for ref in a.styles:
        if not table.has_column(ref.column):
            raise DanglingCellRef(f"no column {ref.column!r}")
        if not 0 <= ref.row_index < table.n_rows:
            raise DanglingCellRef(
                f"row {ref.row_index} outside table of {table.n_rows} rows"
            )
    for _fn, column in a.header_marks:
        if not table.has_column(column):
            raise DanglingCellRef(f"header mark on missing column {column!r}")
    if a.sampled_rows is not None:
        for i in a.sampled_rows:
            if not 0 <= i < table.n_rows:
                raise DanglingCellRef(f"sampled row {i} out of range")


def _header_text(column: str, marks: frozenset) -> str:
    fns = sorted(fn for fn, c in marks if c == column)
    if not fns:
        return column
    inner = column
    for fn in fns:
        inner = f"{fn.upper()}({inner})"
    return inner


def render_html(
    table: Table, a: HighlightAnnotation, title: str | None = None
) -> str:
    """Standalone HTML page showing the table with its highlight styles.

    Output is byte-deterministic for fixed inputs. When the annotation
    carries sampled rows, only those rows are shown, with a note giving the
    full row count.
    """
    _check_annotation(table, a)
    title = title if title is not None else table.name
    rows = (
        list(a.sampled_rows)
        if a.sampled_rows is not None
        else list(range(table.n_rows))
    )
    out = []
    out.append("<!DOCTYPE html>")
    out.append('<html lang="en">')
    out.append("<head>")
    out.append('<meta charset="utf-8">')
    out.append(f"<title>{html.escape(title)}</title>")
    out.append("<style>")
    out.append(_CSS.rstrip("\n"))
    out.append("</style>")
    out.append("</head>")
    out.append("<body>")
    if a.sampled_rows is not None:
        out.append(
            f'<p class="hl-note">Showing {len(rows)} of {table.n_rows} '
            "rows.</p>"
        )
    out.append('<table class="hl">')
    out.append("<thead>")
    cells = []
    for column in table.headers:
        cells.append(f"<th>{html.escape(_header_text(column, a.header_marks))}</th>")
    out.append("<tr>" + "".join(cells) + "</tr>")
    out.append("</thead>")
    out.append("<tbody>")
    from .table import CellRef

    for i in rows:
        cells = []
        for column in table.headers:
            style = a.styles.get(CellRef(column, i))
            text = html.escape(table.cell(i, column).render())
            if style is None:
                cells.append(f"<td>{text}</td>")
            else:
                cells.append(f'<td class="hl-{style}">{text}</td>')
        out.append(f'<tr data-row="{i}">' + "".join(cells) + "</tr>")
    out.append("</tbody>")
    out.append("</table>")
    out.append("</body>")
    out.append("</html>")
    return "\n".join(out) + "\n"
