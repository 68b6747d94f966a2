"""Regenerate the frozen golden files under tests/golden/.

Run as a script from the repository root:

    python3 tests/make_goldens.py

The worked-example corpus lives here as data. Every case names a demo table
and a formula; the golden file stores, per case, the evaluation result, the
provenance sets, the highlight annotation, the utterance and the SQL form.
Regenerated output must be reviewed by eye before committing, since the
tests compare against these files byte for byte.
"""
from __future__ import annotations

import json
from pathlib import Path

from tabledcs.demo import ALL_TABLES
from tabledcs.evaluator import evaluate
from tabledcs.formula import parse_formula
from tabledcs.highlight import HighlightConfig, annotation_to_doc, highlight, render_html
from tabledcs.provenance import ProvenanceChain, provenance_chain
from tabledcs.service import result_doc
from tabledcs.sqlgen import schema_for_table, to_sql
from tabledcs.utterance import utter

GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

# (id, table, formula) triples covering every operator once, plus the
# composed forms used throughout the docs: projection over argmax, fused
# differences, a conjunctive comparison band and one sampled large table.
WORKED_CASES = (
    ("overview-max-year-greece", "olympics", "max(R[Year].Country.Greece)"),
    ("records-by-value", "olympics", "City.Athens"),
    ("value-at-lowest-year", "olympics", "R[City].argmin(Record, Year)"),
    ("reverse-join", "olympics", "R[Year].City.Athens"),
    ("join", "yachts", "Name.Jule"),
    ("compare", "games", "Games.gt(4)"),
    ("compare-band", "games", "Games.(geq(5) n lt(17))"),
    ("prev-values", "olympics", "R[City].Prev.City.London"),
    ("next-values", "olympics", "R[City].R[Prev].City.Athens"),
    ("count-matching-rows", "olympics", "count(City.Athens)"),
    (
        "difference-of-values",
        "medals",
        "sub(R[Total].Nation.Fiji, R[Total].Nation.Tonga)",
    ),
    (
        "difference-of-counts",
        "temples",
        "sub(count(Town.Matsuyama), count(Town.Imabari))",
    ),
    ("union-join-values", "olympics", "R[City].Country.(China u Greece)"),
    ("intersect-joins", "olympics", "R[City].(Country.UK n Year.2012)"),
    (
        "highest-by-column",
        "olympics",
        "comparemax(London u Beijing, City, Year)",
    ),
    ("most-frequent-city", "olympics", "mostfreq(R[City].Record, City)"),
    ("league-last-year", "usl", "max(R[Year].League.'USL A-League')"),
    (
        "first-year-of-top-cup",
        "usl",
        "min(R[Year].argmax(Record, `Open Cup`))",
    ),
    (
        "huron-vs-erie-count",
        "ships",
        "sub(count(Lake.'Lake Huron'), count(Lake.'Lake Erie'))",
    ),
    (
        "huron-vs-superior-count",
        "ships",
        "sub(count(Lake.'Lake Huron'), count(Lake.'Lake Superior'))",
    ),
    (
        "count-deadliest-huron",
        "ships",
        "count(argmax(Lake.'Lake Huron', `Lives lost`))",
    ),
    (
        "top-growth-of-decade",
        "growth",
        "max(R[`Growth Rate`].Year.(geq(1980) n lt(1990)))",
    ),
)

# Formula/utterance pairs exercising each composition rule once. These need
# no table: some are fragments (a bare literal, a comparison) that only make
# sense inside a larger formula.
UTTERANCE_CASES = (
    "Athens",
    "leq(17)",
    "City.(Athens u London)",
    "R[Year].City.Athens",
    "R[Year].Prev.City.Athens",
    "count(City.Athens)",
    "max(R[Year].City.Athens)",
    "sub(R[Year].City.London, R[Year].City.Beijing)",
    "sub(count(City.Athens), count(City.London))",
    "China u Greece",
    "City.London n Country.UK",
    "argmax(Record, Year)",
    "R[Year].argmax(City.Athens, Index)",
    "mostfreq(Athens u London, City)",
    "comparemax(London u Beijing, City, Year)",
)

# The two full page renderings kept as byte-exact fixtures: one plain table,
# one large table reduced to sampled rows.
PAGE_CASES = (
    ("overview.html", "olympics", "max(R[Year].Country.Greece)"),
    (
        "growth-sample.html",
        "growth",
        "max(R[`Growth Rate`].Year.(geq(1980) n lt(1990)))",
    ),
)


def canonical_dump(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False, sort_keys=True) + "\n"


def _cell_list(cells) -> list:
    return [
        [c.column, c.row_index]
        for c in sorted(cells, key=lambda c: (c.column, c.row_index))
    ]


def chain_doc(chain: ProvenanceChain) -> dict:
    return {
        "output": _cell_list(chain.output_cells),
        "executed": _cell_list(chain.executed_cells),
        "columns": _cell_list(chain.column_cells),
        "marks": [list(m) for m in sorted(chain.aggregate_marks)],
        "groups": (
            [_cell_list(g) for g in chain.output_groups]
            if chain.output_groups is not None
            else None
        ),
    }


def compute_worked_case(case_id: str, table_id: str, formula_text: str) -> dict:
    table = ALL_TABLES[table_id]()
    f = parse_formula(formula_text)
    schema = schema_for_table(table)
    sql = to_sql(f, schema)
    sql_alt = to_sql(f, schema, paper_faithful=True)
    doc = {
        "id": case_id,
        "table": table_id,
        "formula": formula_text,
        "utterance": utter(f),
        "result": result_doc(evaluate(f, table)),
        "provenance": chain_doc(provenance_chain(f, table)),
        "highlight": annotation_to_doc(highlight(f, table), table_id),
        "sql": sql,
    }
    if sql_alt != sql:
        doc["sql_paper_faithful"] = sql_alt
    return doc


def worked_examples_doc(stored_cases=None) -> dict:
    triples = (
        [(c["id"], c["table"], c["formula"]) for c in stored_cases]
        if stored_cases is not None
        else WORKED_CASES
    )
    return {"cases": [compute_worked_case(*t) for t in triples]}


def utterances_doc(stored_cases=None) -> dict:
    texts = (
        [c["formula"] for c in stored_cases]
        if stored_cases is not None
        else UTTERANCE_CASES
    )
    return {
        "cases": [
            {"formula": text, "utterance": utter(parse_formula(text))}
            for text in texts
        ]
    }


def render_page(table_id: str, formula_text: str) -> str:
    table = ALL_TABLES[table_id]()
    f = parse_formula(formula_text)
    annotation = highlight(f, table, HighlightConfig())
    return render_html(table, annotation, title=formula_text)


def main() -> None:
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    (GOLDEN_DIR / "pages").mkdir(exist_ok=True)
    path = GOLDEN_DIR / "worked_examples.json"
    path.write_text(canonical_dump(worked_examples_doc()), encoding="utf-8")
    print(f"wrote {path}")
    path = GOLDEN_DIR / "utterances.json"
    path.write_text(canonical_dump(utterances_doc()), encoding="utf-8")
    print(f"wrote {path}")
    for name, table_id, formula_text in PAGE_CASES:
        path = GOLDEN_DIR / "pages" / name
        path.write_text(render_page(table_id, formula_text), encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
