"""Render explanation pages for every question in a dataset directory.

For each question this writes one HTML page per candidate under the output
directory and prints the utterance line next to its formula, giving a quick
browsable gallery of what reviewers would see.
"""
import argparse
from pathlib import Path

from tabledcs.evaluator import EvalError, evaluate
from tabledcs.formula import FormulaError, parse_formula
from tabledcs.highlight import highlight, render_html
from tabledcs.store import Dataset
from tabledcs.table import TableError
from tabledcs.utterance import utter


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", type=Path, default=Path("data"))
    ap.add_argument("--out", type=Path, default=Path("explanations"))
    args = ap.parse_args()

    dataset = Dataset.open(args.data)
    args.out.mkdir(parents=True, exist_ok=True)
    pages = 0
    for q in dataset.questions:
        table = dataset.registry.get(q.table_id)
        print(f"\n{q.question_id}: {q.question}")
        for pos, text in enumerate(q.candidates):
            try:
                f = parse_formula(text)
                evaluate(f, table)
            except (FormulaError, TableError, EvalError) as e:
                print(f"  [{pos}] {text}")
                print(f"      (no page: {e})")
                continue
            print(f"  [{pos}] {utter(f)}")
            page = render_html(table, highlight(f, table), title=text)
            target = args.out / f"{q.question_id}-{pos}.html"
            target.write_text(page, encoding="utf-8")
            pages += 1
    print(f"\nwrote {pages} pages under {args.out}")


if __name__ == "__main__":
    main()
