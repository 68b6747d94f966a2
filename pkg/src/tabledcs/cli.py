"""Command line front door for the table query toolkit.

Subcommands evaluate formulas, print explanations, emit SQL, run the
random differential checker, serve the HTTP review workflow and drive
training and metrics over a dataset directory. Exit status is 0 on
success, 2 on user errors (bad formula text, missing files, unknown ids)
and 3 on internal failures.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .evaluator import Denotation, EvalError, evaluate
from .formula import FormulaError, parse_formula
from .fuzz import run_differential
from .highlight import HighlightConfig, SamplePolicy, highlight, render_html
from .provenance import mentioned_columns
from .rerank import (
    Hyperparams,
    ModelState,
    initial_model,
    load_model,
    save_model,
    train as train_model,
)
from .sqlgen import SqlSchema, UnsupportedNode, schema_for_table, to_sql
from .store import Dataset, DatasetError, build_instances, dataset_metrics
from .table import TableError, load_table
from .utterance import utter

USER_ERRORS = (
    FormulaError,
    TableError,
    EvalError,
    DatasetError,
    UnsupportedNode,
    FileNotFoundError,
    ValueError,
)


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _describe(d: Denotation) -> str:
    if d.kind == "records":
        rows = ", ".join(str(i) for i in sorted(d.records))
        return f"records: {rows}" if rows else "records: (none)"
    if d.kind == "values":
        vals = ", ".join(sorted(v.render() for v in d.values))
        return f"values: {vals}" if vals else "values: (none)"
    return f"scalar: {d.scalar.render()}"


@click.group()
def main() -> None:
    """Explain, execute and review table queries."""


@main.command("eval")
@click.argument("table_path", type=click.Path(path_type=Path))
@click.argument("formula_text")
def eval_cmd(table_path: Path, formula_text: str) -> None:
    """Evaluate FORMULA_TEXT against the table file and print the result."""
    try:
        table = load_table(table_path)
        f = parse_formula(formula_text)
        click.echo(_describe(evaluate(f, table)))
    except USER_ERRORS as e:
        _fail(str(e), 2)


@main.command("explain")
@click.argument("table_path", type=click.Path(path_type=Path))
@click.argument("formula_text")
@click.option(
    "--html",
    "html_path",
    type=click.Path(path_type=Path),
    default=Path("explanation.html"),
    show_default=True,
    help="Where to write the highlighted table page.",
)
@click.option(
    "--sample",
    type=click.Choice(["first", "random"]),
    default="first",
    show_default=True,
    help="Row sampling policy for large tables.",
)
@click.option("--seed", type=int, default=0, show_default=True)
def explain_cmd(
    table_path: Path, formula_text: str, html_path: Path, sample: str,
    seed: int,
) -> None:
    """Print the utterance for FORMULA_TEXT and write a highlight page."""
    try:
        table = load_table(table_path)
        f = parse_formula(formula_text)
        click.echo(utter(f))
        config = HighlightConfig(
            policy=SamplePolicy(kind=sample, seed=seed)
        )
        annotation = highlight(f, table, config)
        page = render_html(table, annotation, title=formula_text)
        html_path.write_text(page, encoding="utf-8")
        click.echo(f"wrote {html_path}")
    except USER_ERRORS as e:
        _fail(str(e), 2)


@main.command("to-sql")
@click.argument("formula_text")
@click.option(
    "--table",
    "table_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Table file used to derive column types; text types otherwise.",
)
@click.option(
    "--paper-faithful",
    is_flag=True,
    help="Emit the literal single-winner form for most-frequent values.",
)
def to_sql_cmd(
    formula_text: str, table_path: Path | None, paper_faithful: bool
) -> None:
    """Print the SQL translation of FORMULA_TEXT."""
    try:
        f = parse_formula(formula_text)
        if table_path is not None:
            schema = schema_for_table(load_table(table_path))
        else:
            columns = tuple(sorted(mentioned_columns(f)))
            schema = SqlSchema(
                columns=columns, types={c: "TEXT" for c in columns}
            )
        click.echo(to_sql(f, schema, paper_faithful=paper_faithful))
    except USER_ERRORS as e:
        _fail(str(e), 2)


@main.command("difftest")
@click.option("--cases", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--paper-faithful",
    is_flag=True,
    help="Check the single-winner most-frequent form instead.",
)
def difftest_cmd(cases: int, seed: int, paper_faithful: bool) -> None:
    """Compare formula evaluation with SQL execution on random tables."""
    report = run_differential(
        n_cases=cases, seed=seed, paper_faithful=paper_faithful
    )
    click.echo(report.summary())
    tie = [m for m in report.mismatches if m.most_frequent_tie]
    other = [m for m in report.mismatches if not m.most_frequent_tie]
    if paper_faithful and tie:
        click.echo(
            f"{len(tie)} divergences on most-frequent ties "
            "(expected for the single-winner form)"
        )
    for m in other[:5]:
        click.echo(f"MISMATCH {m.formula}\n  sql: {m.sql}", err=True)
    if other or (not paper_faithful and report.mismatches):
        _fail("differential check failed", 3)


@main.command("serve")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--data",
    "data_dir",
    type=click.Path(path_type=Path),
    default=Path("data"),
    show_default=True,
)
def serve_cmd(port: int, host: str, data_dir: Path) -> None:
    """Serve the review workflow over HTTP."""
    import uvicorn

    from .service import create_app

    try:
        app = create_app(data_dir)
    except USER_ERRORS as e:
        _fail(str(e), 2)
    uvicorn.run(app, host=host, port=port)


@main.command("train")
@click.option(
    "--data",
    "data_dir",
    type=click.Path(path_type=Path),
    default=Path("data"),
    show_default=True,
)
@click.option("--epochs", type=int, default=20, show_default=True)
@click.option("--lr", type=float, default=0.1, show_default=True)
@click.option("--l1", type=float, default=0.0, show_default=True)
def train_cmd(data_dir: Path, epochs: int, lr: float, l1: float) -> None:
    """Train the reranker on a dataset directory and save the checkpoint."""
    try:
        dataset = Dataset.open(data_dir)
        instances = build_instances(dataset)
        if not instances:
            _fail("no trainable questions in dataset", 2)
        hyper = Hyperparams(epochs=epochs, learning_rate=lr, l1=l1)
        result = train_model(instances, hyper)
        state = ModelState(
            theta=result.theta,
            accumulators=result.accumulators,
            epochs_trained=epochs,
            hyper=hyper,
        )
        save_model(dataset.model_path(), state)
        click.echo(
            json.dumps(
                {
                    "instances": len(instances),
                    "epochs": epochs,
                    "objective_first": result.history[0],
                    "objective_last": result.history[-1],
                    "model": str(dataset.model_path()),
                }
            )
        )
    except USER_ERRORS as e:
        _fail(str(e), 2)


@main.command("metrics")
@click.option(
    "--data",
    "data_dir",
    type=click.Path(path_type=Path),
    default=Path("data"),
    show_default=True,
)
def metrics_cmd(data_dir: Path) -> None:
    """Print ranking metrics for the dataset's current model."""
    try:
        dataset = Dataset.open(data_dir)
        model_path = dataset.model_path()
        model = (
            load_model(model_path) if model_path.exists() else initial_model()
        )
        click.echo(json.dumps(dataset_metrics(dataset, model.theta)))
    except USER_ERRORS as e:
        _fail(str(e), 2)


if __name__ == "__main__":
    main()
