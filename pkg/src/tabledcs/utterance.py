"""Natural-language utterances for formulas.

Each node kind has exactly one template; an utterance is the bottom-up
instantiation of the templates, so every child's utterance appears as a
contiguous substring of its parent's. Templates can be loaded from a JSON
file to reword them without touching code.
"""
from __future__ import annotations

import json
from pathlib import Path

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
    SubCounts,
    SubValues,
    Union,
    ValueLit,
)

DEFAULT_TEMPLATES: dict = {
    "value_lit": "{value}",
    "all_records": "rows",
    "compare_gt": "more than {value}",
    "compare_lt": "less than {value}",
    "compare_geq": "at least {value}",
    "compare_leq": "at most {value}",
    "predicate_or": "{left} or {right}",
    "predicate_and": "{left} and also {right}",
    "join": "rows where value of column {column} is {value}",
    "column_values": "values in column {column} in {records}",
    "prev_values": "values in column {column} in rows right above {records}",
    "next_values": "values in column {column} in rows right below {records}",
    "aggregate_count": "the number of {operand}",
    "aggregate_max": "maximum of {operand}",
    "aggregate_min": "minimum of {operand}",
    "aggregate_sum": "the sum of {operand}",
    "aggregate_avg": "the average of {operand}",
    "sub_values": (
        "difference in values of column {column_out} between rows where "
        "values of column {column_key} is {left} and {right}"
    ),
    "sub_counts": (
        "in column {column}, what is the difference between rows with "
        "value {left} and rows with value {right}"
    ),
    "union": "{left} or {right}",
    "intersect": "{left} and also {right}",
    "argmax_records_max": (
        "{records} that have the highest value in column {column}"
    ),
    "argmax_records_min": (
        "{records} that have the lowest value in column {column}"
    ),
    "extreme_index_max": (
        "values in column {column} in rows where it is the last row in "
        "{records}"
    ),
    "extreme_index_min": (
        "values in column {column} in rows where it is the first row in "
        "{records}"
    ),
    "most_frequent_max": (
        "the value of {values} that appears the most in column {column}"
    ),
    "most_frequent_min": (
        "the value of {values} that appears the least in column {column}"
    ),
    "compare_values_max": (
        "between {values} who has the highest value of column {column_by}"
    ),
    "compare_values_min": (
        "between {values} who has the lowest value of column {column_by}"
    ),
}


def load_templates(path: str | Path) -> dict:
    """Read a template set from JSON, filling gaps with the defaults."""
    with open(path, encoding="utf-8") as fp:
        loaded = json.load(fp)
    templates = dict(DEFAULT_TEMPLATES)
    for key, value in loaded.items():
        if key not in DEFAULT_TEMPLATES:
            raise KeyError(f"unknown template key: {key!r}")
        if not isinstance(value, str):
            raise TypeError(f"template {key!r} must be a string")
        templates[key] = value
    return templates


def _join_value_text(pred: Formula, templates: dict) -> str:
    if isinstance(pred, ValueLit):
        return pred.value.render()
    if isinstance(pred, NumCompare):
        return templates[f"compare_{pred.op}"].format(
            value=pred.bound.render()
        )
    if isinstance(pred, Union):
        return templates["predicate_or"].format(
            left=_join_value_text(pred.left, templates),
            right=_join_value_text(pred.right, templates),
        )
    if isinstance(pred, Intersect):
        return templates["predicate_and"].format(
            left=_join_value_text(pred.left, templates),
            right=_join_value_text(pred.right, templates),
        )
    raise TypeError(f"not a join value: {pred!r}")


def utter(f: Formula, templates: dict | None = None) -> str:
    """Deterministic NL description of a formula."""
    t = templates if templates is not None else DEFAULT_TEMPLATES
    if isinstance(f, ValueLit):
        return t["value_lit"].format(value=f.value.render())
    if isinstance(f, AllRecords):
        return t["all_records"]
    if isinstance(f, NumCompare):
        return t[f"compare_{f.op}"].format(value=f.bound.render())
    if isinstance(f, Join):
        return t["join"].format(
            column=f.column, value=_join_value_text(f.value, t)
        )
    if isinstance(f, ColumnValues):
        return t["column_values"].format(
            column=f.column, records=utter(f.records, t)
        )
    if isinstance(f, PrevValues):
        return t["prev_values"].format(
            column=f.column, records=utter(f.records, t)
        )
    if isinstance(f, NextValues):
        return t["next_values"].format(
            column=f.column, records=utter(f.records, t)
        )
    if isinstance(f, Aggregate):
        return t[f"aggregate_{f.fn}"].format(operand=utter(f.operand, t))
    if isinstance(f, SubValues):
        return t["sub_values"].format(
            column_out=f.column_out,
            column_key=f.column_key,
            left=f.left.render(),
            right=f.right.render(),
        )
    if isinstance(f, SubCounts):
        return t["sub_counts"].format(
            column=f.column, left=f.left.render(), right=f.right.render()
        )
    if isinstance(f, Union):
        return t["union"].format(
            left=utter(f.left, t), right=utter(f.right, t)
        )
    if isinstance(f, Intersect):
        return t["intersect"].format(
            left=utter(f.left, t), right=utter(f.right, t)
        )
    if isinstance(f, ArgmaxRecords):
        key = "argmax_records_max" if f.direction == MAX else "argmax_records_min"
        return t[key].format(records=utter(f.records, t), column=f.column)
    if isinstance(f, ExtremeIndexValue):
        key = "extreme_index_max" if f.direction == MAX else "extreme_index_min"
        return t[key].format(column=f.column, records=utter(f.records, t))
    if isinstance(f, MostFrequent):
        key = "most_frequent_max" if f.direction == MAX else "most_frequent_min"
        return t[key].format(values=utter(f.values, t), column=f.column)
    if isinstance(f, CompareValues):
        key = "compare_values_max" if f.direction == MAX else "compare_values_min"
        return t[key].format(values=utter(f.values, t), column_by=f.column_by)
    raise TypeError(f"not a formula node: {f!r}")


def utter_candidates(
    formulas: list, templates: dict | None = None
) -> list:
    return [utter(f, templates) for f in formulas]
