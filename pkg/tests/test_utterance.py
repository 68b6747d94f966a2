"""Template-driven question phrasing.

The literal pins below are typed out by hand on purpose: they freeze the
reference phrasing for each operator independently of the golden files.
"""
import json

import pytest

from tabledcs.formula import parse_formula
from tabledcs.utterance import (
    DEFAULT_TEMPLATES,
    load_templates,
    utter,
    utter_candidates,
)


def say(src, templates=None):
    return utter(parse_formula(src), templates)


@pytest.mark.parametrize(
    "src, expected",
    [
        ("Athens", "Athens"),
        ("leq(17)", "at most 17"),
        (
            "City.(Athens u London)",
            "rows where value of column City is Athens or London",
        ),
        (
            "R[Year].City.Athens",
            "values in column Year in rows where value of column City is "
            "Athens",
        ),
        (
            "R[Year].Prev.City.Athens",
            "values in column Year in rows right above rows where value of "
            "column City is Athens",
        ),
        (
            "count(City.Athens)",
            "the number of rows where value of column City is Athens",
        ),
        (
            "max(R[Year].City.Athens)",
            "maximum of values in column Year in rows where value of column "
            "City is Athens",
        ),
        (
            "sub(R[Year].City.London, R[Year].City.Beijing)",
            "difference in values of column Year between rows where values "
            "of column City is London and Beijing",
        ),
        (
            "sub(count(City.Athens), count(City.London))",
            "in column City, what is the difference between rows with value "
            "Athens and rows with value London",
        ),
        ("China u Greece", "China or Greece"),
        (
            "City.London n Country.UK",
            "rows where value of column City is London and also rows where "
            "value of column Country is UK",
        ),
        (
            "argmax(Record, Year)",
            "rows that have the highest value in column Year",
        ),
        (
            "R[Year].argmax(City.Athens, Index)",
            "values in column Year in rows where it is the last row in rows "
            "where value of column City is Athens",
        ),
        (
            "mostfreq(Athens u London, City)",
            "the value of Athens or London that appears the most in column "
            "City",
        ),
        (
            "comparemax(London u Beijing, City, Year)",
            "between London or Beijing who has the highest value of column "
            "Year",
        ),
    ],
)
def test_reference_phrasings(src, expected):
    assert say(src) == expected


def test_min_direction_variants():
    assert say("argmin(Record, Year)") == (
        "rows that have the lowest value in column Year"
    )
    assert say("leastfreq(Athens u London, City)") == (
        "the value of Athens or London that appears the least in column City"
    )
    assert say("comparemin(London u Beijing, City, Year)") == (
        "between London or Beijing who has the lowest value of column Year"
    )


def test_count_over_scoped_extreme():
    assert say("count(argmax(Lake.'Lake Huron', `Lives lost`))") == (
        "the number of rows where value of column Lake is Lake Huron that "
        "have the highest value in column Lives lost"
    )


def test_comparison_band():
    assert say("Games.(geq(5) n lt(17))") == (
        "rows where value of column Games is at least 5 and also less than 17"
    )


def test_template_override(tmp_path):
    p = tmp_path / "t.json"
    p.write_text(
        json.dumps({"aggregate_count": "how many {operand}"}),
        encoding="utf-8",
    )
    templates = load_templates(p)
    assert say("count(City.Athens)", templates) == (
        "how many rows where value of column City is Athens"
    )
    # untouched keys keep their defaults
    assert say("Athens", templates) == "Athens"


def test_template_override_rejects_unknown_key(tmp_path):
    p = tmp_path / "t.json"
    p.write_text(json.dumps({"no_such_key": "x"}), encoding="utf-8")
    with pytest.raises(KeyError):
        load_templates(p)


def test_template_override_rejects_non_string(tmp_path):
    p = tmp_path / "t.json"
    p.write_text(json.dumps({"join": 7}), encoding="utf-8")
    with pytest.raises(TypeError):
        load_templates(p)


def test_every_default_key_is_a_format_string():
    for key, tpl in DEFAULT_TEMPLATES.items():
        assert isinstance(tpl, str), key


def test_utter_candidates_preserves_order():
    fs = [parse_formula("Athens"), parse_formula("count(City.Athens)")]
    texts = utter_candidates(fs)
    assert texts == [
        "Athens",
        "the number of rows where value of column City is Athens",
    ]
