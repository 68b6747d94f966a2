"""SQL transpilation: frozen query shapes plus a differential sweep."""
import pytest

from tabledcs.demo import ALL_TABLES
from tabledcs.evaluator import evaluate
from tabledcs.formula import parse_formula
from tabledcs.fuzz import (
    denotation_matches,
    has_most_frequent_tie,
    run_differential,
    run_table_sql,
)
from tabledcs.sqlgen import (
    quote_ident,
    schema_for_table,
    sql_literal,
    to_sql,
)
from tabledcs.table import (
    date_value,
    number_value,
    table_from_strings,
    text_value,
)


def sql_for(table, src, **kw):
    return to_sql(parse_formula(src), schema_for_table(table), **kw)


@pytest.fixture(scope="module")
def olympics():
    return ALL_TABLES["olympics"]()


# ---------------------------------------------------------------------------
# Identifier and literal rendering


def test_plain_identifier_stays_bare():
    assert quote_ident("Year") == "Year"


def test_reserved_word_is_quoted():
    assert quote_ident("Index") == '"Index"'
    assert quote_ident("Order") == '"Order"'


def test_spaced_identifier_is_quoted():
    assert quote_ident("Open Cup") == '"Open Cup"'


def test_embedded_quote_is_doubled():
    assert quote_ident('a"b') == '"a""b"'


def test_literals():
    assert sql_literal(number_value(4)) == "4"
    assert sql_literal(number_value(3.5)) == "3.5"
    assert sql_literal(text_value("Athens")) == "'Athens'"
    assert sql_literal(text_value("O'Neill")) == "'O''Neill'"
    assert sql_literal(date_value(2013, 6, 8)) == "'2013-06-08'"


def test_schema_renames_colliding_index_column():
    t = table_from_strings("t", ["Index", "V"], [["1", "2"]])
    schema = schema_for_table(t)
    assert schema.index_column == "Index_"


# ---------------------------------------------------------------------------
# Frozen query shapes


def test_select_rows_by_value(olympics):
    assert sql_for(olympics, "City.Athens") == (
        "SELECT * FROM T WHERE City = 'Athens'"
    )


def test_value_at_positional_extreme(olympics):
    assert sql_for(olympics, "R[City].argmin(Record, Index)") == (
        'SELECT City FROM T WHERE "Index" = (SELECT MIN("Index") FROM T)'
    )


def test_value_at_lowest_year(olympics):
    got = sql_for(olympics, "R[City].argmin(Record, Year)")
    assert got == (
        'SELECT City FROM T WHERE "Index" IN (SELECT "Index" FROM T '
        "WHERE Year = (SELECT MIN(Year) FROM T))"
    )


def test_comparison_predicate():
    games = ALL_TABLES["games"]()
    assert sql_for(games, "Games.gt(4)") == (
        "SELECT * FROM T WHERE Games > 4"
    )
    assert sql_for(games, "Games.(geq(5) n lt(17))") == (
        "SELECT * FROM T WHERE (Games >= 5 AND Games < 17)"
    )


def test_aggregate_over_reverse_join(olympics):
    assert sql_for(olympics, "max(R[Year].Country.Greece)") == (
        "SELECT MAX(Year) FROM (SELECT Year FROM T WHERE "
        '"Index" IN (SELECT "Index" FROM T WHERE Country = \'Greece\'))'
    )


def test_count_rows(olympics):
    assert sql_for(olympics, "count(City.Athens)") == (
        'SELECT COUNT("Index") FROM T WHERE City = \'Athens\''
    )


def test_difference_of_values():
    medals = ALL_TABLES["medals"]()
    got = sql_for(medals, "sub(R[Total].Nation.Fiji, R[Total].Nation.Tonga)")
    assert got == (
        'SELECT (SELECT Total FROM T WHERE "Index" IN (SELECT "Index" '
        "FROM T WHERE Nation = 'Fiji')) - (SELECT Total FROM T WHERE "
        '"Index" IN (SELECT "Index" FROM T WHERE Nation = \'Tonga\'))'
    )


def test_difference_of_counts():
    temples = ALL_TABLES["temples"]()
    got = sql_for(temples, "sub(count(Town.Matsuyama), count(Town.Imabari))")
    assert got == (
        'SELECT (SELECT COUNT("Index") FROM T WHERE Town = \'Matsuyama\') '
        '- (SELECT COUNT("Index") FROM T WHERE Town = \'Imabari\')'
    )


def test_backtick_column_quotes_through():
    usl = ALL_TABLES["usl"]()
    got = sql_for(usl, "min(R[Year].argmax(Record, `Open Cup`))")
    assert '"Open Cup"' in got
    assert got.startswith("SELECT MIN(Year) FROM")


def test_prev_next_shift_index(olympics):
    prev = sql_for(olympics, "R[City].Prev.City.London")
    nxt = sql_for(olympics, "R[City].R[Prev].City.Athens")
    assert "- 1" in prev
    assert "+ 1" in nxt


# ---------------------------------------------------------------------------
# Execution agreement


def test_generated_sql_executes(olympics):
    for src in (
        "City.Athens",
        "R[Year].City.Athens",
        "count(City.Athens)",
        "max(R[Year].Country.Greece)",
        "comparemax(London u Beijing, City, Year)",
        "mostfreq(R[City].Record, City)",
    ):
        f = parse_formula(src)
        schema = schema_for_table(olympics)
        rows = run_table_sql(olympics, to_sql(f, schema), schema)
        assert denotation_matches(evaluate(f, olympics), rows), src


def test_tie_preserving_most_frequent(olympics):
    # Paris and London each appear once; the set form returns both
    f = parse_formula("mostfreq(Paris u London, City)")
    schema = schema_for_table(olympics)
    rows = run_table_sql(olympics, to_sql(f, schema), schema)
    assert sorted(r[0] for r in rows) == ["London", "Paris"]


def test_single_winner_most_frequent_drops_ties(olympics):
    f = parse_formula("mostfreq(Paris u London, City)")
    assert has_most_frequent_tie(f, olympics)
    schema = schema_for_table(olympics)
    sql = to_sql(f, schema, paper_faithful=True)
    assert "LIMIT 1" in sql
    rows = run_table_sql(olympics, sql, schema)
    assert len(rows) == 1


def test_single_winner_agrees_when_no_tie(olympics):
    f = parse_formula("mostfreq(R[City].Record, City)")
    assert not has_most_frequent_tie(f, olympics)
    schema = schema_for_table(olympics)
    rows = run_table_sql(olympics, to_sql(f, schema, paper_faithful=True), schema)
    assert denotation_matches(evaluate(f, olympics), rows)


def test_differential_sweep_small():
    report = run_differential(n_cases=150, seed=3)
    assert report.ok, report.summary()


def test_single_winner_mismatches_only_on_ties():
    report = run_differential(n_cases=150, seed=3, paper_faithful=True)
    assert report.executed >= 150
    for m in report.mismatches:
        assert m.most_frequent_tie, m.formula
