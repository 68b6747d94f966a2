"""Small built-in tables and a demo dataset for tests, scripts and the docs.

These tables mirror the shapes this engine is exercised on: sports results,
shipwrecks, medal tallies. Each builder returns a fresh immutable Table.
"""
from __future__ import annotations

import json
import random
from pathlib import Path

from .table import Table, table_from_strings


def olympics() -> Table:
    return table_from_strings(
        "olympics",
        ["Year", "Country", "City"],
        [
            ["1896", "Greece", "Athens"],
            ["1900", "France", "Paris"],
            ["2004", "Greece", "Athens"],
            ["2008", "China", "Beijing"],
            ["2012", "UK", "London"],
            ["2016", "Brazil", "Rio de Janeiro"],
        ],
    )


def usl() -> Table:
    return table_from_strings(
        "usl",
        ["Year", "League", "Attendance", "Open Cup"],
        [
            ["2002", "USL A-League", "6,260", "Did not qualify"],
            ["2003", "USL A-League", "5,871", "Did not qualify"],
            ["2004", "USL A-League", "5,628", "4th Round"],
            ["2005", "USL First Division", "6,028", "4th Round"],
            ["2006", "USL First Division", "5,575", "3rd Round"],
        ],
    )


def ships() -> Table:
    return table_from_strings(
        "ships",
        ["Ship", "Vessel", "Lake", "Lives lost"],
        [
            ["Argus", "Steamer", "Lake Huron", "25 lost"],
            ["Hydrus", "Steamer", "Lake Huron", "28 lost"],
            ["Plymouth", "Barge", "Lake Michigan", "7 lost"],
            ["Issac M. Scott", "Steamer", "Lake Huron", "28 lost"],
            ["Henry B. Smith", "Steamer", "Lake Superior", "all hands"],
            ["Lightship No. 82", "Lightship", "Lake Erie", "6 lost"],
        ],
    )


def medals() -> Table:
    return table_from_strings(
        "medals",
        ["Rank", "Nation", "Gold", "Silver", "Bronze", "Total"],
        [
            ["1", "New Caledonia", "120", "107", "61", "288"],
            ["2", "Tahiti", "60", "42", "42", "144"],
            ["3", "Papua New Guinea", "48", "25", "48", "121"],
            ["4", "Fiji", "33", "44", "53", "130"],
            ["5", "Samoa", "22", "17", "34", "73"],
            ["6", "Nauru", "8", "10", "10", "28"],
            ["7", "Tonga", "4", "6", "10", "20"],
        ],
    )


def games() -> Table:
    return table_from_strings(
        "games",
        ["Name", "Position", "Games", "Club"],
        [
            ["Erich Burgener", "GK", "3", "Servette"],
            ["Roger Berbig", "GK", "3", "Grasshoppers"],
            ["Charly In-Albon", "DF", "4", "Grasshoppers"],
            ["Beat Rietmann", "DF", "2", "FC St. Gallen"],
            ["Andy Egli", "DF", "6", "Grasshoppers"],
            ["Marcel Koller", "DF", "2", "Grasshoppers"],
            ["Rene Botteron", "MF", "1", "FC Nuremburg"],
            ["Heinz Hermann", "MF", "6", "Grasshoppers"],
            ["Roger Wehrli", "MF", "6", "Grasshoppers"],
            ["Lucien Favre", "MF", "5", "Toulouse Servette"],
        ],
    )


def yachts() -> Table:
    return table_from_strings(
        "yachts",
        ["Name", "Type", "Owner"],
        [
            ["Sally", "Yacht", "Lyman"],
            ["Caprice", "Yacht", "Robinson"],
            ["Eleanor", "Yacht", "Clapp"],
            ["USS Lawrence", "Yacht", "U.S. Navy"],
            ["USS Macdonough", "Yacht", "U.S. Navy"],
            ["Jule", "Yacht", "J. Arthur"],
            ["Lightship LV-72", "Lightvessel", "U.S. Lighthouse Board"],
        ],
    )


def temples() -> Table:
    return table_from_strings(
        "temples",
        ["Temple", "Honzon", "Town"],
        [
            ["Iwaya-ji", "Fudo Myoo", "Kumakogen"],
            ["Joruri-ji", "Yakushi Nyorai", "Matsuyama"],
            ["Yasaka-ji", "Amida Nyorai", "Matsuyama"],
            ["Sairin-ji", "Juichimen Kannon", "Matsuyama"],
            ["Jodo-ji", "Shaka Nyorai", "Matsuyama"],
            ["Yokomine-ji", "Dainichi Nyorai", "Saijo"],
            ["Senyu-ji", "Senju Kannon", "Imabari"],
            ["Kokubun-ji", "Yakushi Nyorai", "Imabari"],
        ],
    )


def growth(n_rows: int = 60, seed: int = 7) -> Table:
    """Synthetic wide population table, large enough to trigger row sampling."""
    rng = random.Random(seed)
    rows = []
    for i in range(n_rows):
        year = 1950 + i
        pop = 4_000_000 + i * 14_000 + rng.randrange(0, 9_000)
        rate = round(1.5 + rng.random() * 1.6, 3)
        rows.append([str(year), str(pop), str(rate)])
    return table_from_strings("growth", ["Year", "Population", "Growth Rate"], rows)


ALL_TABLES = {
    "olympics": olympics,
    "usl": usl,
    "ships": ships,
    "medals": medals,
    "games": games,
    "yachts": yachts,
    "temples": temples,
    "growth": growth,
}


def _tsv_of(table: Table) -> str:
    lines = ["\t".join(table.headers)]
    for row in table.rows:
        lines.append("\t".join(cell.render() for cell in row))
    return "\n".join(lines) + "\n"


DEMO_QUESTIONS = [
    {
        "question_id": "usl-last-a-league-year",
        "question": "What was the last year the team was a part of the USL A-League?",
        "table_id": "usl",
        "gold": ["2004"],
        "candidates": [
            "max(R[Year].League.'USL A-League')",
            "min(R[Year].argmax(Record, `Open Cup`))",
        ],
    },
    {
        "question_id": "olympics-greece-years",
        "question": "In which years did Greece host the Olympics?",
        "table_id": "olympics",
        "gold": ["1896", "2004"],
        "candidates": [
            "R[Year].Country.Greece",
            "R[Year].City.Athens",
            "max(R[Year].Country.Greece)",
            "R[Year].Country.UK",
            "R[City].Country.Greece",
            "count(Country.Greece)",
            "R[Year].argmin(Record, Year)",
        ],
    },
    {
        "question_id": "ships-huron-loss-gap",
        "question": "How many more ships were lost in Lake Huron than in Lake Erie?",
        "table_id": "ships",
        "gold": ["2"],
        "candidates": [
            "sub(count(Lake.'Lake Huron'), count(Lake.'Lake Erie'))",
            "sub(count(Lake.'Lake Huron'), count(Lake.'Lake Superior'))",
            "count(argmax(Lake.'Lake Huron', `Lives lost`))",
            "count(Lake.'Lake Huron')",
        ],
    },
    {
        "question_id": "medals-fiji-tonga-gap",
        "question": "How many more medals did Fiji win than Tonga in total?",
        "table_id": "medals",
        "gold": ["110"],
        "candidates": [
            "sub(R[Total].Nation.Fiji, R[Total].Nation.Tonga)",
            "sub(R[Gold].Nation.Fiji, R[Gold].Nation.Tonga)",
            "R[Total].Nation.Fiji",
            "sub(count(Nation.Fiji), count(Nation.Tonga))",
        ],
    },
]


def write_demo_dataset(data_dir: str | Path) -> Path:
    """Write tables plus a question manifest under data_dir; returns the path."""
    data_dir = Path(data_dir)
    tables_dir = data_dir / "tables"
    tables_dir.mkdir(parents=True, exist_ok=True)
    for table_id, builder in ALL_TABLES.items():
        (tables_dir / f"{table_id}.tsv").write_text(
            _tsv_of(builder()), encoding="utf-8"
        )
    manifest = {"questions": DEMO_QUESTIONS}
    (data_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )
    return data_dir
