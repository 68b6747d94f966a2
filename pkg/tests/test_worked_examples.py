"""Byte-exact comparison against the frozen worked-example corpus.

Every golden case is recomputed from the table and formula stored in the
file itself, then the full recomputed document is serialized canonically
and compared byte for byte. Per-case tests give granular failures; the
whole-file test guards ordering and serialization drift.
"""
import json
import time
from pathlib import Path

import pytest

from make_goldens import (
    GOLDEN_DIR,
    PAGE_CASES,
    canonical_dump,
    compute_worked_case,
    render_page,
    utterances_doc,
    worked_examples_doc,
)


def _load(name):
    return json.loads((GOLDEN_DIR / name).read_text(encoding="utf-8"))


GOLDEN_WORKED = _load("worked_examples.json")
GOLDEN_UTTERANCES = _load("utterances.json")


@pytest.mark.parametrize(
    "case", GOLDEN_WORKED["cases"], ids=[c["id"] for c in GOLDEN_WORKED["cases"]]
)
def test_worked_case_recomputes_exactly(case):
    got = compute_worked_case(case["id"], case["table"], case["formula"])
    assert canonical_dump(got) == canonical_dump(case)


def test_worked_examples_file_is_byte_stable():
    raw = (GOLDEN_DIR / "worked_examples.json").read_bytes()
    doc = worked_examples_doc(stored_cases=GOLDEN_WORKED["cases"])
    assert canonical_dump(doc).encode("utf-8") == raw


@pytest.mark.parametrize(
    "case",
    GOLDEN_UTTERANCES["cases"],
    ids=[c["formula"] for c in GOLDEN_UTTERANCES["cases"]],
)
def test_utterance_recomputes_exactly(case):
    doc = utterances_doc(stored_cases=[case])
    assert doc["cases"][0]["utterance"] == case["utterance"]


def test_utterances_file_is_byte_stable():
    raw = (GOLDEN_DIR / "utterances.json").read_bytes()
    doc = utterances_doc(stored_cases=GOLDEN_UTTERANCES["cases"])
    assert canonical_dump(doc).encode("utf-8") == raw


@pytest.mark.parametrize(
    "filename, table_id, formula", PAGE_CASES, ids=[p[0] for p in PAGE_CASES]
)
def test_rendered_page_matches_golden(filename, table_id, formula):
    raw = (GOLDEN_DIR / "pages" / filename).read_bytes()
    assert render_page(table_id, formula).encode("utf-8") == raw


def test_full_suite_recomputes_quickly():
    start = time.monotonic()
    worked_examples_doc(stored_cases=GOLDEN_WORKED["cases"])
    utterances_doc(stored_cases=GOLDEN_UTTERANCES["cases"])
    for _, table_id, formula in PAGE_CASES:
        render_page(table_id, formula)
    elapsed = time.monotonic() - start
    assert elapsed < 5.0, f"golden recomputation took {elapsed:.2f}s"
