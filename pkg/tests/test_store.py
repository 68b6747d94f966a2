"""Dataset directory handling: manifest, tables, append-only vote log."""
import json

import numpy as np
import pytest

from tabledcs.demo import write_demo_dataset
from tabledcs.store import (
    AnnotationStore,
    Dataset,
    DatasetError,
    ManifestError,
    TableRegistry,
    UnknownQuestion,
    UnknownTable,
    build_instances,
    candidate_features,
    candidate_results,
    dataset_metrics,
    load_manifest,
)


@pytest.fixture()
def dataset(tmp_path):
    write_demo_dataset(tmp_path / "data")
    return Dataset.open(tmp_path / "data")


def test_demo_dataset_opens(dataset):
    assert len(dataset.questions) == 4
    assert "olympics" in dataset.registry.ids()


def test_manifest_rejects_missing_keys(tmp_path):
    p = tmp_path / "manifest.json"
    p.write_text(json.dumps({"questions": [{"question_id": "q"}]}), "utf-8")
    with pytest.raises(ManifestError):
        load_manifest(p)


def test_manifest_rejects_duplicate_ids(tmp_path):
    q = {
        "question_id": "q1",
        "question": "?",
        "table_id": "t",
        "gold": ["1"],
        "candidates": ["Athens"],
    }
    p = tmp_path / "manifest.json"
    p.write_text(json.dumps({"questions": [q, q]}), "utf-8")
    with pytest.raises(ManifestError):
        load_manifest(p)


def test_manifest_rejects_empty_candidates(tmp_path):
    q = {
        "question_id": "q1",
        "question": "?",
        "table_id": "t",
        "gold": ["1"],
        "candidates": [],
    }
    p = tmp_path / "manifest.json"
    p.write_text(json.dumps({"questions": [q]}), "utf-8")
    with pytest.raises(ManifestError):
        load_manifest(p)


def test_manifest_missing_file(tmp_path):
    with pytest.raises(ManifestError):
        load_manifest(tmp_path / "nope.json")


def test_registry_caches_and_rejects_unknown(dataset):
    one = dataset.registry.get("olympics")
    two = dataset.registry.get("olympics")
    assert one is two
    with pytest.raises(UnknownTable):
        dataset.registry.get("atlantis")


def test_question_lookup(dataset):
    q = dataset.question_by_id("medals-fiji-tonga-gap")
    assert q.table_id == "medals"
    with pytest.raises(UnknownQuestion):
        dataset.question_by_id("nope")


def test_votes_append_to_disk(dataset):
    rec = dataset.annotations.add("q1", "w1", 2, elapsed_ms=1500)
    assert rec["selection"] == 2
    assert rec["elapsed_ms"] == 1500
    assert set(rec) == {
        "question_id",
        "worker_id",
        "selection",
        "elapsed_ms",
        "timestamp",
    }
    lines = (dataset.root / "annotations.jsonl").read_text().splitlines()
    assert len(lines) == 1
    assert json.loads(lines[0])["worker_id"] == "w1"


def test_votes_persist_across_reopen(dataset):
    dataset.annotations.add("q1", "w1", 0)
    dataset.annotations.add("q1", "w2", None)
    reopened = AnnotationStore(dataset.root / "annotations.jsonl")
    assert reopened.votes_for("q1") == {"w1": 0, "w2": None}


def test_later_vote_supersedes(dataset):
    dataset.annotations.add("q1", "w1", 0)
    dataset.annotations.add("q1", "w1", 3)
    assert dataset.annotations.votes_for("q1") == {"w1": 3}
    # both records stay in the log
    assert len(dataset.annotations.records()) == 2


def test_add_rejects_negative_selection(dataset):
    with pytest.raises(ValueError):
        dataset.annotations.add("q1", "w1", -1)


def test_store_rejects_corrupt_log(tmp_path):
    p = tmp_path / "annotations.jsonl"
    p.write_text('{"ok": 1}\nnot json\n', encoding="utf-8")
    with pytest.raises(DatasetError):
        AnnotationStore(p)


def test_questions_answered_by(dataset):
    dataset.annotations.add("q1", "w1", 0)
    dataset.annotations.add("q2", "w1", None)
    dataset.annotations.add("q1", "w2", 1)
    assert dataset.annotations.questions_answered_by("w1") == {"q1", "q2"}


def test_consensus_needs_two_votes(dataset):
    qid = "olympics-greece-years"
    dataset.annotations.add(qid, "w1", 0)
    assert dataset.annotations.consensus(qid) is None
    dataset.annotations.add(qid, "w2", 0)
    assert dataset.annotations.consensus(qid) == frozenset({0})


def test_candidate_results_keep_failures_aligned(dataset):
    q = dataset.question_by_id("olympics-greece-years")
    table = dataset.registry.get(q.table_id)
    rows = candidate_results(q, table)
    assert len(rows) == len(q.candidates)
    feats = candidate_features(q, table, rows)
    assert feats.shape[0] == len(q.candidates)


def test_build_instances_uses_gold_without_votes(dataset):
    instances = build_instances(dataset)
    # every demo question has a gold-matching candidate
    assert len(instances) == 4
    assert all(not i.annotated for i in instances)
    assert all(i.reference.any() for i in instances)


def test_build_instances_prefers_consensus(dataset):
    qid = "olympics-greece-years"
    dataset.annotations.add(qid, "w1", 1)
    dataset.annotations.add(qid, "w2", 1)
    instances = build_instances(dataset)
    flagged = [i for i in instances if i.annotated]
    assert len(flagged) == 1
    assert flagged[0].reference[1]
    assert not flagged[0].reference[0]


def test_build_instances_drops_agreed_unanswerable(dataset):
    qid = "olympics-greece-years"
    dataset.annotations.add(qid, "w1", None)
    dataset.annotations.add(qid, "w2", None)
    dataset.annotations.add(qid, "w3", None)
    instances = build_instances(dataset)
    assert len(instances) == 3


def test_dataset_metrics_shape(dataset):
    m = dataset_metrics(dataset, np.zeros(26))
    assert set(m) == {
        "n_instances",
        "correctness",
        "mrr",
        "hybrid_n",
        "hybrid_correctness",
    }
    assert m["hybrid_n"] == 4
    assert 0.0 <= m["mrr"] <= 1.0


def test_consensus_overrides_hybrid_pick(dataset):
    qid = "olympics-greece-years"
    dataset.annotations.add(qid, "w1", 0)
    dataset.annotations.add(qid, "w2", 0)
    m = dataset_metrics(dataset, np.zeros(26))
    assert m["hybrid_correctness"] >= 0.25
