"""Dataset layout: tables on disk, a question manifest, an annotation log.

A dataset directory holds tables/ (one TSV or CSV per table), manifest.json
(the questions with their candidate formulas and gold answers) and
annotations.jsonl (the append-only feedback log). Appending is the only
write operation on the log; a worker changing their mind appends a new
record and the latest record per (question, worker) wins.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .evaluator import EvalError, evaluate
from .formula import FormulaError, parse_formula
from .rerank import (
    Instance,
    N_FEATURES,
    aggregate_annotations,
    evaluate_ranking,
    featurize,
    hybrid_choice,
    rank_candidates,
    result_equals,
)
from .table import Table, TableError, load_table


class DatasetError(Exception):
    pass


class UnknownTable(DatasetError):
    pass


class UnknownQuestion(DatasetError):
    pass


class ManifestError(DatasetError):
    pass


@dataclass(frozen=True)
class Question:
    question_id: str
    question: str
    table_id: str
    gold: tuple[str, ...]
    candidates: tuple[str, ...]


def _parse_question(entry: dict, where: str) -> Question:
    for key in ("question_id", "question", "table_id", "gold", "candidates"):
        if key not in entry:
            raise ManifestError(f"{where}: missing key {key!r}")
    if not entry["candidates"]:
        raise ManifestError(f"{where}: empty candidate list")
    return Question(
        question_id=str(entry["question_id"]),
        question=str(entry["question"]),
        table_id=str(entry["table_id"]),
        gold=tuple(str(g) for g in entry["gold"]),
        candidates=tuple(str(c) for c in entry["candidates"]),
    )


def load_manifest(path: str | Path) -> list[Question]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ManifestError(f"no manifest at {path}") from None
    except json.JSONDecodeError as e:
        raise ManifestError(f"{path} is not valid JSON: {e}") from None
    entries = doc.get("questions")
    if not isinstance(entries, list):
        raise ManifestError(f"{path}: expected a top-level questions list")
    questions = [
        _parse_question(e, f"{path} questions[{i}]")
        for i, e in enumerate(entries)
    ]
    seen: set[str] = set()
    for q in questions:
        if q.question_id in seen:
            raise ManifestError(f"duplicate question_id {q.question_id!r}")
        seen.add(q.question_id)
    return questions


class TableRegistry:
    """Tables under one directory, loaded once and cached by id."""

    def __init__(self, tables_dir: str | Path) -> None:
        self.tables_dir = Path(tables_dir)
        self._cache: dict[str, Table] = {}

    def ids(self) -> list[str]:
        out = set()
        for p in self.tables_dir.glob("*.tsv"):
            out.add(p.stem)
        for p in self.tables_dir.glob("*.csv"):
            out.add(p.stem)
        return sorted(out)

    def get(self, table_id: str) -> Table:
        if table_id in self._cache:
            return self._cache[table_id]
        for suffix in (".tsv", ".csv"):
            path = self.tables_dir / f"{table_id}{suffix}"
            if path.exists():
                table = load_table(path)
                self._cache[table_id] = table
                return table
        raise UnknownTable(f"no table file for id {table_id!r}")


class AnnotationStore:
    """Append-only JSONL vote log with last-record-wins semantics."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._records: list[dict] = []
        if self.path.exists():
            with self.path.open(encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        rec = json.loads(line)
                    except json.JSONDecodeError:
                        raise DatasetError(
                            f"{self.path} line {lineno} is not valid JSON"
                        ) from None
                    self._records.append(rec)

    def add(
        self,
        question_id: str,
        worker_id: str,
        selection: int | None,
        elapsed_ms: int | None = None,
    ) -> dict:
        """Append one vote; a later vote by the same worker supersedes it."""
        if selection is not None and (
            not isinstance(selection, int) or selection < 0
        ):
            raise ValueError("selection must be None or a candidate position")
        rec = {
            "question_id": question_id,
            "worker_id": worker_id,
            "selection": selection,
            "elapsed_ms": elapsed_ms,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
        }
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(rec) + "\n")
        self._records.append(rec)
        return rec

    def records(self) -> list[dict]:
        return list(self._records)

    def votes_for(self, question_id: str) -> dict[str, int | None]:
        """Latest selection per worker for one question."""
        out: dict[str, int | None] = {}
        for rec in self._records:
            if rec.get("question_id") == question_id:
                out[str(rec.get("worker_id"))] = rec.get("selection")
        return out

    def questions_answered_by(self, worker_id: str) -> set[str]:
        return {
            str(rec.get("question_id"))
            for rec in self._records
            if rec.get("worker_id") == worker_id
        }

    def consensus(self, question_id: str) -> frozenset[int] | None:
        return aggregate_annotations(
            list(self.votes_for(question_id).values())
        )


@dataclass(frozen=True)
class Dataset:
    """One directory with tables, manifest and annotation log."""

    root: Path
    questions: list[Question]
    registry: TableRegistry
    annotations: AnnotationStore

    @classmethod
    def open(cls, root: str | Path) -> "Dataset":
        root = Path(root)
        questions = load_manifest(root / "manifest.json")
        registry = TableRegistry(root / "tables")
        annotations = AnnotationStore(root / "annotations.jsonl")
        return cls(
            root=root,
            questions=questions,
            registry=registry,
            annotations=annotations,
        )

    def question_by_id(self, question_id: str) -> Question:
        for q in self.questions:
            if q.question_id == question_id:
                return q
        raise UnknownQuestion(f"no question with id {question_id!r}")

    def model_path(self) -> Path:
        return self.root / "model.json"


def candidate_results(question: Question, table: Table):
    """Parse and evaluate every candidate; failures become None results."""
    out = []
    for text in question.candidates:
        try:
            f = parse_formula(text)
            d = evaluate(f, table)
            out.append((f, d, None))
        except (FormulaError, TableError, EvalError) as e:
            f = None
            try:
                f = parse_formula(text)
            except FormulaError:
                pass
            out.append((f, None, e))
    return out


def candidate_features(question: Question, table: Table, rows) -> np.ndarray:
    """Feature matrix over candidate_results rows, one row per candidate.

    Unparseable candidates get an all-zero row so positions stay aligned
    with the manifest.
    """
    feats = []
    for f, d, _err in rows:
        if f is None:
            feats.append(np.zeros(N_FEATURES))
        else:
            feats.append(featurize(question.question, f, table, d))
    return np.vstack(feats)


def build_instances(dataset: Dataset) -> list[Instance]:
    """Training instances for every usable question in the dataset.

    Reference candidates come from annotation consensus where one exists
    and from gold-answer matching otherwise. Questions with no reference
    candidate are dropped; they carry no training signal.
    """
    instances = []
    for q in dataset.questions:
        table = dataset.registry.get(q.table_id)
        rows = candidate_results(q, table)
        features = candidate_features(q, table, rows)
        marked = dataset.annotations.consensus(q.question_id)
        if marked:
            reference = np.array(
                [i in marked for i in range(len(rows))], dtype=bool
            )
            annotated = True
        elif marked is not None:
            # confident agreement that nothing is correct
            continue
        else:
            reference = np.array(
                [result_equals(d, list(q.gold)) for _f, d, _e in rows],
                dtype=bool,
            )
            annotated = False
        if not reference.any():
            continue
        instances.append(Instance(features, reference, annotated))
    return instances


def dataset_metrics(dataset: Dataset, theta: np.ndarray) -> dict:
    """Model-only and hybrid ranking quality over the whole dataset.

    Model metrics score trainable questions only. The hybrid rule follows
    every question: return a consensus-marked candidate when there is one,
    the model's top pick otherwise, and count it correct when it is marked
    or its result matches the gold answers.
    """
    instances = build_instances(dataset)
    model_metrics = evaluate_ranking(theta, instances)
    hybrid_hits = 0
    hybrid_n = 0
    for q in dataset.questions:
        table = dataset.registry.get(q.table_id)
        rows = candidate_results(q, table)
        features = candidate_features(q, table, rows)
        order = rank_candidates(theta, features)
        marked = dataset.annotations.consensus(q.question_id) or frozenset()
        pick = hybrid_choice(order, marked)
        _f, d, _err = rows[pick]
        correct = pick in marked or result_equals(d, list(q.gold))
        hybrid_n += 1
        hybrid_hits += int(correct)
    return {
        "n_instances": model_metrics.n,
        "correctness": model_metrics.correctness,
        "mrr": model_metrics.mrr,
        "hybrid_n": hybrid_n,
        "hybrid_correctness": hybrid_hits / hybrid_n if hybrid_n else 0.0,
    }
