"""HTTP review service over one dataset directory.

Serves tables, questions and per-candidate explanations (formula text,
utterance, highlight document, result, SQL), accepts worker feedback,
trains the reranker on demand and reports ranking metrics. All routes are
JSON; explanation payloads are self-contained so a reviewing UI needs no
other source of truth.
"""
from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, ConfigDict, Field

from .evaluator import Denotation
from .highlight import annotation_to_doc, highlight
from .rerank import (
    Hyperparams,
    ModelState,
    initial_model,
    load_model,
    save_model,
    train,
)
from .sqlgen import UnsupportedNode, schema_for_table, to_sql
from .store import (
    Dataset,
    Question,
    UnknownQuestion,
    UnknownTable,
    build_instances,
    candidate_results,
    dataset_metrics,
)
from .table import Table, TableError
from .utterance import utter


def result_doc(d: Denotation | None) -> dict | None:
    if d is None:
        return None
    if d.kind == "records":
        return {"kind": "records", "rows": sorted(d.records)}
    if d.kind == "values":
        return {
            "kind": "values",
            "values": sorted(v.render() for v in d.values),
        }
    return {"kind": "scalar", "value": d.scalar.render()}


def _table_doc(table_id: str, table: Table) -> dict:
    return {
        "table_id": table_id,
        "headers": list(table.headers),
        "rows": [[cell.render() for cell in row] for row in table.rows],
        "n_rows": table.n_rows,
    }


def _explain_candidate(
    question: Question, table: Table, position: int, f, d, err
) -> dict:
    out: dict = {
        "position": position,
        "formula": question.candidates[position],
        "utterance": None,
        "highlight": None,
        "result": result_doc(d),
        "sql": None,
        "error": str(err) if err is not None else None,
    }
    if f is None:
        return out
    out["utterance"] = utter(f)
    try:
        out["sql"] = to_sql(f, schema_for_table(table))
    except (TableError, UnsupportedNode) as e:
        out["sql"] = None
        out["error"] = out["error"] or str(e)
    if d is not None:
        annotation = highlight(f, table)
        out["highlight"] = annotation_to_doc(annotation, question.table_id)
    return out


class FeedbackBody(BaseModel):
    question_id: str
    worker_id: str
    # required so that a client omitting the field by accident is told so
    # instead of silently casting a "none of these" vote
    selection: int | None
    elapsed_ms: int | None = Field(default=None, ge=0)


class TrainBody(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    epochs: int = 20
    lr: float = 0.1
    l1: float = Field(default=0.0, alias="lambda")


def create_app(data_dir: str | Path) -> FastAPI:
    dataset = Dataset.open(data_dir)
    app = FastAPI(title="table answer review")
    # the browser client is typically served from a different local port
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.dataset = dataset
    app.state.train_lock = threading.Lock()
    model_path = dataset.model_path()
    app.state.model = (
        load_model(model_path) if model_path.exists() else initial_model()
    )

    @app.get("/tables/{table_id}")
    def get_table(table_id: str) -> dict:
        try:
            table = dataset.registry.get(table_id)
        except UnknownTable:
            raise HTTPException(404, f"unknown table {table_id!r}")
        return _table_doc(table_id, table)

    @app.get("/questions")
    def list_questions(worker: str | None = None) -> dict:
        answered = (
            dataset.annotations.questions_answered_by(worker)
            if worker
            else set()
        )
        items = []
        for q in dataset.questions:
            item = {
                "question_id": q.question_id,
                "question": q.question,
                "table_id": q.table_id,
                "n_candidates": len(q.candidates),
            }
            if worker:
                item["answered"] = q.question_id in answered
            items.append(item)
        return {"questions": items}

    @app.get("/questions/{question_id}/explanations")
    def explanations(
        question_id: str, k: int = Query(default=7, ge=1, le=50)
    ) -> dict:
        try:
            q = dataset.question_by_id(question_id)
        except UnknownQuestion:
            raise HTTPException(404, f"unknown question {question_id!r}")
        table = dataset.registry.get(q.table_id)
        rows = candidate_results(q, table)
        cands = [
            _explain_candidate(q, table, pos, *rows[pos])
            for pos in range(min(k, len(rows)))
        ]
        return {
            "question_id": q.question_id,
            "question": q.question,
            "table_id": q.table_id,
            "gold": list(q.gold),
            "k": k,
            "candidates": cands,
        }

    @app.post("/feedback")
    def feedback(body: FeedbackBody) -> dict:
        try:
            q = dataset.question_by_id(body.question_id)
        except UnknownQuestion:
            raise HTTPException(404, f"unknown question {body.question_id!r}")
        if body.selection is not None and not (
            0 <= body.selection < len(q.candidates)
        ):
            raise HTTPException(
                400,
                f"selection {body.selection} out of range for "
                f"{len(q.candidates)} candidates",
            )
        if not body.worker_id.strip():
            raise HTTPException(400, "worker_id must be non-empty")
        rec = dataset.annotations.add(
            body.question_id,
            body.worker_id,
            body.selection,
            elapsed_ms=body.elapsed_ms,
        )
        return {
            "stored": rec,
            "votes": dataset.annotations.votes_for(body.question_id),
        }

    @app.post("/train")
    def train_model(body: TrainBody | None = None) -> dict:
        body = body or TrainBody()
        if not app.state.train_lock.acquire(blocking=False):
            raise HTTPException(409, "training already in progress")
        try:
            instances = build_instances(dataset)
            if not instances:
                raise HTTPException(400, "no trainable questions in dataset")
            hyper = Hyperparams(
                epochs=body.epochs,
                learning_rate=body.lr,
                l1=body.l1,
            )
            result = train(instances, hyper)
            state = ModelState(
                theta=result.theta,
                accumulators=result.accumulators,
                epochs_trained=hyper.epochs,
                hyper=hyper,
            )
            save_model(dataset.model_path(), state)
            app.state.model = state
            return {
                "instances": len(instances),
                "epochs": hyper.epochs,
                "objective_first": result.history[0],
                "objective_last": result.history[-1],
            }
        finally:
            app.state.train_lock.release()

    @app.get("/metrics")
    def metrics() -> dict:
        return dataset_metrics(dataset, app.state.model.theta)

    return app
