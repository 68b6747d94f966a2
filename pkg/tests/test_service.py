"""HTTP API tests against an in-process app over a scratch dataset."""
import json

import pytest
from fastapi.testclient import TestClient

from tabledcs.demo import write_demo_dataset
from tabledcs.service import create_app


@pytest.fixture()
def data_dir(tmp_path):
    return write_demo_dataset(tmp_path / "data")


@pytest.fixture()
def client(data_dir):
    with TestClient(create_app(data_dir)) as c:
        yield c


def test_get_table(client):
    r = client.get("/tables/olympics")
    assert r.status_code == 200
    doc = r.json()
    assert doc["table_id"] == "olympics"
    assert doc["headers"] == ["Year", "Country", "City"]
    assert doc["n_rows"] == 6
    assert doc["rows"][0] == ["1896", "Greece", "Athens"]


def test_get_table_404(client):
    assert client.get("/tables/atlantis").status_code == 404


def test_list_questions(client):
    r = client.get("/questions")
    assert r.status_code == 200
    items = r.json()["questions"]
    assert len(items) == 4
    assert all("answered" not in q for q in items)


def test_list_questions_flags_answered(client):
    client.post(
        "/feedback",
        json={
            "question_id": "olympics-greece-years",
            "worker_id": "w1",
            "selection": 0,
        },
    )
    r = client.get("/questions", params={"worker": "w1"})
    flags = {q["question_id"]: q["answered"] for q in r.json()["questions"]}
    assert flags["olympics-greece-years"] is True
    assert flags["medals-fiji-tonga-gap"] is False


def test_explanations_shape(client):
    r = client.get("/questions/olympics-greece-years/explanations")
    assert r.status_code == 200
    doc = r.json()
    assert doc["table_id"] == "olympics"
    assert doc["k"] == 7
    cands = doc["candidates"]
    assert len(cands) == 7
    # positions follow the manifest order
    assert [c["position"] for c in cands] == list(range(7))
    first = cands[0]
    assert first["formula"] == "R[Year].Country.Greece"
    assert first["utterance"] == (
        "values in column Year in rows where value of column Country is "
        "Greece"
    )
    assert first["result"] == {"kind": "values", "values": ["1896", "2004"]}
    assert first["sql"].startswith("SELECT Year FROM T")
    assert first["error"] is None
    hl = first["highlight"]
    assert hl["table_id"] == "olympics"
    assert {s["style"] for s in hl["styles"]} <= {"colored", "framed", "lit"}


def test_explanations_k_limits_candidates(client):
    r = client.get(
        "/questions/olympics-greece-years/explanations", params={"k": 2}
    )
    assert len(r.json()["candidates"]) == 2


def test_explanations_404(client):
    assert client.get("/questions/nope/explanations").status_code == 404


def test_explanation_scalar_and_records_results(client):
    r = client.get("/questions/olympics-greece-years/explanations")
    by_formula = {c["formula"]: c for c in r.json()["candidates"]}
    assert by_formula["max(R[Year].Country.Greece)"]["result"] == {
        "kind": "scalar",
        "value": "2004",
    }
    assert by_formula["count(Country.Greece)"]["result"] == {
        "kind": "scalar",
        "value": "2",
    }


def test_feedback_round_trip(client, data_dir):
    r = client.post(
        "/feedback",
        json={
            "question_id": "olympics-greece-years",
            "worker_id": "w7",
            "selection": 1,
            "elapsed_ms": 2500,
        },
    )
    assert r.status_code == 200
    stored = r.json()["stored"]
    assert stored["selection"] == 1
    assert stored["elapsed_ms"] == 2500
    assert "timestamp" in stored
    log = (data_dir / "annotations.jsonl").read_text().splitlines()
    assert json.loads(log[-1])["worker_id"] == "w7"


def test_feedback_none_selection(client):
    r = client.post(
        "/feedback",
        json={
            "question_id": "olympics-greece-years",
            "worker_id": "w1",
            "selection": None,
        },
    )
    assert r.status_code == 200
    assert r.json()["stored"]["selection"] is None


def test_cross_origin_requests_allowed(client):
    r = client.options(
        "/feedback",
        headers={
            "Origin": "http://localhost:5173",
            "Access-Control-Request-Method": "POST",
        },
    )
    assert r.status_code == 200
    assert r.headers["access-control-allow-origin"] == "*"


def test_feedback_requires_selection_field(client):
    r = client.post(
        "/feedback",
        json={
            "question_id": "olympics-greece-years",
            "worker_id": "w1",
        },
    )
    assert r.status_code == 422


def test_feedback_rejects_negative_elapsed(client):
    r = client.post(
        "/feedback",
        json={
            "question_id": "olympics-greece-years",
            "worker_id": "w1",
            "selection": 1,
            "elapsed_ms": -5,
        },
    )
    assert r.status_code == 422


def test_feedback_rejects_out_of_range(client):
    r = client.post(
        "/feedback",
        json={
            "question_id": "olympics-greece-years",
            "worker_id": "w1",
            "selection": 99,
        },
    )
    assert r.status_code == 400


def test_feedback_rejects_blank_worker(client):
    r = client.post(
        "/feedback",
        json={
            "question_id": "olympics-greece-years",
            "worker_id": "  ",
            "selection": 0,
        },
    )
    assert r.status_code == 400


def test_feedback_unknown_question(client):
    r = client.post(
        "/feedback",
        json={"question_id": "nope", "worker_id": "w", "selection": 0},
    )
    assert r.status_code == 404


def test_train_and_metrics(client, data_dir):
    r = client.post("/train", json={"epochs": 5, "lr": 0.1, "lambda": 0.0})
    assert r.status_code == 200
    doc = r.json()
    assert doc["instances"] == 4
    assert doc["epochs"] == 5
    assert doc["objective_last"] >= doc["objective_first"]
    assert (data_dir / "model.json").exists()
    m = client.get("/metrics")
    assert m.status_code == 200
    assert 0.0 <= m.json()["mrr"] <= 1.0


def test_train_defaults(client):
    r = client.post("/train", json={})
    assert r.status_code == 200
    assert r.json()["epochs"] == 20


def test_trained_model_survives_restart(client, data_dir):
    client.post("/train", json={"epochs": 3})
    with TestClient(create_app(data_dir)) as again:
        m = again.get("/metrics")
        assert m.status_code == 200


def test_metrics_before_training(client):
    m = client.get("/metrics")
    assert m.status_code == 200
    doc = m.json()
    assert doc["hybrid_n"] == 4
    assert doc["n_instances"] == 4
