"""Protocol conformance against an injected fake model (no weights needed)."""

from __future__ import annotations

import random

import pytest
from fastapi.testclient import TestClient

from qa_service.app import ServiceConfig, create_app


class FakeModel:
    """Deterministic answerer: returns the last word of the context."""

    def answer(self, question: str, context: str) -> tuple[str, int, int, float]:
        words = context.split()
        if not words:
            return "", -1, -1, 0.0
        last = words[-1]
        start = context.rfind(last)
        return last, start, start + len(last), 0.5

    def context_token_count(self, context: str) -> int:
        return len(context.split())


@pytest.fixture()
def client() -> TestClient:
    config = ServiceConfig(model="fake", max_context=16)
    app = create_app(config, answerer_factory=lambda cfg: FakeModel())
    return TestClient(app)


def test_health(client):
    resp = client.get("/v1/health")
    assert resp.status_code == 200
    assert resp.text == "ok"


def test_answer_schema(client):
    resp = client.post(
        "/v1/answer",
        json={"question": "What was replaced?", "context": "replaced the gasket"},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert set(body) == {"answer", "start", "end", "score"}
    assert body["answer"] == "gasket"
    assert "replaced the gasket"[body["start"] : body["end"]] == body["answer"]
    assert 0.0 <= body["score"] <= 1.0


def test_malformed_json_is_400(client):
    resp = client.post(
        "/v1/answer",
        content=b"{not json",
        headers={"content-type": "application/json"},
    )
    assert resp.status_code == 400
    resp = client.post("/v1/answer", json={"question": "q"})  # missing context
    assert resp.status_code == 400


def test_oversized_context_is_422(client):
    resp = client.post(
        "/v1/answer",
        json={"question": "q", "context": "word " * 40},
    )
    assert resp.status_code == 422
    assert "limit" in resp.json()["detail"]


def test_stateless_same_request_same_response(client):
    payload = {"question": "What was removed?", "context": "removed the brake"}
    first = client.post("/v1/answer", json=payload)
    second = client.post("/v1/answer", json=payload)
    assert first.status_code == second.status_code == 200
    assert first.json() == second.json()


def test_schema_validates_on_randomized_requests(client):
    rng = random.Random(20260810)
    words = ["gasket", "brake", "seal", "left", "removed", "r/h", "x1", "ünïcode"]
    for _ in range(20):
        context = " ".join(
            rng.choice(words) for _ in range(rng.randint(0, 12))
        )
        question = f"What was {rng.choice(words)}?"
        resp = client.post(
            "/v1/answer", json={"question": question, "context": context}
        )
        assert resp.status_code == 200
        body = resp.json()
        assert isinstance(body["answer"], str)
        assert isinstance(body["start"], int) and isinstance(body["end"], int)
        assert isinstance(body["score"], float) or isinstance(body["score"], int)
        assert 0.0 <= body["score"] <= 1.0
        if (body["start"], body["end"]) != (-1, -1):
            assert context[body["start"] : body["end"]] == body["answer"]
