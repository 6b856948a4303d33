"""HTTP application implementing the answer-span protocol.

The app is built around an injected answerer so protocol behaviour is
testable without model weights. Per the protocol: malformed bodies get 400,
contexts longer than the configured token budget get 422, and the response
schema is always {"answer": str, "start": int, "end": int, "score": float}
with context[start:end] == answer or start == end == -1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel


class Answerer(Protocol):
    def answer(self, question: str, context: str) -> tuple[str, int, int, float]: ...

    def context_token_count(self, context: str) -> int: ...


@dataclass
class ServiceConfig:
    model: str = "distilbert-base-uncased-distilled-squad"
    bind: str = "127.0.0.1:8000"
    max_context: int = 384
    max_answer_length: int = 15
    handle_impossible_answer: bool = False

    @property
    def host(self) -> str:
        return self.bind.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.bind.rsplit(":", 1)[1])


class AnswerRequest(BaseModel):
    question: str
    context: str


class AnswerResponse(BaseModel):
    answer: str
    start: int
    end: int
    score: float


def create_app(
    config: ServiceConfig,
    answerer_factory: Callable[[ServiceConfig], Answerer] | None = None,
) -> FastAPI:
    """Build the app; the answerer loads once at startup and is reused."""
    if answerer_factory is None:
        def answerer_factory(cfg: ServiceConfig) -> Answerer:
            from .model import ExtractiveQaModel

            return ExtractiveQaModel(
                cfg.model,
                max_answer_length=cfg.max_answer_length,
                handle_impossible_answer=cfg.handle_impossible_answer,
            )

    app = FastAPI(title="qa-service", docs_url=None, redoc_url=None)
    answerer = answerer_factory(config)

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        # protocol: bad JSON or missing fields are a client error, plain 400
        return JSONResponse(status_code=400, content={"detail": "malformed request body"})

    @app.get("/v1/health")
    def health() -> PlainTextResponse:
        return PlainTextResponse("ok")

    @app.post("/v1/answer", response_model=AnswerResponse)
    def answer(body: AnswerRequest):
        tokens = answerer.context_token_count(body.context)
        if tokens > config.max_context:
            return JSONResponse(
                status_code=422,
                content={
                    "detail": (
                        f"context is {tokens} model tokens; "
                        f"limit is {config.max_context}"
                    )
                },
            )
        text, start, end, score = answerer.answer(body.question, body.context)
        return AnswerResponse(answer=text, start=start, end=end, score=score)

    return app
