"""Serve the answer-span protocol over HTTP."""

from __future__ import annotations

import argparse
import sys

from .app import ServiceConfig, create_app


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qa-service",
        description="Serve an extractive question-answering model over HTTP.",
    )
    parser.add_argument(
        "--model",
        default="distilbert-base-uncased-distilled-squad",
        help="model identifier or local model directory",
    )
    parser.add_argument(
        "--bind", default="127.0.0.1:8000", help="host:port to listen on"
    )
    parser.add_argument(
        "--max-context",
        type=int,
        default=384,
        help="maximum context length in model tokens (default 384)",
    )
    parser.add_argument(
        "--max-answer-length",
        type=int,
        default=15,
        help="maximum answer span length in tokens (library default 15)",
    )
    parser.add_argument(
        "--handle-impossible-answer",
        action="store_true",
        help="let the model return empty answers for unanswerable questions",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = ServiceConfig(
        model=args.model,
        bind=args.bind,
        max_context=args.max_context,
        max_answer_length=args.max_answer_length,
        handle_impossible_answer=args.handle_impossible_answer,
    )
    from .model import ModelLoadError

    try:
        app = create_app(config)
    except ModelLoadError as exc:
        print(f"qa-service: {exc}", file=sys.stderr)
        return 1

    import uvicorn

    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


if __name__ == "__main__":
    sys.exit(main())
