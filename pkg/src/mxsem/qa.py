"""Question-answering extraction over a wire-protocol backend.

Every Action/Observation found by dictionary lookup becomes a trigger: the
backend is asked "What was <trigger>?" against the sentence, and each answer
span is turned into a Component mention (after ordinal extraction and location
splitting) linked back to its trigger. The backend is a plain HTTP service
(POST /v1/answer, GET /v1/health); a scriptable table-driven mock ships for
tests and offline runs.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Protocol

import requests

from .lexicon import (
    PROVENANCE_QA,
    CompiledLexicon,
    EntityMention,
    SemanticType,
    mention_sort_key,
)
from .rules import (
    HAS_ASSOCIATED_ACTION,
    HAS_ASSOCIATED_OBSERVATION,
    Relation,
    RuleConfig,
    extract_ordinal,
    split_location,
)

logger = logging.getLogger(__name__)

DEFAULT_SCORE_FLOOR = 0.10
DEFAULT_MAX_IN_FLIGHT = 4
ENDPOINT_ENV_VAR = "MXSEM_QA_ENDPOINT"

TRIGGER_TYPES = (SemanticType.ACTION, SemanticType.OBSERVATION)


@dataclass(frozen=True)
class QaQuery:
    question: str
    context: str


@dataclass(frozen=True)
class QaAnswer:
    answer_text: str
    start: int  # -1/-1 means "text only"; the client resolves the span
    end: int
    score: float


class QaBackendError(RuntimeError):
    """Backend unreachable, misbehaving, or answering off-protocol."""


class QaBackend(Protocol):
    def answer(self, query: QaQuery) -> QaAnswer: ...

    def health(self) -> bool: ...


class HttpQaBackend:
    """Client for the normative HTTP protocol.

    POST {endpoint}/v1/answer with {"question", "context"} returns
    {"answer", "start", "end", "score"}; a 503 is retried once. GET
    {endpoint}/v1/health must return 200 "ok".
    """

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout

    def answer(self, query: QaQuery) -> QaAnswer:
        body = {"question": query.question, "context": query.context}
        url = f"{self.endpoint}/v1/answer"
        for attempt in (1, 2):
            try:
                resp = requests.post(url, json=body, timeout=self.timeout)
            except requests.RequestException as exc:
                raise QaBackendError(f"backend unreachable: {exc}") from exc
            if resp.status_code == 503 and attempt == 1:
                continue
            break
        if resp.status_code != 200:
            raise QaBackendError(f"backend returned HTTP {resp.status_code}")
        try:
            payload = resp.json()
            return QaAnswer(
                answer_text=str(payload["answer"]),
                start=int(payload["start"]),
                end=int(payload["end"]),
                score=float(payload["score"]),
            )
        except (ValueError, KeyError, TypeError) as exc:
            raise QaBackendError(f"malformed backend response: {exc}") from exc

    def health(self) -> bool:
        try:
            resp = requests.get(f"{self.endpoint}/v1/health", timeout=self.timeout)
        except requests.RequestException:
            return False
        return resp.status_code == 200


class MockQaBackend:
    """Deterministic table-driven backend keyed by (question, context).

    Unknown queries get an empty zero-score answer, which the pipeline
    discards. Counts calls so tests can assert one call per trigger.
    """

    def __init__(self, table: dict[tuple[str, str], QaAnswer]):
        self.table = table
        self.calls: list[QaQuery] = []  # list.append is safe under the GIL

    @property
    def call_count(self) -> int:
        return len(self.calls)

    @classmethod
    def from_entries(cls, entries: list[dict]) -> "MockQaBackend":
        table: dict[tuple[str, str], QaAnswer] = {}
        for e in entries:
            table[(e["question"], e["context"])] = QaAnswer(
                answer_text=e.get("answer", ""),
                start=int(e.get("start", -1)),
                end=int(e.get("end", -1)),
                score=float(e.get("score", 1.0)),
            )
        return cls(table)

    @classmethod
    def from_file(cls, path: str) -> "MockQaBackend":
        with open(path, "r", encoding="utf-8") as fh:
            entries = json.load(fh)
        if not isinstance(entries, list):
            raise ValueError("mock table must be a JSON array of entries")
        return cls.from_entries(entries)

    def answer(self, query: QaQuery) -> QaAnswer:
        self.calls.append(query)
        return self.table.get(
            (query.question, query.context), QaAnswer("", -1, -1, 0.0)
        )

    def health(self) -> bool:
        return True


def generate_question(trigger: EntityMention) -> str:
    """Build the question for an Action/Observation trigger."""
    if trigger.sem_type not in TRIGGER_TYPES:
        raise ValueError(
            f"trigger must be Action or Observation, got {trigger.sem_type.value}"
        )
    return f"What was {trigger.surface.lower()}?"


@dataclass
class QaExtractResult:
    mentions: list[EntityMention]
    relations: list[Relation]
    diagnostics: list[str] = field(default_factory=list)


def _resolve_answer_span(
    answer: QaAnswer, context: str
) -> tuple[int, int] | str:
    """Return validated (start, end) offsets, or an error string."""
    if (answer.start, answer.end) == (-1, -1):
        pos = context.find(answer.answer_text)
        if pos < 0:
            return f"answer text {answer.answer_text!r} not found in context"
        return pos, pos + len(answer.answer_text)
    if not (0 <= answer.start < answer.end <= len(context)):
        return f"answer offsets [{answer.start},{answer.end}) outside context"
    if context[answer.start : answer.end] != answer.answer_text:
        return (
            f"answer offsets [{answer.start},{answer.end}) do not cover "
            f"{answer.answer_text!r}"
        )
    return answer.start, answer.end


def _postprocess_component(
    comp: EntityMention,
    sentence_text: str,
    lexicon: CompiledLexicon,
    config: RuleConfig,
    diagnostics: list[str],
) -> list[EntityMention]:
    """Apply ordinal extraction and location splitting to a fresh QA component.

    Returns derived Ordinal/Location mentions; mutates comp in place. An empty
    residual surface marks the component as dropped (surface set to "")."""
    derived: list[EntityMention] = []
    answer_slice = sentence_text[comp.start : comp.end]

    hit = extract_ordinal(comp.surface, config)
    if hit is not None:
        ordinal, cleaned = hit
        src_lo, src_hi = ordinal.source_span
        ord_text = comp.surface[src_lo:src_hi]
        comp.surface = cleaned
        comp.ordinal = ordinal.value
        pos = answer_slice.lower().find(ord_text.lower())
        if pos >= 0:
            lo = comp.start + pos
            derived.append(
                EntityMention(
                    surface=sentence_text[lo : lo + len(ord_text)],
                    start=lo,
                    end=lo + len(ord_text),
                    sem_type=SemanticType.ORDINAL,
                    provenance=PROVENANCE_QA,
                )
            )
        else:
            diagnostics.append(
                f"ordinal {ord_text!r} not locatable in answer span; value kept"
            )

    location, residual = split_location(comp.surface, lexicon)
    if location is not None:
        comp.location = location
        comp.surface = residual
        pos = answer_slice.lower().find(location.lower())
        if pos >= 0:
            lo = comp.start + pos
            derived.append(
                EntityMention(
                    surface=sentence_text[lo : lo + len(location)],
                    start=lo,
                    end=lo + len(location),
                    sem_type=SemanticType.LOCATION,
                    provenance=PROVENANCE_QA,
                )
            )
    return derived


def qa_extract_components(
    sentence,
    base_mentions: list[EntityMention],
    backend: QaBackend,
    lexicon: CompiledLexicon,
    config: RuleConfig,
    score_floor: float = DEFAULT_SCORE_FLOOR,
    max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
) -> QaExtractResult:
    """Turn backend answers into Component mentions and trigger relations.

    One backend call per trigger (issued concurrently up to max_in_flight,
    results processed in trigger order). Identical answer spans from several
    triggers merge into one mention with multiple relations; a backend failure
    on one trigger is diagnosed and the rest continue.
    """
    triggers = sorted(
        (m for m in base_mentions if m.sem_type in TRIGGER_TYPES),
        key=mention_sort_key,
    )
    diagnostics: list[str] = []
    if not triggers:
        return QaExtractResult([], [], diagnostics)

    def ask(trigger: EntityMention) -> QaAnswer | Exception:
        try:
            return backend.answer(
                QaQuery(generate_question(trigger), sentence.text)
            )
        except Exception as exc:  # per-trigger isolation
            return exc

    workers = max(1, min(max_in_flight, len(triggers)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        answers = list(pool.map(ask, triggers))

    components: dict[tuple[int, int], EntityMention] = {}
    derived_by_span: dict[tuple[int, int], list[EntityMention]] = {}
    relations: list[Relation] = []
    seen_rel: set[tuple] = set()

    for trigger, answer in zip(triggers, answers):
        label = f"trigger {trigger.surface!r} [{trigger.start},{trigger.end})"
        if isinstance(answer, Exception):
            diagnostics.append(f"{label}: backend error: {answer}")
            continue
        if not answer.answer_text:
            continue
        if answer.score < score_floor:
            diagnostics.append(
                f"{label}: answer {answer.answer_text!r} discarded "
                f"(score {answer.score:.4f} < {score_floor})"
            )
            continue
        span = _resolve_answer_span(answer, sentence.text)
        if isinstance(span, str):
            diagnostics.append(f"{label}: {span}")
            continue

        comp = components.get(span)
        if comp is None:
            comp = EntityMention(
                surface=sentence.text[span[0] : span[1]],
                start=span[0],
                end=span[1],
                sem_type=SemanticType.COMPONENT,
                provenance=PROVENANCE_QA,
            )
            derived = _postprocess_component(
                comp, sentence.text, lexicon, config, diagnostics
            )
            if not comp.surface:
                diagnostics.append(
                    f"{label}: answer {answer.answer_text!r} is all location; "
                    "component dropped"
                )
                continue
            components[span] = comp
            derived_by_span[span] = derived

        predicate = (
            HAS_ASSOCIATED_ACTION
            if trigger.sem_type is SemanticType.ACTION
            else HAS_ASSOCIATED_OBSERVATION
        )
        rel = Relation(subject=comp, predicate=predicate, object=trigger)
        if rel.key() not in seen_rel:
            seen_rel.add(rel.key())
            relations.append(rel)

    comp_list = [components[s] for s in sorted(components)]
    for a in comp_list:
        for b in comp_list:
            if a is not b and a.start < b.end and b.start < a.end:
                diagnostics.append(
                    f"overlapping distinct answer spans [{a.start},{a.end}) and "
                    f"[{b.start},{b.end}) kept separately"
                )
                break

    mentions: list[EntityMention] = list(comp_list)
    seen_span: set[tuple[int, int, str]] = {m.span_key() for m in mentions}
    for span in sorted(derived_by_span):
        for m in derived_by_span[span]:
            if m.span_key() not in seen_span:
                seen_span.add(m.span_key())
                mentions.append(m)
    mentions.sort(key=mention_sort_key)
    relations.sort(key=lambda r: r.key())
    return QaExtractResult(mentions, relations, diagnostics)
