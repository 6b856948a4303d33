"""Per-sentence and per-record orchestration of the three extraction modes.

base:  dictionary lookup only (every match, no relations).
rules: lookup refined by the rule cascade (joining, context capture, stop-word
       cleanup, relation linking, ordinal/location decomposition).
qa:    lookup-derived Action/Observation triggers drive a QA backend; answers
       replace dictionary components, locations are handled like the rule
       pipeline, and relations come from the trigger-answer links.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .corpus import MaintenanceRecordDoc, Sentence, split_sentences, tokenize
from .lexicon import (
    CompiledLexicon,
    EntityMention,
    SemanticType,
    lookup_all,
    mention_sort_key,
)
from .qa import QaBackend, qa_extract_components
from .rules import (
    CascadeResult,
    Relation,
    RuleConfig,
    join_same_type,
    prune_to_finest,
    run_cascade,
    strip_stopwords,
)
from .semantics import MaintenanceRecordInstance, build_activities

PIPELINE_MODES = ("base", "rules", "qa")


@dataclass
class SentenceResult:
    sentence: Sentence
    mentions: list[EntityMention]
    relations: list[Relation]
    diagnostics: list[str] = field(default_factory=list)

    @property
    def sentence_id(self) -> str:
        return f"{self.sentence.parent_record_id}#{self.sentence.index}"


@dataclass
class RecordResult:
    doc: MaintenanceRecordDoc
    sentences: list[SentenceResult]
    instance: MaintenanceRecordInstance


def extract_base(sentence: Sentence, lexicon: CompiledLexicon) -> SentenceResult:
    """Dictionary lookup only; every overlapping match, no relations."""
    tokens = tokenize(sentence.text)
    mentions = lookup_all(sentence, tokens, lexicon)
    return SentenceResult(sentence, mentions, [])


def extract_rules(
    sentence: Sentence, lexicon: CompiledLexicon, config: RuleConfig
) -> SentenceResult:
    """Dictionary lookup refined by the full rule cascade."""
    tokens = tokenize(sentence.text)
    mentions = lookup_all(sentence, tokens, lexicon)
    result: CascadeResult = run_cascade(mentions, sentence.text, lexicon, config)
    return SentenceResult(
        sentence, result.mentions, result.relations, result.diagnostics
    )


def extract_qa(
    sentence: Sentence,
    lexicon: CompiledLexicon,
    backend: QaBackend,
    config: RuleConfig,
    score_floor: float = 0.10,
) -> SentenceResult:
    """QA extraction: triggers ask the backend, answers become components.

    Dictionary Component matches are replaced by answer-derived components;
    Action/Observation matches (the triggers) are kept as-is, and Location
    matches go through the same prune/join/stop-word treatment as the rule
    pipeline before joining the output.
    """
    tokens = tokenize(sentence.text)
    base = lookup_all(sentence, tokens, lexicon)
    diagnostics: list[str] = []

    locations = [m for m in base if m.sem_type is SemanticType.LOCATION]
    locations = join_same_type(prune_to_finest(locations), sentence.text, config)
    kept_locations = []
    for m in locations:
        stripped = strip_stopwords(m, config)
        if stripped is not None:
            kept_locations.append(stripped)

    triggers = [
        m
        for m in base
        if m.sem_type in (SemanticType.ACTION, SemanticType.OBSERVATION)
    ]
    qa_result = qa_extract_components(
        sentence, triggers, backend, lexicon, config, score_floor=score_floor
    )
    diagnostics.extend(qa_result.diagnostics)

    seen = {m.span_key() for m in qa_result.mentions}
    merged = list(qa_result.mentions)
    for m in triggers + kept_locations:
        if m.span_key() not in seen:
            seen.add(m.span_key())
            merged.append(m)
    merged.sort(key=mention_sort_key)
    return SentenceResult(sentence, merged, qa_result.relations, diagnostics)


def extract_sentence(
    sentence: Sentence,
    mode: str,
    lexicon: CompiledLexicon,
    config: RuleConfig,
    backend: QaBackend | None = None,
    score_floor: float = 0.10,
) -> SentenceResult:
    if mode == "base":
        return extract_base(sentence, lexicon)
    if mode == "rules":
        return extract_rules(sentence, lexicon, config)
    if mode == "qa":
        if backend is None:
            raise ValueError("qa mode requires a backend")
        return extract_qa(sentence, lexicon, backend, config, score_floor)
    raise ValueError(f"unknown pipeline mode {mode!r}")


def process_record(
    doc: MaintenanceRecordDoc,
    mode: str,
    lexicon: CompiledLexicon,
    config: RuleConfig,
    backend: QaBackend | None = None,
    score_floor: float = 0.10,
) -> RecordResult:
    """Split a record into sentences, extract each, and assemble the instance."""
    sentences = split_sentences(doc.text, doc.record_id)
    results = [
        extract_sentence(s, mode, lexicon, config, backend, score_floor)
        for s in sentences
    ]
    activities = []
    for res in results:
        activities.extend(
            build_activities(res.sentence.index, res.mentions, res.relations)
        )
    instance = MaintenanceRecordInstance(
        record_id=doc.record_id,
        asset_id=doc.asset_id,
        date_performed=doc.date_performed,
        activities=activities,
    )
    return RecordResult(doc=doc, sentences=results, instance=instance)
