"""Scoring predicted mentions against gold annotations.

Matching is one-to-one: candidate pairs must agree on semantic type, then
either on exact span (strict) or on token-level Sørensen-Dice similarity at or
above a threshold (fuzzy). Greedy assignment over candidates sorted by
descending similarity prevents one prediction from matching several gold
entities. Precision/recall/F1 are reported per type and pooled (micro).
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from .lexicon import SemanticType

ALL_TYPES = tuple(SemanticType)


@dataclass(frozen=True)
class EvalEntity:
    text: str
    start: int
    end: int
    sem_type: SemanticType
    context_note: str | None = None
    provenance: str | None = None


@dataclass
class GoldAnnotation:
    sentence_id: str
    entities: list[EvalEntity] = field(default_factory=list)


@dataclass(frozen=True)
class MatchMode:
    """Strict (exact boundary) or fuzzy (Dice >= threshold) matching."""

    kind: str  # "strict" | "fuzzy"
    threshold: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("strict", "fuzzy"):
            raise ValueError(f"unknown match mode {self.kind!r}")
        if self.kind == "fuzzy":
            if self.threshold is None or not 0.0 <= self.threshold <= 1.0:
                raise ValueError(
                    f"fuzzy threshold must be in [0, 1], got {self.threshold}"
                )

    @classmethod
    def strict(cls) -> "MatchMode":
        return cls("strict")

    @classmethod
    def fuzzy(cls, threshold: float) -> "MatchMode":
        return cls("fuzzy", threshold)

    def label(self) -> str:
        if self.kind == "strict":
            return "strict"
        return f"fuzzy@{self.threshold:g}"


def _char_bigrams(s: str) -> list[str]:
    collapsed = " ".join(s.lower().split())
    return [collapsed[i : i + 2] for i in range(len(collapsed) - 1)]


def dice(a: str, b: str, char_bigrams: bool = False) -> float:
    """Sørensen-Dice coefficient over lowercase whitespace-token multisets.

    Two empty strings score 1.0. With char_bigrams=True, character bigrams of
    the whitespace-collapsed strings are compared instead (sensitivity
    analysis only; token mode is the normative metric).
    """
    items_a = _char_bigrams(a) if char_bigrams else a.lower().split()
    items_b = _char_bigrams(b) if char_bigrams else b.lower().split()
    if not items_a and not items_b:
        return 1.0
    ca, cb = Counter(items_a), Counter(items_b)
    inter = sum((ca & cb).values())
    return 2.0 * inter / (len(items_a) + len(items_b))


def _comparable_text(entity: EvalEntity) -> str:
    # Parenthesized context notes stay in the surface for comparison, minus
    # the parenthesis characters themselves.
    return entity.text.replace("(", "").replace(")", "")


@dataclass
class MatchResult:
    pairs: list[tuple[EvalEntity, EvalEntity]]  # (gold, predicted)
    unmatched_gold: list[EvalEntity]
    unmatched_predicted: list[EvalEntity]


def match_entities(
    gold: list[EvalEntity], predicted: list[EvalEntity], mode: MatchMode
) -> MatchResult:
    """One-to-one assignment of predictions to gold entities for one sentence.

    Candidates require equal semantic type plus exact (start, end) in strict
    mode, or Dice(gold text, predicted text) >= threshold in fuzzy mode.
    Greedy selection runs over candidates sorted by descending Dice, then by
    gold and predicted position; each entity is used at most once.
    """
    candidates: list[tuple[float, int, int]] = []
    for gi, g in enumerate(gold):
        for pi, p in enumerate(predicted):
            if g.sem_type is not p.sem_type:
                continue
            if mode.kind == "strict":
                if (g.start, g.end) == (p.start, p.end):
                    candidates.append((1.0, gi, pi))
            else:
                d = dice(g.text, _comparable_text(p))
                if d >= mode.threshold:
                    candidates.append((d, gi, pi))
    candidates.sort(
        key=lambda c: (
            -c[0],
            gold[c[1]].start,
            gold[c[1]].end,
            predicted[c[2]].start,
            predicted[c[2]].end,
        )
    )
    used_gold: set[int] = set()
    used_pred: set[int] = set()
    pairs: list[tuple[EvalEntity, EvalEntity]] = []
    for _, gi, pi in candidates:
        if gi in used_gold or pi in used_pred:
            continue
        used_gold.add(gi)
        used_pred.add(pi)
        pairs.append((gold[gi], predicted[pi]))
    return MatchResult(
        pairs=pairs,
        unmatched_gold=[g for i, g in enumerate(gold) if i not in used_gold],
        unmatched_predicted=[
            p for i, p in enumerate(predicted) if i not in used_pred
        ],
    )


@dataclass(frozen=True)
class Scores:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float


def make_scores(tp: int, fp: int, fn: int) -> Scores:
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = (
        2.0 * precision * recall / (precision + recall)
        if precision + recall > 0
        else 0.0
    )
    return Scores(tp, fp, fn, precision, recall, f1)


@dataclass
class EvalReport:
    mode: MatchMode
    per_type: dict[SemanticType, Scores]
    overall: Scores


class SentenceAlignmentError(ValueError):
    """Predicted corpus references a sentence_id absent from the gold corpus."""


def score(
    gold_corpus: list[GoldAnnotation],
    predicted_corpus: list[GoldAnnotation],
    mode: MatchMode,
) -> EvalReport:
    """Accumulate tp/fp/fn over all sentences; micro-average overall row.

    Gold sentences with no prediction record count every gold entity as a
    miss. A predicted sentence_id that does not exist in gold raises
    SentenceAlignmentError rather than silently misaligning.
    """
    gold_by_id = {g.sentence_id: g for g in gold_corpus}
    pred_by_id: dict[str, GoldAnnotation] = {}
    for p in predicted_corpus:
        if p.sentence_id not in gold_by_id:
            raise SentenceAlignmentError(
                f"predicted sentence_id {p.sentence_id!r} not present in gold"
            )
        pred_by_id[p.sentence_id] = p

    tp: Counter = Counter()
    fp: Counter = Counter()
    fn: Counter = Counter()
    for sid, g in gold_by_id.items():
        p = pred_by_id.get(sid)
        predicted = p.entities if p else []
        result = match_entities(g.entities, predicted, mode)
        for ge, _ in result.pairs:
            tp[ge.sem_type] += 1
        for ge in result.unmatched_gold:
            fn[ge.sem_type] += 1
        for pe in result.unmatched_predicted:
            fp[pe.sem_type] += 1

    per_type = {t: make_scores(tp[t], fp[t], fn[t]) for t in ALL_TYPES}
    overall = make_scores(sum(tp.values()), sum(fp.values()), sum(fn.values()))
    return EvalReport(mode=mode, per_type=per_type, overall=overall)


def sweep(
    gold_corpus: list[GoldAnnotation],
    predicted_corpus: list[GoldAnnotation],
    thresholds: list[float],
) -> list[EvalReport]:
    """One fuzzy report per threshold (in the given ascending order) plus a
    final strict report."""
    for t in thresholds:
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"threshold {t} outside [0, 1]")
    reports = [
        score(gold_corpus, predicted_corpus, MatchMode.fuzzy(t))
        for t in thresholds
    ]
    reports.append(score(gold_corpus, predicted_corpus, MatchMode.strict()))
    return reports


class AnnotationFormatError(ValueError):
    pass


def _parse_entity(obj: dict, where: str, allow_extra: bool) -> EvalEntity:
    try:
        sem_type = SemanticType(obj["type"])
    except (KeyError, ValueError):
        raise AnnotationFormatError(f"{where}: bad or missing entity type")
    text = obj.get("text")
    start, end = obj.get("start"), obj.get("end")
    if not isinstance(text, str):
        raise AnnotationFormatError(f"{where}: entity text must be a string")
    if not isinstance(start, int) or not isinstance(end, int) or start < 0 or end <= start:
        raise AnnotationFormatError(f"{where}: bad entity span [{start},{end})")
    return EvalEntity(
        text=text,
        start=start,
        end=end,
        sem_type=sem_type,
        context_note=obj.get("context_note") if allow_extra else None,
        provenance=obj.get("provenance") if allow_extra else None,
    )


def load_annotations(path: str, gold: bool = False) -> list[GoldAnnotation]:
    """Read a JSON Lines annotation file ({"sentence_id", "entities": [...]}).

    Gold files additionally forbid duplicate entities and duplicate sentence
    ids; predicted files may carry context_note/provenance per entity.
    """
    records: list[GoldAnnotation] = []
    seen_ids: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            where = f"line {line_no}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise AnnotationFormatError(f"{where}: invalid JSON ({exc.msg})")
            sid = obj.get("sentence_id")
            if not isinstance(sid, str) or not sid:
                raise AnnotationFormatError(f'{where}: missing "sentence_id"')
            ents_raw = obj.get("entities", [])
            if not isinstance(ents_raw, list):
                raise AnnotationFormatError(f'{where}: "entities" must be a list')
            entities = [
                _parse_entity(e, where, allow_extra=not gold) for e in ents_raw
            ]
            if gold:
                if sid in seen_ids:
                    raise AnnotationFormatError(
                        f"{where}: duplicate sentence_id {sid!r}"
                    )
                keys = [(e.text, e.start, e.end, e.sem_type) for e in entities]
                if len(keys) != len(set(keys)):
                    raise AnnotationFormatError(
                        f"{where}: duplicate entities in gold sentence {sid!r}"
                    )
            seen_ids.add(sid)
            records.append(GoldAnnotation(sentence_id=sid, entities=entities))
    return records


def annotation_to_json_line(record: GoldAnnotation) -> str:
    ents = []
    for e in record.entities:
        obj: dict = {
            "text": e.text,
            "start": e.start,
            "end": e.end,
            "type": e.sem_type.value,
        }
        if e.context_note is not None:
            obj["context_note"] = e.context_note
        if e.provenance is not None:
            obj["provenance"] = e.provenance
        ents.append(obj)
    return json.dumps(
        {"sentence_id": record.sentence_id, "entities": ents}, ensure_ascii=False
    )


def report_to_json_obj(report: EvalReport) -> dict:
    mode: dict = {"match": report.mode.kind}
    if report.mode.kind == "fuzzy":
        mode["threshold"] = report.mode.threshold

    def row(s: Scores) -> dict:
        return {
            "precision": s.precision,
            "recall": s.recall,
            "f1": s.f1,
            "tp": s.tp,
            "fp": s.fp,
            "fn": s.fn,
        }

    return {
        "mode": mode,
        "per_type": {t.value: row(report.per_type[t]) for t in ALL_TYPES},
        "overall": row(report.overall),
    }


def render_table(report: EvalReport) -> str:
    """Fixed-width text table for one report."""
    header = (
        f"{'Type':<13}{'Precision':>10}{'Recall':>10}{'F1':>10}"
        f"{'TP':>7}{'FP':>7}{'FN':>7}"
    )
    lines = [f"match mode: {report.mode.label()}", header, "-" * len(header)]

    def fmt(name: str, s: Scores) -> str:
        return (
            f"{name:<13}{s.precision:>10.4f}{s.recall:>10.4f}{s.f1:>10.4f}"
            f"{s.tp:>7}{s.fp:>7}{s.fn:>7}"
        )

    for t in ALL_TYPES:
        lines.append(fmt(t.value, report.per_type[t]))
    lines.append(fmt("All", report.overall))
    return "\n".join(lines)
