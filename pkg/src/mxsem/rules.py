"""Syntactic-semantic refinement of dictionary matches.

The cascade runs in a fixed order: prune same-start overlaps to the finest
grain, join adjacent same-type mentions (locations first, which are then set
aside), absorb short gap text into components as parenthesized context, strip
stop words, link components to nearby actions/observations, and finally pull
ordinal and location qualifiers out of component strings.

Distances are measured in characters between the end of the left mention and
the start of the right one; the default maximum gap k is 10.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field, replace

from .lexicon import (
    PROVENANCE_RULE,
    CompiledLexicon,
    EntityMention,
    SemanticType,
    mention_sort_key,
)

logger = logging.getLogger(__name__)

HAS_ASSOCIATED_ACTION = "hasAssociatedAction"
HAS_ASSOCIATED_OBSERVATION = "hasAssociatedObservation"

DEFAULT_K = 10

DEFAULT_STOP_WORDS = frozenset(
    {
        "a", "an", "the", "of", "to", "in", "on", "at", "for",
        "and", "or", "is", "was", "were", "be", "been", "with",
    }
)

# Tried at every position; the leftmost match wins, ties broken by list order.
DEFAULT_ORDINAL_PATTERNS = (
    r"#(\d+)",
    r"\bno\.\s*(\d+)",
    r"\bno\s+(\d+)",
    r"\b(\d+)(?:st|nd|rd|th)\b",
)

# Values above this are treated as junk digit runs, not ordinals.
_MAX_ORDINAL = 2**63 - 1


@dataclass
class RuleConfig:
    k: int = DEFAULT_K
    stop_words: frozenset[str] = DEFAULT_STOP_WORDS
    ordinal_patterns: tuple[str, ...] = DEFAULT_ORDINAL_PATTERNS

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError(f"k must be non-negative, got {self.k}")
        self.stop_words = frozenset(w.lower() for w in self.stop_words)

    @classmethod
    def from_dict(cls, obj: dict) -> "RuleConfig":
        kwargs = {}
        if "k" in obj:
            kwargs["k"] = int(obj["k"])
        if "stop_words" in obj:
            kwargs["stop_words"] = frozenset(obj["stop_words"])
        return cls(**kwargs)

    @classmethod
    def from_json_file(cls, path: str) -> "RuleConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class Relation:
    """Component-to-Action/Observation link."""

    subject: EntityMention
    predicate: str
    object: EntityMention

    def __post_init__(self) -> None:
        if self.subject.sem_type is not SemanticType.COMPONENT:
            raise ValueError("relation subject must be a Component mention")
        expected = {
            HAS_ASSOCIATED_ACTION: SemanticType.ACTION,
            HAS_ASSOCIATED_OBSERVATION: SemanticType.OBSERVATION,
        }.get(self.predicate)
        if expected is None:
            raise ValueError(f"unknown predicate {self.predicate!r}")
        if self.object.sem_type is not expected:
            raise ValueError(
                f"{self.predicate} requires a {expected.value} object, "
                f"got {self.object.sem_type.value}"
            )

    def key(self) -> tuple:
        return (
            self.subject.start,
            self.subject.end,
            self.predicate,
            self.object.start,
            self.object.end,
        )


@dataclass
class OrdinalValue:
    value: int
    source_span: tuple[int, int]  # offsets within the component string

    def __post_init__(self) -> None:
        if self.value < 1:
            raise ValueError(f"ordinal value must be >= 1, got {self.value}")


def prune_to_finest(mentions: list[EntityMention]) -> list[EntityMention]:
    """Among mentions sharing start offset and type, keep only the longest.

    Everything else passes through unchanged, in its original order; nests
    with different starts (e.g. a shorter match ending where a longer one
    does) are deliberately retained.
    """
    best: dict[tuple[int, SemanticType], EntityMention] = {}
    for m in mentions:
        key = (m.start, m.sem_type)
        cur = best.get(key)
        if cur is None or m.length > cur.length:
            best[key] = m
    return [m for m in mentions if best[(m.start, m.sem_type)] is m]


def _join_one_type(
    mentions: list[EntityMention], sentence_text: str
) -> list[EntityMention]:
    """Merge runs of same-type mentions separated only by whitespace.

    A mention extends the nearest preceding run when nothing but whitespace
    lies between; a mention overlapping that run starts its own. Single-member
    runs keep their original mention object.
    """
    runs: list[list[EntityMention]] = []
    for m in sorted(mentions, key=mention_sort_key):
        if runs:
            last = runs[-1]
            run_end = last[-1].end
            if m.start >= run_end and not sentence_text[run_end : m.start].strip():
                last.append(m)
                continue
        runs.append([m])
    out: list[EntityMention] = []
    for run in runs:
        if len(run) == 1:
            out.append(run[0])
            continue
        start, end = run[0].start, run[-1].end
        out.append(
            EntityMention(
                surface=sentence_text[start:end],
                start=start,
                end=end,
                sem_type=run[0].sem_type,
                canonical_uri=None,
                provenance=PROVENANCE_RULE,
            )
        )
    return out


def join_same_type(
    mentions: list[EntityMention], sentence_text: str, config: RuleConfig
) -> list[EntityMention]:
    """Join whitespace-adjacent same-type mentions, locations first.

    Joining is applied to Location mentions before the remaining types; the
    result contains every mention (joined or untouched) sorted by
    (start, -length). Idempotent: a second application changes nothing.
    """
    locations = [m for m in mentions if m.sem_type is SemanticType.LOCATION]
    rest = [m for m in mentions if m.sem_type is not SemanticType.LOCATION]

    joined = _join_one_type(locations, sentence_text)
    by_type: dict[SemanticType, list[EntityMention]] = {}
    for m in rest:
        by_type.setdefault(m.sem_type, []).append(m)
    for sem_type in sorted(by_type, key=lambda t: t.value):
        joined.extend(_join_one_type(by_type[sem_type], sentence_text))
    joined.sort(key=mention_sort_key)
    return joined


def _strip_gap_words(gap_text: str, config: RuleConfig) -> str:
    kept = [w for w in gap_text.split() if w.lower() not in config.stop_words]
    return " ".join(kept).lower()


def absorb_context_gap(
    mentions: list[EntityMention], sentence_text: str, config: RuleConfig
) -> list[EntityMention]:
    """Capture short gap text into the following Component as context.

    For each mention, the nearest preceding mention ending at or before its
    start defines the gap. When the gap is within (0, k] and the right member
    is a Component, the non-stop-word gap text (lowercased) becomes a
    parenthesized prefix of its surface and its context note, and the span
    extends over the absorbed text. A gap of only stop words or whitespace
    extends the span without adding a note. Non-Component right members are
    left untouched.
    """
    ordered = sorted(mentions, key=mention_sort_key)
    out: list[EntityMention] = []
    for idx, m in enumerate(ordered):
        left_end = -1
        for prev in ordered[:idx]:
            if prev.end <= m.start and prev.end > left_end:
                left_end = prev.end
        if left_end < 0 or m.sem_type is not SemanticType.COMPONENT:
            out.append(m)
            continue
        gap = m.start - left_end
        if not 0 < gap <= config.k:
            out.append(m)
            continue
        gap_text = sentence_text[left_end : m.start]
        if not gap_text.strip():
            out.append(m)
            continue
        absorbed_start = left_end + (len(gap_text) - len(gap_text.lstrip()))
        note_text = _strip_gap_words(gap_text, config)
        if note_text:
            out.append(
                replace(
                    m,
                    surface=f"({note_text}) {m.surface}",
                    start=absorbed_start,
                    context_note=f"({note_text})",
                    provenance=PROVENANCE_RULE,
                )
            )
        else:
            out.append(
                replace(m, start=absorbed_start, provenance=PROVENANCE_RULE)
            )
    out.sort(key=mention_sort_key)
    return out


def strip_stopwords(
    mention: EntityMention, config: RuleConfig
) -> EntityMention | None:
    """Remove stop-word tokens from the surface; span and note are untouched.

    Returns None when the surface consists entirely of stop words (the caller
    drops such mentions).
    """
    parts = mention.surface.split()
    kept = [p for p in parts if p.lower() not in config.stop_words]
    if not kept:
        return None
    if len(kept) == len(parts):
        return mention
    return replace(mention, surface=" ".join(kept))


def extract_relations(
    mentions: list[EntityMention], config: RuleConfig
) -> list[Relation]:
    """Link every Component to every Action/Observation within k characters.

    Either textual order qualifies, a mention may participate in several
    relations, and the output is deduplicated and ordered by
    (subject.start, object.start).
    """
    components = [m for m in mentions if m.sem_type is SemanticType.COMPONENT]
    predicates = {
        SemanticType.ACTION: HAS_ASSOCIATED_ACTION,
        SemanticType.OBSERVATION: HAS_ASSOCIATED_OBSERVATION,
    }
    relations: list[Relation] = []
    seen: set[tuple] = set()
    for comp in components:
        for other in mentions:
            pred = predicates.get(other.sem_type)
            if pred is None:
                continue
            left, right = (comp, other) if comp.start <= other.start else (other, comp)
            if right.start - left.end > config.k:
                continue
            rel = Relation(subject=comp, predicate=pred, object=other)
            if rel.key() not in seen:
                seen.add(rel.key())
                relations.append(rel)
    relations.sort(key=lambda r: r.key())
    return relations


def extract_ordinal(
    component_surface: str, config: RuleConfig | None = None
) -> tuple[OrdinalValue, str] | None:
    """Pull the leftmost ordinal reference out of a component string.

    Returns the ordinal value plus the surface with the ordinal removed, or
    None when no pattern matches. Additional ordinal references are left in
    place and logged; degenerate digit runs (overflowing or zero) are skipped
    with a warning.
    """
    patterns = (config.ordinal_patterns if config else DEFAULT_ORDINAL_PATTERNS)
    matches: list[tuple[int, int, re.Match]] = []
    for pat_idx, pat in enumerate(patterns):
        for m in re.finditer(pat, component_surface, flags=re.IGNORECASE):
            matches.append((m.start(), pat_idx, m))
    matches.sort(key=lambda t: (t[0], t[1]))

    for start, _, m in matches:
        value = int(m.group(1))
        if value < 1 or value > _MAX_ORDINAL:
            logger.warning(
                "skipping out-of-range ordinal %r in %r", m.group(0), component_surface
            )
            continue
        if len(matches) > 1:
            logger.debug(
                "multiple ordinal references in %r; keeping the first",
                component_surface,
            )
        cleaned = " ".join(
            (component_surface[: m.start()] + " " + component_surface[m.end() :]).split()
        )
        return OrdinalValue(value, m.span()), cleaned
    return None


def split_location(
    component_surface: str, lexicon: CompiledLexicon
) -> tuple[str | None, str]:
    """Split a leading or trailing location qualifier off a component string.

    The maximal prefix run of whitespace-separated words matching Location
    variants is split off; when there is none, the suffix is tried. A fully
    location surface returns an empty residual (the caller drops the
    Component). Parenthesized context words never match, so captured context
    is not mistaken for a location.
    """
    words = component_surface.split()
    if not words:
        return None, component_surface
    lowered = [w.lower() for w in words]
    seqs = lexicon.location_sequences
    if not seqs:
        return None, component_surface
    max_len = max(len(s) for s in seqs)

    def consume_prefix(start: int) -> int:
        i = start
        while i < len(words):
            step = 0
            for length in range(min(max_len, len(words) - i), 0, -1):
                if tuple(lowered[i : i + length]) in seqs:
                    step = length
                    break
            if step == 0:
                break
            i += step
        return i

    i = consume_prefix(0)
    if i > 0:
        location = " ".join(words[:i])
        residual = " ".join(words[i:])
        return location, residual

    j = len(words)
    while j > 0:
        step = 0
        for length in range(min(max_len, j), 0, -1):
            if tuple(lowered[j - length : j]) in seqs:
                step = length
                break
        if step == 0:
            break
        j -= step
    if j < len(words):
        location = " ".join(words[j:])
        residual = " ".join(words[:j])
        return location, residual
    return None, component_surface


@dataclass
class CascadeResult:
    mentions: list[EntityMention]
    relations: list[Relation]
    diagnostics: list[str] = field(default_factory=list)


def _remove_ordinal_from_note(note: str | None, config: RuleConfig | None) -> str | None:
    if not note:
        return note
    inner = note[1:-1] if note.startswith("(") and note.endswith(")") else note
    hit = extract_ordinal(inner, config)
    if hit is None:
        return note
    _, cleaned = hit
    return f"({cleaned})" if cleaned else None


def _drop_empty_parens(surface: str) -> str:
    return " ".join(surface.replace("( ", "(").replace(" )", ")").replace("()", " ").split())


def _locate_in_sentence(
    sentence_text: str, needle: str, window: tuple[int, int]
) -> tuple[int, int] | None:
    lo, hi = window
    pos = sentence_text.lower().find(needle.lower(), lo, hi)
    if pos < 0:
        pos = sentence_text.lower().find(needle.lower())
    if pos < 0:
        return None
    return pos, pos + len(needle)


def run_cascade(
    mentions: list[EntityMention],
    sentence_text: str,
    lexicon: CompiledLexicon,
    config: RuleConfig,
) -> CascadeResult:
    """Run the full rule cascade over base lookup matches for one sentence.

    Order: prune -> join (locations first, then set aside) -> absorb context
    gaps -> strip stop words -> extract relations -> per-component ordinal and
    location extraction. Components whose surface reduces to nothing are
    dropped along with their relations.
    """
    diagnostics: list[str] = []
    # Work on copies; callers keep their mention objects untouched.
    ms = [replace(m) for m in sorted(mentions, key=mention_sort_key)]
    ms = prune_to_finest(ms)
    ms = join_same_type(ms, sentence_text, config)

    locations = [m for m in ms if m.sem_type is SemanticType.LOCATION]
    working = [m for m in ms if m.sem_type is not SemanticType.LOCATION]
    working = absorb_context_gap(working, sentence_text, config)

    def strip_all(group: list[EntityMention]) -> list[EntityMention]:
        kept = []
        for m in group:
            stripped = strip_stopwords(m, config)
            if stripped is None:
                diagnostics.append(
                    f"dropped fully-stop-word mention {m.surface!r} at "
                    f"[{m.start},{m.end})"
                )
            else:
                kept.append(stripped)
        return kept

    working = strip_all(working)
    locations = strip_all(locations)

    relations = extract_relations(working, config)

    ordinal_mentions: list[EntityMention] = []
    dropped: list[EntityMention] = []
    for comp in working:
        if comp.sem_type is not SemanticType.COMPONENT:
            continue
        hit = extract_ordinal(comp.surface, config)
        if hit is not None:
            ordinal, cleaned = hit
            ord_text = comp.surface[ordinal.source_span[0] : ordinal.source_span[1]]
            comp.surface = _drop_empty_parens(cleaned)
            comp.ordinal = ordinal.value
            comp.context_note = _remove_ordinal_from_note(comp.context_note, config)
            span = _locate_in_sentence(sentence_text, ord_text, (comp.start, comp.end))
            if span is None:
                diagnostics.append(
                    f"ordinal {ord_text!r} not locatable in sentence; value kept"
                )
            else:
                ordinal_mentions.append(
                    EntityMention(
                        surface=sentence_text[span[0] : span[1]],
                        start=span[0],
                        end=span[1],
                        sem_type=SemanticType.ORDINAL,
                        provenance=PROVENANCE_RULE,
                    )
                )
        location, residual = split_location(comp.surface, lexicon)
        if location is not None:
            if residual:
                comp.surface = residual
                comp.location = location
            else:
                diagnostics.append(
                    f"dropped fully-location component {comp.surface!r} at "
                    f"[{comp.start},{comp.end})"
                )
                dropped.append(comp)

    if dropped:
        dropped_ids = {id(m) for m in dropped}
        working = [m for m in working if id(m) not in dropped_ids]
        relations = [r for r in relations if id(r.subject) not in dropped_ids]

    final = sorted(working + locations + ordinal_mentions, key=mention_sort_key)

    by_end: dict[tuple[int, SemanticType], list[EntityMention]] = {}
    for m in final:
        by_end.setdefault((m.end, m.sem_type), []).append(m)
    for (end, sem_type), group in by_end.items():
        if len(group) > 1:
            diagnostics.append(
                f"same-end nested {sem_type.value} mentions at end {end}: "
                + ", ".join(repr(m.surface) for m in group)
            )

    return CascadeResult(mentions=final, relations=relations, diagnostics=diagnostics)
