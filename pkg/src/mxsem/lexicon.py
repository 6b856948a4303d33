"""Domain term lexicon: concept compilation and dictionary-driven entity lookup.

Concepts carry a canonical URI, a semantic type, and a set of surface variants
(preferred label, synonyms, spelling variants). Compilation builds an immutable
token-sequence index; lookup reports every case-insensitive, token-aligned
match, including nested and overlapping ones, leaving grain selection to the
rule layer. The same surface may map to concepts of different types (real
ambiguity); mapping to two concepts of the same type is a compilation error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .corpus import Sentence, Token, tokenize

PROVENANCE_BASE = "base"
PROVENANCE_RULE = "rule"
PROVENANCE_QA = "qa"


class SemanticType(Enum):
    COMPONENT = "Component"
    ACTION = "Action"
    OBSERVATION = "Observation"
    LOCATION = "Location"
    ORDINAL = "Ordinal"

    def __str__(self) -> str:  # serialization uses the capitalized name
        return self.value


# Types allowed in lexicon files; ordinals come from pattern extraction, never
# from dictionary lookup.
LEXICON_FILE_TYPES = (
    SemanticType.COMPONENT,
    SemanticType.ACTION,
    SemanticType.OBSERVATION,
    SemanticType.LOCATION,
)


class LexiconError(ValueError):
    """Lexicon file or compilation problem; .problems lists every violation."""

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


def normalize_surface(s: str) -> str:
    """Lowercase and collapse internal whitespace."""
    return " ".join(s.lower().split())


def variant_token_key(s: str) -> tuple[str, ...]:
    """Token sequence used to index a variant (normalized, then tokenized)."""
    return tuple(t.text for t in tokenize(normalize_surface(s)))


@dataclass
class LexiconConcept:
    canonical_uri: str
    sem_type: SemanticType
    preferred_label: str
    variants: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.canonical_uri:
            raise LexiconError(["concept with empty canonical_uri"])
        if not self.preferred_label.strip():
            raise LexiconError([f"{self.canonical_uri}: empty preferred_label"])
        merged = [self.preferred_label] + list(self.variants)
        seen: set[str] = set()
        deduped: list[str] = []
        for v in merged:
            if not v.strip():
                raise LexiconError([f"{self.canonical_uri}: empty variant"])
            norm = normalize_surface(v)
            if norm not in seen:
                seen.add(norm)
                deduped.append(v)
        self.variants = deduped


@dataclass
class EntityMention:
    """A typed text span. Offsets index the sentence; rule transformations may
    rewrite the surface but keep the span covering all absorbed text."""

    surface: str
    start: int
    end: int
    sem_type: SemanticType
    canonical_uri: str | None = None
    context_note: str | None = None
    provenance: str = PROVENANCE_BASE
    # Filled by rule/qa post-processing of component strings.
    ordinal: int | None = None
    location: str | None = None

    @property
    def length(self) -> int:
        return self.end - self.start

    def span_key(self) -> tuple[int, int, str]:
        return (self.start, self.end, self.sem_type.value)


def mention_sort_key(m: EntityMention) -> tuple:
    """(start, -length) ordering with deterministic tie-breaks."""
    return (m.start, -(m.end - m.start), m.sem_type.value, m.canonical_uri or "")


@dataclass(frozen=True)
class CompiledLexicon:
    """Immutable lookup structure; safe to share across threads."""

    concepts: dict[str, LexiconConcept]
    # first token -> ((variant token sequence, canonical_uri), ...)
    match_index: dict[str, tuple[tuple[tuple[str, ...], str], ...]]
    # token sequences of Location variants, for location splitting
    location_sequences: frozenset[tuple[str, ...]]

    def __len__(self) -> int:
        return len(self.concepts)


def compile_lexicon(concept_records: list[LexiconConcept]) -> CompiledLexicon:
    """Build the immutable matcher; raises LexiconError on duplicate URIs or on
    a variant mapped to two concepts of the same semantic type."""
    problems: list[str] = []

    concepts: dict[str, LexiconConcept] = {}
    for c in concept_records:
        if c.canonical_uri in concepts:
            problems.append(f"duplicate canonical_uri {c.canonical_uri!r}")
        else:
            concepts[c.canonical_uri] = c

    # (type, token sequence) -> uri; same surface across types is allowed.
    claimed: dict[tuple[SemanticType, tuple[str, ...]], str] = {}
    index: dict[str, list[tuple[tuple[str, ...], str]]] = {}
    location_seqs: set[tuple[str, ...]] = set()
    for uri, c in concepts.items():
        for v in c.variants:
            key = variant_token_key(v)
            if not key:
                problems.append(f"{uri}: variant {v!r} has no tokens")
                continue
            owner = claimed.get((c.sem_type, key))
            if owner is not None and owner != uri:
                problems.append(
                    f"variant {normalize_surface(v)!r} maps to both {owner!r} "
                    f"and {uri!r} with type {c.sem_type.value}"
                )
                continue
            claimed[(c.sem_type, key)] = uri
            entries = index.setdefault(key[0], [])
            if (key, uri) not in entries:
                entries.append((key, uri))
            if c.sem_type is SemanticType.LOCATION:
                location_seqs.add(key)

    if problems:
        raise LexiconError(problems)

    frozen_index = {
        tok: tuple(sorted(entries, key=lambda e: (-len(e[0]), e[0], e[1])))
        for tok, entries in index.items()
    }
    return CompiledLexicon(
        concepts=concepts,
        match_index=frozen_index,
        location_sequences=frozenset(location_seqs),
    )


def lookup_all(
    sentence: Sentence, tokens: list[Token], lexicon: CompiledLexicon
) -> list[EntityMention]:
    """Return every token-aligned variant match in the sentence.

    All matches are reported (nested and overlapping included) so that both
    coarse- and fine-grained dictionary entries surface; output is sorted by
    (start, -length) and never depends on anything but the inputs.
    """
    lowered = [t.text.lower() for t in tokens]
    found: list[EntityMention] = []
    for i, tok_text in enumerate(lowered):
        for key, uri in lexicon.match_index.get(tok_text, ()):
            j = i + len(key)
            if j <= len(lowered) and tuple(lowered[i:j]) == key:
                concept = lexicon.concepts[uri]
                start = tokens[i].start
                end = tokens[j - 1].end
                found.append(
                    EntityMention(
                        surface=sentence.text[start:end],
                        start=start,
                        end=end,
                        sem_type=concept.sem_type,
                        canonical_uri=uri,
                        provenance=PROVENANCE_BASE,
                    )
                )
    found.sort(key=mention_sort_key)
    return found


def load_lexicon_file(path: str) -> list[LexiconConcept]:
    """Read the tab-separated lexicon source format.

    One concept per line: TYPE<TAB>URI<TAB>preferred_label[<TAB>variant...].
    Lines starting with '#' are comments; blank lines are skipped. Raises
    LexiconError listing every violation with its line number.
    """
    problems: list[str] = []
    concepts: list[LexiconConcept] = []
    valid_types = {t.value: t for t in LEXICON_FILE_TYPES}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) < 3:
                problems.append(
                    f"line {line_no}: expected TYPE<TAB>URI<TAB>label, "
                    f"got {len(fields)} field(s)"
                )
                continue
            type_name, uri, label = fields[0], fields[1], fields[2]
            extra = [v for v in fields[3:] if v.strip()]
            sem_type = valid_types.get(type_name)
            if sem_type is None:
                problems.append(
                    f"line {line_no}: unknown type {type_name!r} "
                    f"(expected one of {sorted(valid_types)})"
                )
                continue
            if not uri.strip():
                problems.append(f"line {line_no}: empty URI")
                continue
            if not label.strip():
                problems.append(f"line {line_no}: empty preferred label")
                continue
            try:
                concepts.append(LexiconConcept(uri, sem_type, label, extra))
            except LexiconError as exc:
                problems.extend(f"line {line_no}: {p}" for p in exc.problems)
    if problems:
        raise LexiconError(problems)
    return concepts


def dump_lexicon_file(concepts: list[LexiconConcept], path: str) -> None:
    """Write concepts in canonical text form (sorted, normalized variants).

    The canonical form reloads to an equivalent lexicon, so compiled output
    remains valid input for every command that takes a dictionary.
    """
    lines = []
    for c in sorted(concepts, key=lambda c: (c.sem_type.value, c.canonical_uri)):
        preferred_norm = normalize_surface(c.preferred_label)
        extra = sorted(
            {
                normalize_surface(v)
                for v in c.variants
                if normalize_surface(v) != preferred_norm
            }
        )
        fields = [c.sem_type.value, c.canonical_uri, c.preferred_label] + extra
        lines.append("\t".join(fields))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))
