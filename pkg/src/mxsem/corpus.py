"""Maintenance-record corpus handling: record parsing, sentence splitting, tokenization.

All spans are character offsets (Unicode scalar values, end-exclusive) into the
parent text. Splitting and tokenization are deterministic rule-based procedures
with no model dependencies; text is never lowercased here so that exact
surfaces can be reported downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

# A period ending one of these tokens neither terminates a sentence nor gets
# detached from the token.
ABBREVIATIONS = frozenset({"no.", "ref.", "apprx."})

# Punctuation that ends a sentence when followed by whitespace or end of text.
SENTENCE_BREAKERS = ".;!?"

# Characters glued into a token when interior to, or prefixing, alphanumerics
# (keeps shorthand like "r/h", "#4", "3.5", "b-nut" whole).
TOKEN_JOINERS = "#/.-"


@dataclass
class MaintenanceRecordDoc:
    """One raw maintenance record: free-text paragraph plus metadata."""

    record_id: str
    asset_id: str
    date_performed: str
    text: str


@dataclass
class Sentence:
    """A sentence span within a record paragraph."""

    parent_record_id: str
    index: int
    text: str
    start_offset: int
    end_offset: int


@dataclass
class Token:
    """A token span within a sentence."""

    text: str
    start: int
    end: int


class RecordParseError(ValueError):
    """A records-file line that cannot be turned into a MaintenanceRecordDoc."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _ends_abbreviation(text: str, period_pos: int) -> bool:
    start = period_pos
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start : period_pos + 1].lower() in ABBREVIATIONS


def split_sentences(paragraph: str, record_id: str = "") -> list[Sentence]:
    """Split a record paragraph into sentences with exact offsets.

    Sentences end at '.', ';', '!' or '?' followed by whitespace/end of text
    (unless the period closes a known abbreviation), or at a newline. Breaker
    punctuation stays inside the sentence; the newline and any surrounding
    whitespace act as inter-sentence separators. A whitespace-only paragraph
    yields an empty list; a paragraph with no separators yields one sentence.
    """
    sentences: list[Sentence] = []
    n = len(paragraph)
    i = 0
    index = 0
    while i < n:
        while i < n and paragraph[i].isspace():
            i += 1
        if i >= n:
            break
        start = i
        j = i
        end = None
        while j < n:
            ch = paragraph[j]
            if ch == "\n":
                end = j
                break
            if ch in SENTENCE_BREAKERS and (j + 1 >= n or paragraph[j + 1].isspace()):
                if ch == "." and _ends_abbreviation(paragraph, j):
                    j += 1
                    continue
                end = j + 1
                break
            j += 1
        if end is None:
            end = n
        while end > start and paragraph[end - 1].isspace():
            end -= 1
        if end > start:
            sentences.append(
                Sentence(record_id, index, paragraph[start:end], start, end)
            )
            index += 1
        i = max(end, j + 1)
    return sentences


def _starts_token(text: str, i: int) -> bool:
    ch = text[i]
    if ch.isalnum():
        return True
    return ch in TOKEN_JOINERS and i + 1 < len(text) and text[i + 1].isalnum()


def tokenize(text: str) -> list[Token]:
    """Split a sentence into tokens with exact offsets.

    Tokens are maximal runs of alphanumerics; '#', '/', '.' and '-' join in
    when interior to or prefixing alphanumerics, and a period stays attached
    to a known abbreviation. Any other punctuation becomes its own token.
    """
    tokens: list[Token] = []
    n = len(text)
    i = 0
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if not _starts_token(text, i):
            tokens.append(Token(ch, i, i + 1))
            i += 1
            continue
        j = i
        while j < n:
            c = text[j]
            if c.isalnum():
                j += 1
            elif c in TOKEN_JOINERS and j + 1 < n and text[j + 1].isalnum():
                j += 1
            elif (
                c == "."
                and text[i : j + 1].lower() in ABBREVIATIONS
                and (j + 1 >= n or not text[j + 1].isalnum())
            ):
                j += 1
                break
            else:
                break
        tokens.append(Token(text[i:j], i, j))
        i = j
    return tokens


def parse_record_line(line: str, line_no: int) -> MaintenanceRecordDoc:
    """Parse one JSON Lines record; raise RecordParseError naming the line."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise RecordParseError(line_no, f"invalid JSON ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise RecordParseError(line_no, "record must be a JSON object")

    record_id = obj.get("record_id")
    if not isinstance(record_id, str) or not record_id:
        raise RecordParseError(line_no, 'missing or empty "record_id"')
    text = obj.get("text")
    if not isinstance(text, str) or not text.strip():
        raise RecordParseError(line_no, 'missing or empty "text"')

    asset_id = obj.get("asset_id")
    date = obj.get("date")
    return MaintenanceRecordDoc(
        record_id=record_id,
        asset_id=asset_id if isinstance(asset_id, str) else "",
        date_performed=date if isinstance(date, str) else "",
        text=text,
    )


def read_records(path: str) -> list[MaintenanceRecordDoc]:
    """Read a JSON Lines records file strictly.

    Blank lines are skipped. The first malformed line or duplicated record_id
    raises RecordParseError; callers needing skip-and-continue behaviour should
    parse line by line with parse_record_line.
    """
    records: list[MaintenanceRecordDoc] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            doc = parse_record_line(line, line_no)
            if doc.record_id in seen:
                raise RecordParseError(
                    line_no, f'duplicate "record_id" {doc.record_id!r}'
                )
            seen.add(doc.record_id)
            records.append(doc)
    return records
