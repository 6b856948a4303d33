from __future__ import annotations

import json
import random

import pytest

from mxsem.corpus import (
    RecordParseError,
    parse_record_line,
    read_records,
    split_sentences,
    tokenize,
)


def test_split_two_sentences_with_exact_offsets():
    para = "replaced gasket. ops check good."
    sents = split_sentences(para, "R1")
    assert [(s.text, s.start_offset, s.end_offset) for s in sents] == [
        ("replaced gasket.", 0, 16),
        ("ops check good.", 17, 32),
    ]
    assert [s.index for s in sents] == [0, 1]
    assert all(s.parent_record_id == "R1" for s in sents)


def test_split_single_sentence_no_separator():
    sents = split_sentences("leaking")
    assert len(sents) == 1
    assert (sents[0].text, sents[0].start_offset, sents[0].end_offset) == (
        "leaking",
        0,
        7,
    )


def test_split_on_semicolon():
    para = "removed valve; installed new valve"
    sents = split_sentences(para)
    assert [(s.text, s.start_offset, s.end_offset) for s in sents] == [
        ("removed valve;", 0, 14),
        ("installed new valve", 15, 34),
    ]


def test_split_respects_abbreviations():
    sents = split_sentences("see ref. 32 for details. torqued bolt")
    assert [s.text for s in sents] == ["see ref. 32 for details.", "torqued bolt"]
    sents = split_sentences("tightened no. 4 bolt")
    assert [s.text for s in sents] == ["tightened no. 4 bolt"]


def test_split_does_not_break_inside_numbers():
    sents = split_sentences("pressure at 3.5 psi")
    assert [s.text for s in sents] == ["pressure at 3.5 psi"]


def test_split_on_newline():
    para = "ops check good\nreplaced gasket"
    sents = split_sentences(para)
    assert [(s.text, s.start_offset, s.end_offset) for s in sents] == [
        ("ops check good", 0, 14),
        ("replaced gasket", 15, 30),
    ]


def test_split_empty_and_whitespace_only():
    assert split_sentences("") == []
    assert split_sentences("   \n\t ") == []


def test_split_offsets_round_trip():
    rng = random.Random(1234)
    words = ["replaced", "gasket", "no.", "3.5", "r/h", "flap", "ok"]
    seps = [". ", "; ", "! ", "? ", "\n", " "]
    for _ in range(200):
        para = ""
        for _ in range(rng.randint(1, 12)):
            para += rng.choice(words) + rng.choice(seps)
        sents = split_sentences(para)
        covered = set()
        prev_end = -1
        for s in sents:
            assert para[s.start_offset : s.end_offset] == s.text
            assert 0 <= s.start_offset < s.end_offset <= len(para)
            assert s.start_offset > prev_end or prev_end == -1
            assert s.start_offset >= prev_end
            prev_end = s.end_offset
            covered.update(range(s.start_offset, s.end_offset))
        for i, ch in enumerate(para):
            if not ch.isspace():
                assert i in covered, (para, i)
        # determinism
        again = split_sentences(para)
        assert [(s.text, s.start_offset, s.end_offset) for s in again] == [
            (s.text, s.start_offset, s.end_offset) for s in sents
        ]


def test_tokenize_mx_shorthand_sentence():
    toks = tokenize("left engine #4 cylinder baffle cracked")
    assert [t.text for t in toks] == [
        "left",
        "engine",
        "#4",
        "cylinder",
        "baffle",
        "cracked",
    ]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_shorthand_survives():
    assert [t.text for t in tokenize("r/h otbd flap")] == ["r/h", "otbd", "flap"]
    assert [t.text for t in tokenize("torqued no. 4")] == ["torqued", "no.", "4"]
    assert [t.text for t in tokenize("3.5 psi")] == ["3.5", "psi"]


def test_tokenize_punctuation_is_its_own_token():
    assert [t.text for t in tokenize("gasket leaking.")] == [
        "gasket",
        "leaking",
        ".",
    ]
    assert [t.text for t in tokenize("flap, seal")] == ["flap", ",", "seal"]


def test_tokenize_offset_round_trip_and_idempotence():
    rng = random.Random(99)
    pieces = ["r/h", "#4", "no.", "flap!", "a-b", "x", "(good)", "3.5", "..", "#"]
    for _ in range(300):
        text = " ".join(rng.choice(pieces) for _ in range(rng.randint(0, 8)))
        toks = tokenize(text)
        for t in toks:
            assert text[t.start : t.end] == t.text
            assert not any(c.isspace() for c in t.text)
        # non-overlapping and ordered
        for a, b in zip(toks, toks[1:]):
            assert a.end <= b.start
        # a single-token string tokenizes to itself
        for t in toks:
            sub = tokenize(t.text)
            if len(sub) == 1:
                assert sub[0].text == t.text


def test_parse_record_line_happy_path():
    doc = parse_record_line(
        json.dumps(
            {
                "record_id": "R1",
                "asset_id": "A9",
                "date": "2019-07-01T00:00:00Z",
                "text": "replaced gasket",
                "extra": "ignored",
            }
        ),
        1,
    )
    assert doc.record_id == "R1"
    assert doc.asset_id == "A9"
    assert doc.date_performed == "2019-07-01T00:00:00Z"
    assert doc.text == "replaced gasket"


def test_parse_record_line_errors_name_the_line():
    with pytest.raises(RecordParseError) as exc:
        parse_record_line('{"asset_id": "A", "text": "x"}', 7)
    assert "line 7" in str(exc.value)
    with pytest.raises(RecordParseError):
        parse_record_line('{"record_id": "R", "text": "   "}', 1)
    with pytest.raises(RecordParseError):
        parse_record_line("not json", 3)


def test_read_records_rejects_duplicate_ids(tmp_path):
    path = tmp_path / "records.jsonl"
    line = json.dumps({"record_id": "R1", "text": "ok"})
    path.write_text(line + "\n" + line + "\n", encoding="utf-8")
    with pytest.raises(RecordParseError) as exc:
        read_records(str(path))
    assert "duplicate" in str(exc.value)
