"""Command-line interface: compile dictionaries, run extraction, score output.

Exit codes are stable contracts: 0 success, 1 partial skips, 2 validation
error, 3 QA backend unavailable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import evaluation
from .corpus import RecordParseError, parse_record_line
from .lexicon import (
    LEXICON_FILE_TYPES,
    LexiconError,
    compile_lexicon,
    dump_lexicon_file,
    load_lexicon_file,
)
from .pipelines import PIPELINE_MODES, process_record
from .qa import ENDPOINT_ENV_VAR, HttpQaBackend, MockQaBackend
from .rules import RuleConfig
from .semantics import record_to_json_line, serialize_ntriples

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_VALIDATION = 2
EXIT_BACKEND = 3


def _err(message: str) -> None:
    print(f"mxsem: {message}", file=sys.stderr)


def cmd_compile_dict(args: argparse.Namespace) -> int:
    try:
        concepts = load_lexicon_file(args.input)
        compile_lexicon(concepts)
    except LexiconError as exc:
        for problem in exc.problems:
            _err(problem)
        return EXIT_VALIDATION
    except OSError as exc:
        _err(str(exc))
        return EXIT_VALIDATION
    dump_lexicon_file(concepts, args.output)
    if not concepts:
        _err("warning: empty lexicon")
    counts = {t.value: 0 for t in LEXICON_FILE_TYPES}
    for c in concepts:
        counts[c.sem_type.value] += 1
    summary = ", ".join(f"{name}={n}" for name, n in counts.items())
    print(f"{len(concepts)} concepts ({summary})")
    return EXIT_OK


def _resolve_backend(args: argparse.Namespace):
    """Mock table takes precedence; then the flag; then the environment."""
    if args.qa_mock:
        return MockQaBackend.from_file(args.qa_mock), None
    endpoint = args.qa_endpoint or os.environ.get(ENDPOINT_ENV_VAR)
    if not endpoint:
        return None, (
            "qa mode requires --qa-endpoint, --qa-mock, or "
            f"{ENDPOINT_ENV_VAR} in the environment"
        )
    backend = HttpQaBackend(endpoint)
    if not backend.health():
        return None, f"QA backend at {endpoint} failed the health probe"
    return backend, None


def cmd_extract(args: argparse.Namespace) -> int:
    try:
        lexicon = compile_lexicon(load_lexicon_file(args.dict))
    except (LexiconError, OSError) as exc:
        _err(str(exc))
        return EXIT_VALIDATION
    try:
        config = RuleConfig(k=args.k)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_VALIDATION

    backend = None
    if args.mode == "qa":
        backend, problem = _resolve_backend(args)
        if backend is None:
            _err(problem)
            return (
                EXIT_BACKEND
                if problem and "health probe" in problem
                else EXIT_VALIDATION
            )

    skipped = 0
    seen_ids: set[str] = set()
    out_lines: list[str] = []
    mention_lines: list[str] = []
    try:
        fh = open(args.input, "r", encoding="utf-8")
    except OSError as exc:
        _err(str(exc))
        return EXIT_VALIDATION
    with fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                doc = parse_record_line(line, line_no)
                if doc.record_id in seen_ids:
                    raise RecordParseError(
                        line_no, f'duplicate "record_id" {doc.record_id!r}'
                    )
            except RecordParseError as exc:
                _err(f"{args.input}: {exc}; record skipped")
                skipped += 1
                continue
            seen_ids.add(doc.record_id)
            result = process_record(
                doc, args.mode, lexicon, config, backend=backend
            )
            for sres in result.sentences:
                for diag in sres.diagnostics:
                    _err(f"record {doc.record_id} sentence {sres.sentence.index}: {diag}")
            if args.format == "jsonl":
                out_lines.append(record_to_json_line(result.instance) + "\n")
            else:
                out_lines.append(serialize_ntriples(result.instance))
            if args.emit_mentions:
                for sres in result.sentences:
                    ann = evaluation.GoldAnnotation(
                        sentence_id=sres.sentence_id,
                        entities=[
                            evaluation.EvalEntity(
                                text=m.surface,
                                start=m.start,
                                end=m.end,
                                sem_type=m.sem_type,
                                context_note=m.context_note,
                                provenance=m.provenance,
                            )
                            for m in sres.mentions
                        ],
                    )
                    mention_lines.append(
                        evaluation.annotation_to_json_line(ann) + "\n"
                    )

    payload = "".join(out_lines)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as out:
            out.write(payload)
    else:
        sys.stdout.write(payload)
    if args.emit_mentions:
        with open(args.emit_mentions, "w", encoding="utf-8") as out:
            out.write("".join(mention_lines))
    return EXIT_PARTIAL if skipped else EXIT_OK


SWEEP_THRESHOLDS = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0]


def cmd_evaluate(args: argparse.Namespace) -> int:
    try:
        gold = evaluation.load_annotations(args.gold, gold=True)
        predicted = evaluation.load_annotations(args.predicted, gold=False)
    except (evaluation.AnnotationFormatError, OSError) as exc:
        _err(str(exc))
        return EXIT_VALIDATION

    try:
        if args.sweep:
            reports = evaluation.sweep(gold, predicted, SWEEP_THRESHOLDS)
        elif args.match == "fuzzy":
            reports = [
                evaluation.score(gold, predicted, evaluation.MatchMode.fuzzy(args.dice))
            ]
        else:
            reports = [
                evaluation.score(gold, predicted, evaluation.MatchMode.strict())
            ]
    except evaluation.SentenceAlignmentError as exc:
        _err(str(exc))
        return EXIT_VALIDATION
    except ValueError as exc:
        _err(str(exc))
        return EXIT_VALIDATION

    for report in reports:
        print(evaluation.render_table(report))
        print()
    if args.output:
        obj = (
            evaluation.report_to_json_obj(reports[0])
            if len(reports) == 1
            else {"reports": [evaluation.report_to_json_obj(r) for r in reports]}
        )
        with open(args.output, "w", encoding="utf-8") as out:
            json.dump(obj, out, indent=2)
            out.write("\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mxsem",
        description=(
            "Extract typed entities and relations from maintenance-record "
            "text and score them against gold annotations."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_compile = sub.add_parser(
        "compile-dict", help="validate a lexicon file and write its compiled form"
    )
    p_compile.add_argument("input", help="lexicon source file (tab-separated)")
    p_compile.add_argument("output", help="compiled lexicon output path")
    p_compile.set_defaults(func=cmd_compile_dict)

    p_extract = sub.add_parser(
        "extract", help="run an extraction pipeline over a records file"
    )
    p_extract.add_argument("--input", required=True, help="records JSONL file")
    p_extract.add_argument("--dict", required=True, help="lexicon file")
    p_extract.add_argument(
        "--mode", required=True, choices=PIPELINE_MODES, help="pipeline to run"
    )
    p_extract.add_argument(
        "--k", type=int, default=10, help="max character gap (default 10)"
    )
    p_extract.add_argument(
        "--format",
        choices=("jsonl", "ntriples"),
        default="jsonl",
        help="output format (default jsonl)",
    )
    p_extract.add_argument("--output", help="output path (default stdout)")
    p_extract.add_argument("--qa-endpoint", help="QA service base URL")
    p_extract.add_argument(
        "--qa-mock", help="JSON table of scripted QA answers (testing)"
    )
    p_extract.add_argument(
        "--emit-mentions",
        help="also write per-sentence mention annotations (JSONL) to this path",
    )
    p_extract.set_defaults(func=cmd_extract)

    p_eval = sub.add_parser(
        "evaluate", help="score predicted annotations against gold"
    )
    p_eval.add_argument("gold", help="gold annotations JSONL")
    p_eval.add_argument("predicted", help="predicted annotations JSONL")
    p_eval.add_argument(
        "--match",
        choices=("strict", "fuzzy"),
        default="strict",
        help="matching mode (default strict)",
    )
    p_eval.add_argument(
        "--dice",
        type=float,
        default=0.5,
        help="Dice threshold for fuzzy matching (default 0.5)",
    )
    p_eval.add_argument(
        "--sweep",
        action="store_true",
        help="report fuzzy metrics at 0.5..1.0 plus strict",
    )
    p_eval.add_argument("--output", help="write the JSON report here")
    p_eval.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
