"""mxsem: entity and relation extraction toolkit for maintenance-record text.

Three pipelines over a shared domain lexicon: plain dictionary lookup,
rule-based refinement (joining, context capture, relation linking), and
question-answering span extraction against an HTTP backend. Results assemble
into ontology-shaped record instances (N-Triples / JSON Lines) and score
against gold annotations with strict or fuzzy (Sørensen-Dice) matching.
"""

from .corpus import (
    MaintenanceRecordDoc,
    RecordParseError,
    Sentence,
    Token,
    read_records,
    split_sentences,
    tokenize,
)
from .evaluation import (
    EvalEntity,
    EvalReport,
    GoldAnnotation,
    MatchMode,
    dice,
    match_entities,
    score,
    sweep,
)
from .lexicon import (
    CompiledLexicon,
    EntityMention,
    LexiconConcept,
    LexiconError,
    SemanticType,
    compile_lexicon,
    load_lexicon_file,
    lookup_all,
)
from .pipelines import (
    RecordResult,
    SentenceResult,
    extract_base,
    extract_qa,
    extract_rules,
    process_record,
)
from .qa import (
    HttpQaBackend,
    MockQaBackend,
    QaAnswer,
    QaBackendError,
    QaQuery,
    generate_question,
    qa_extract_components,
)
from .rules import (
    OrdinalValue,
    Relation,
    RuleConfig,
    absorb_context_gap,
    extract_ordinal,
    extract_relations,
    join_same_type,
    prune_to_finest,
    run_cascade,
    split_location,
    strip_stopwords,
)
from .semantics import (
    ComponentOrPartInstance,
    MaintenanceActivityInstance,
    MaintenanceRecordInstance,
    build_activities,
    record_to_json_line,
    serialize_ntriples,
)

__version__ = "0.1.0"
