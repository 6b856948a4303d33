from __future__ import annotations

import pytest

from mxsem.corpus import Sentence, tokenize
from mxsem.lexicon import (
    CompiledLexicon,
    LexiconConcept,
    SemanticType,
    compile_lexicon,
    lookup_all,
)

URI = "http://mxterms/"


def concept(name: str, sem_type: SemanticType, *variants: str) -> LexiconConcept:
    return LexiconConcept(URI + name, sem_type, name.replace("_", " "), list(variants))


@pytest.fixture(scope="session")
def domain_lexicon() -> CompiledLexicon:
    """Small synthetic lexicon covering the surfaces the tests exercise."""
    t = SemanticType
    return compile_lexicon(
        [
            concept("removed", t.ACTION),
            concept("replaced", t.ACTION),
            concept("installed", t.ACTION),
            concept("checked", t.ACTION, "check"),
            concept("leaking", t.OBSERVATION, "leak"),
            concept("cracked", t.OBSERVATION, "crack"),
            concept("ground_obs", t.OBSERVATION, "ground"),
            concept("ground_loc", t.LOCATION, "ground"),
            concept("brake", t.COMPONENT),
            concept("flap", t.COMPONENT),
            concept("actuator", t.COMPONENT),
            concept("flap_actuator", t.COMPONENT, "flap actuator"),
            concept("gasket", t.COMPONENT, "gskt"),
            concept("intake_gasket", t.COMPONENT, "intake gasket"),
            concept("cylinder_baffle", t.COMPONENT, "cylinder baffle"),
            concept("baffle", t.COMPONENT),
            concept("baffle_seal", t.COMPONENT, "baffle seal"),
            concept("seal", t.COMPONENT),
            concept("landing_gear", t.COMPONENT, "landing gear"),
            concept("left", t.LOCATION),
            concept("right", t.LOCATION, "r/h"),
            concept("inboard", t.LOCATION, "inbd"),
            concept("outboard", t.LOCATION, "otbd"),
            concept("top", t.LOCATION),
        ]
    )


def sentence_of(text: str, record_id: str = "R", index: int = 0) -> Sentence:
    return Sentence(record_id, index, text, 0, len(text))


def base_mentions(text: str, lexicon: CompiledLexicon):
    s = sentence_of(text)
    return s, lookup_all(s, tokenize(s.text), lexicon)
