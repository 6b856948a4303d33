"""Ontology-shaped extraction results and their serialization.

A record instance holds one activity per extracted component; each activity's
component carries its name, optional ordinal and location, and the observation
and action strings linked to it. Output formats are N-Triples (sorted lines,
fixed escaping, byte-deterministic) and an equivalent JSON Lines form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from urllib.parse import quote

from .lexicon import EntityMention, SemanticType, mention_sort_key
from .rules import HAS_ASSOCIATED_ACTION, HAS_ASSOCIATED_OBSERVATION, Relation

BASE_IRI = "http://mxrecords/"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
XSD_INTEGER = "http://www.w3.org/2001/XMLSchema#integer"


@dataclass
class ComponentOrPartInstance:
    name: str
    ordinal: int | None = None
    location: str | None = None
    observations: list[str] = field(default_factory=list)
    actions: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("component name must be non-empty")


@dataclass
class MaintenanceActivityInstance:
    component: ComponentOrPartInstance
    source_sentence_index: int


@dataclass
class MaintenanceRecordInstance:
    record_id: str
    asset_id: str
    date_performed: str
    activities: list[MaintenanceActivityInstance] = field(default_factory=list)


def _dedup(items: list[str]) -> list[str]:
    seen: set[str] = set()
    out: list[str] = []
    for x in items:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


def build_activities(
    sentence_index: int,
    mentions: list[EntityMention],
    relations: list[Relation],
) -> list[MaintenanceActivityInstance]:
    """One activity per Component mention from a single sentence.

    Observation/action values are the lowercased surfaces of the mention's
    relation objects, deduplicated in textual order; ordinal and location come
    from the component's post-processing fields. Components without relations
    still yield an activity with empty lists. Relations are expected to
    reference the same mention objects passed in.
    """
    components = sorted(
        (m for m in mentions if m.sem_type is SemanticType.COMPONENT),
        key=mention_sort_key,
    )
    activities: list[MaintenanceActivityInstance] = []
    for comp in components:
        observations: list[str] = []
        actions: list[str] = []
        for rel in sorted(relations, key=lambda r: r.key()):
            if rel.subject is not comp:
                continue
            if rel.predicate == HAS_ASSOCIATED_OBSERVATION:
                observations.append(rel.object.surface.lower())
            elif rel.predicate == HAS_ASSOCIATED_ACTION:
                actions.append(rel.object.surface.lower())
        activities.append(
            MaintenanceActivityInstance(
                component=ComponentOrPartInstance(
                    name=comp.surface,
                    ordinal=comp.ordinal,
                    location=comp.location,
                    observations=_dedup(observations),
                    actions=_dedup(actions),
                ),
                source_sentence_index=sentence_index,
            )
        )
    return activities


def _escape_literal(s: str) -> str:
    return (
        s.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


def _iri(path: str) -> str:
    return f"<{BASE_IRI}{path}>"


def _segment(raw: str) -> str:
    return quote(raw, safe="")


def serialize_ntriples(record: MaintenanceRecordInstance) -> str:
    """Serialize one record instance as sorted N-Triples text.

    Subject IRIs are minted per record (record/<id>, activity/<id>/<n>,
    component/<id>/<n>); identifiers with characters illegal in an IRI path
    are percent-encoded. Ordinals are typed integer literals; all other values
    are plain string literals. Lines come out sorted so equal inputs always
    produce identical bytes.
    """
    rid = _segment(record.record_id)
    record_iri = _iri(f"record/{rid}")
    lines = [
        f"{record_iri} <{RDF_TYPE}> {_iri('MaintenanceRecord')} .",
        f'{record_iri} {_iri("recordId")} "{_escape_literal(record.record_id)}" .',
        f'{record_iri} {_iri("assetId")} "{_escape_literal(record.asset_id)}" .',
        f"{record_iri} {_iri('dateActivityPerformed')} "
        f'"{_escape_literal(record.date_performed)}" .',
    ]
    for n, activity in enumerate(record.activities):
        act_iri = _iri(f"activity/{rid}/{n}")
        comp_iri = _iri(f"component/{rid}/{n}")
        comp = activity.component
        lines.append(f"{record_iri} {_iri('maintenanceActivity')} {act_iri} .")
        lines.append(f"{act_iri} <{RDF_TYPE}> {_iri('MaintenanceActivity')} .")
        lines.append(
            f"{act_iri} {_iri('hasAssociatedComponentOrPart')} {comp_iri} ."
        )
        lines.append(f"{comp_iri} <{RDF_TYPE}> {_iri('ComponentOrPart')} .")
        lines.append(
            f'{comp_iri} {_iri("hasName")} "{_escape_literal(comp.name)}" .'
        )
        if comp.ordinal is not None:
            lines.append(
                f'{comp_iri} {_iri("hasAssociatedOrdinal")} '
                f'"{comp.ordinal}"^^<{XSD_INTEGER}> .'
            )
        if comp.location is not None:
            lines.append(
                f'{comp_iri} {_iri("hasAssociatedLocation")} '
                f'"{_escape_literal(comp.location)}" .'
            )
        for obs in comp.observations:
            lines.append(
                f'{comp_iri} {_iri("hasAssociatedObservation")} '
                f'"{_escape_literal(obs)}" .'
            )
        for act in comp.actions:
            lines.append(
                f'{comp_iri} {_iri("hasAssociatedAction")} '
                f'"{_escape_literal(act)}" .'
            )
    return "\n".join(sorted(lines)) + "\n"


def record_to_json_obj(record: MaintenanceRecordInstance) -> dict:
    """JSON form mirroring the instance types field-for-field."""
    return {
        "record_id": record.record_id,
        "asset_id": record.asset_id,
        "date": record.date_performed,
        "activities": [
            {
                "name": a.component.name,
                "ordinal": a.component.ordinal,
                "location": a.component.location,
                "observations": list(a.component.observations),
                "actions": list(a.component.actions),
            }
            for a in record.activities
        ],
    }


def record_to_json_line(record: MaintenanceRecordInstance) -> str:
    return json.dumps(record_to_json_obj(record), ensure_ascii=False)
