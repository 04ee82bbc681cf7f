"""Traversals and curator reports over a store snapshot.

Everything here is read-only and deterministic: rows order by statement
id along each step, reports deduplicate by IRI.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone

from . import registry as reg
from .errors import WorkflowError
from .ledger import entity_label
from .store import Entity, Snapshot, Statement


@dataclass(frozen=True, slots=True)
class TraversalStep:
    property: str
    direction: str                      # out | in
    qualifier: str | None = None        # E55 label the statement must carry
    target_class: str | None = None


@dataclass(frozen=True, slots=True)
class TraversalPattern:
    steps: tuple[TraversalStep, ...]
    limit: int = 100

    def __post_init__(self):
        if not self.steps:
            raise WorkflowError("traversal needs at least one step", field="steps")
        if self.limit <= 0:
            raise WorkflowError("traversal limit must be positive", field="limit")
        for step in self.steps:
            if step.direction not in ("out", "in"):
                raise WorkflowError(
                    f"step direction must be out or in, got {step.direction!r}",
                    field="steps")


@dataclass(frozen=True, slots=True)
class TraversalHit:
    entity: Entity
    path: tuple[Statement, ...]


@dataclass(frozen=True, slots=True)
class ReportRow:
    iri: str
    label: str
    detail: dict


@dataclass(frozen=True, slots=True)
class Report:
    kind: str
    rows: tuple[ReportRow, ...]
    generated_at: str


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def find_by_identifier(view: Snapshot, value: str) -> list[Entity]:
    """Entities carrying a live P1 to an appellation or identifier whose
    literal equals the value exactly."""
    hits: list[tuple[int, Entity]] = []
    seen: set[str] = set()
    for class_code in ("E41", "E42"):
        for holder in view.entities_with_literal(class_code, value):
            for stmt in view.statements_with_object(holder.iri):
                if stmt.property != "P1":
                    continue
                owner = view.entity(stmt.subject)
                if owner is not None and owner.iri not in seen:
                    seen.add(owner.iri)
                    hits.append((stmt.id, owner))
    hits.sort(key=lambda pair: pair[0])
    return [entity for _, entity in hits]


def find_by_type(view: Snapshot, label: str,
                 class_filter: str | None = None) -> list[Entity]:
    """Entities with a live P2 edge to the E55 so labeled; an unused label
    yields an empty list, not an error."""
    hits: list[tuple[int, Entity]] = []
    seen: set[str] = set()
    for e55 in view.entities_with_literal("E55", label):
        for stmt in view.statements_with_object(e55.iri):
            if stmt.property != "P2":
                continue
            entity = view.entity(stmt.subject)
            if entity is None or entity.iri in seen:
                continue
            if class_filter and not view.registry.is_subclass_of(
                    entity.class_code, class_filter):
                continue
            seen.add(entity.iri)
            hits.append((stmt.id, entity))
    hits.sort(key=lambda pair: pair[0])
    return [entity for _, entity in hits]


def traverse(view: Snapshot, start_iri: str,
             pattern: TraversalPattern) -> list[TraversalHit]:
    """Breadth-first step application over live statements. Qualifier steps
    match the statement's type-qualifier label; results deduplicate by end
    entity, first (lowest statement id) path wins."""
    view.require_entity(start_iri)
    frontier: list[tuple[str, tuple[Statement, ...]]] = [(start_iri, ())]
    for step in pattern.steps:
        next_frontier: list[tuple[str, tuple[Statement, ...]]] = []
        for iri, path in frontier:
            for stmt, other in view.neighbors(iri, step.direction, step.property):
                if other is None:
                    continue
                if step.qualifier is not None:
                    if stmt.qualifier is None:
                        continue
                    qualifier_entity = view.entity(stmt.qualifier)
                    if qualifier_entity is None or \
                            qualifier_entity.literal != step.qualifier:
                        continue
                if step.target_class and not view.registry.is_subclass_of(
                        other.class_code, step.target_class):
                    continue
                next_frontier.append((other.iri, path + (stmt,)))
        frontier = next_frontier
    hits: list[TraversalHit] = []
    seen: set[str] = set()
    for iri, path in frontier:
        if iri in seen:
            continue
        seen.add(iri)
        hits.append(TraversalHit(entity=view.require_entity(iri), path=path))
        if len(hits) >= pattern.limit:
            break
    return hits


def all_tapes(view: Snapshot) -> list[Entity]:
    return find_by_type(view, reg.VOCAB_MAGNETIC_TAPE, class_filter="E22")


def is_digitized(view: Snapshot, tape_iri: str) -> bool:
    """True when a creation (digitization) activity has a live P16 edge to
    the tape."""
    for stmt in view.statements_with_object(tape_iri):
        if stmt.property != "P16":
            continue
        user = view.entity(stmt.subject)
        if user is not None and view.registry.is_subclass_of(user.class_code, "E65"):
            return True
    return False


def digitized_tape_iris(view: Snapshot) -> set[str]:
    return {tape.iri for tape in all_tapes(view) if is_digitized(view, tape.iri)}


def _tape_detail(view: Snapshot, tape_iri: str) -> dict:
    detail: dict = {}
    for stmt in view.statements_with_object(tape_iri):
        if stmt.property != "P106":
            continue
        parent = view.entity(stmt.subject)
        if parent is None:
            continue
        detail["set"] = parent.iri
        for p1 in view.statements_with_subject(parent.iri):
            if p1.property == "P1" and p1.object:
                holder = view.entity(p1.object)
                if holder is not None and holder.class_code == "E42":
                    detail["inventory_id"] = holder.literal
                    break
        break
    return detail


def report_backlog(view: Snapshot) -> Report:
    """Accessioned tapes not yet used by any digitization activity."""
    rows = []
    for tape in all_tapes(view):
        if is_digitized(view, tape.iri):
            continue
        rows.append(ReportRow(iri=tape.iri, label=entity_label(view, tape.iri),
                              detail=_tape_detail(view, tape.iri)))
    return Report(kind="backlog", rows=tuple(rows), generated_at=_now())


def report_unverified(view: Snapshot) -> Report:
    """Software images and raw audio lacking a confirmed-match link."""
    rows = []
    seen: set[str] = set()
    for label in (reg.VOCAB_SOFTWARE_IMAGE, reg.VOCAB_RAW_AUDIO):
        for entity in find_by_type(view, label, class_filter="E73"):
            if entity.iri in seen:
                continue
            seen.add(entity.iri)
            status = "unverified"
            confirmed = False
            for stmt in view.statements_with_subject(entity.iri):
                if stmt.property != "P67" or stmt.qualifier is None:
                    continue
                qualifier = view.entity(stmt.qualifier)
                if qualifier is None:
                    continue
                if qualifier.literal == reg.VOCAB_CONFIRMED_MATCH:
                    confirmed = True
                    break
                if qualifier.literal == reg.VOCAB_MISMATCH:
                    status = "mismatch"
            if confirmed:
                continue
            rows.append(ReportRow(iri=entity.iri,
                                  label=entity_label(view, entity.iri),
                                  detail={"kind": label, "status": status}))
    return Report(kind="unverified", rows=tuple(rows), generated_at=_now())


def report_consistency(view: Snapshot, profile: str | None = None) -> Report:
    """Profile violations, untyped identifiers, and entities whose creating
    activity never committed (storage corruption canary)."""
    issues: dict[str, list[str]] = {}

    def add(iri: str, message: str) -> None:
        issues.setdefault(iri, []).append(message)

    for violation in view.validate_graph(profile):
        stmt = view.require_statement(violation.statement_id)
        add(stmt.subject,
            f"statement {violation.statement_id}: {violation.message}")
    for identifier in view.entities_of_class("E42"):
        if not any(stmt.property == "P2"
                   for stmt in view.statements_with_subject(identifier.iri)):
            add(identifier.iri, "identifier lacks a P2 type")
    for entity in view.iter_entities():
        if view.activity(entity.created_by) is None:
            add(entity.iri,
                f"created by {entity.created_by!r} which never committed")
    rows = tuple(ReportRow(iri=iri, label=entity_label(view, iri),
                           detail={"issues": messages})
                 for iri, messages in issues.items())
    return Report(kind="consistency", rows=rows, generated_at=_now())
