"""Activity ledger: every mutation runs inside one accountable activity.

``begin_activity`` opens the single exclusive write window and stages the
activity's own scaffold (the activity entity, a time-span entity, and the
P14 operator / P4 time-span / P3 note statements, self-asserted). Staged
effects stay invisible to readers until ``commit`` writes them to the
event log and publishes the new watermark atomically; ``abort`` discards
them, leaving only a marker in the log.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    ActivityStateError,
    ClassMismatchError,
    DuplicateIdentifierError,
    EmptyActivityError,
    LiteralRuleError,
    ProfileViolationError,
    QualifierError,
    RetractionError,
    StoreBusyError,
    UnknownEntityError,
    UnknownStatementError,
)
from . import eventlog
from .store import (
    ActivityRecord,
    Entity,
    Graph,
    Snapshot,
    Statement,
    valid_timespan_literal,
)

BOOTSTRAP_NOTE = "registry and vocabulary bootstrap"
BOOTSTRAP_TIMESPAN = "../.."


@dataclass(frozen=True, slots=True)
class AuditEntry:
    activity_iri: str
    operator_label: str
    kind_label: str
    timespan: str
    note: str
    entities_created: int
    statements_asserted: int
    statements_retracted: int
    commit_seq: int


class ActivityContext:
    """An open unit of work. All staging happens through its methods."""

    def __init__(self, graph: Graph, activity_iri: str, operator_iri: str | None,
                 kind_iri: str | None, timespan: str, note: str,
                 activity_class: str = "E7", profile_enforced: bool = True):
        self.graph = graph
        self.activity_iri = activity_iri
        self.operator_iri = operator_iri
        self.kind_iri = kind_iri
        self.timespan = timespan
        self.note = note
        self.activity_class = activity_class
        self.profile_enforced = profile_enforced
        self.state = "open"
        self.effects: list[tuple] = []
        self._staged_entities: dict[str, Entity] = {}
        self._staged_literals: dict[tuple[str, str], str] = {}
        self._staged_retractions: set[int] = set()
        self._staged_statement_count = 0
        self._payload_effects = 0   # effects besides the activity's scaffold

    # -- resolution over committed state plus this context's staging ------

    def resolve(self, iri: str) -> Entity | None:
        entity = self._staged_entities.get(iri)
        if entity is not None:
            return entity
        return self.graph.entities.get(iri)

    def require(self, iri: str, role: str) -> Entity:
        entity = self.resolve(iri)
        if entity is None:
            raise UnknownEntityError(f"unknown {role} IRI {iri!r}", field=role)
        return entity

    def find_literal(self, class_code: str, literal: str) -> str | None:
        iri = self._staged_literals.get((class_code, literal))
        if iri is not None:
            return iri
        committed = self.graph.by_literal.get((class_code, literal))
        return committed[0] if committed else None

    def vocab(self, label: str) -> str:
        """IRI of the E55 with this label, creating it on first use."""
        existing = self.find_literal("E55", label)
        if existing is not None:
            return existing
        return self.create_entity("E55", label)

    # -- staging -----------------------------------------------------------

    def _check_open(self) -> None:
        if self.state != "open":
            raise ActivityStateError(f"activity context is {self.state}")

    def _stage_entity(self, entity: Entity) -> None:
        self.effects.append(("entity", entity))
        self._staged_entities[entity.iri] = entity
        if entity.literal is not None:
            self._staged_literals.setdefault(
                (entity.class_code, entity.literal), entity.iri)
        if not entity.scaffold:
            self._payload_effects += 1

    def _check_literal_rules(self, class_code: str, literal: str | None) -> str:
        """Validate the literal against the class policy; returns the
        canonical class code."""
        registry = self.graph.registry
        cdef = registry.class_def(class_code)
        rule = registry.literal_rule(class_code)
        if rule == "forbidden" and literal is not None:
            raise LiteralRuleError(
                f"class {class_code} does not carry a literal", field="literal")
        if rule != "forbidden" and literal is not None and not literal:
            raise LiteralRuleError(
                f"class {class_code} literal must be non-empty", field="literal")
        if rule == "required" and not literal:
            raise LiteralRuleError(
                f"class {class_code} requires a literal value", field="literal")
        if literal is not None and registry.is_subclass_of(class_code, "E52") \
                and not valid_timespan_literal(literal):
            raise LiteralRuleError(
                f"E52 literal {literal!r} is not a start/end interval",
                field="literal")
        if literal is not None and registry.is_subclass_of(class_code, "E42") \
                and self.find_literal("E42", literal) is not None:
            raise DuplicateIdentifierError(
                f"identifier value {literal!r} already in use", field="literal")
        return cdef.code

    def create_entity(self, class_code: str, literal: str | None = None, *,
                      scaffold: bool = False) -> str:
        self._check_open()
        code = self._check_literal_rules(class_code, literal)
        entity = Entity(iri=self.graph.mint_iri(), class_code=code,
                        literal=literal, created_by=self.activity_iri,
                        scaffold=scaffold)
        self._stage_entity(entity)
        return entity.iri

    def create_entity_with_iri(self, iri: str, class_code: str,
                               literal: str | None = None, *,
                               scaffold: bool = False) -> str:
        """Stage an entity under a caller-supplied IRI (import path). Same
        literal rules as ``create_entity``; the IRI must be unused."""
        self._check_open()
        if self.resolve(iri) is not None:
            raise DuplicateIdentifierError(f"IRI {iri!r} already in use",
                                           field="iri")
        code = self._check_literal_rules(class_code, literal)
        entity = Entity(iri=iri, class_code=code, literal=literal,
                        created_by=self.activity_iri, scaffold=scaffold)
        self._stage_entity(entity)
        return iri

    def assert_statement(self, subject: str, property_code: str,
                         object: str | None = None, *, note: str | None = None,
                         qualifier: str | None = None,
                         scaffold: bool = False) -> int:
        self._check_open()
        registry = self.graph.registry
        pdef = registry.property_def(property_code)
        subject_entity = self.require(subject, "subject")

        object_class: str | None = None
        if pdef.literal_object:
            if object is not None:
                raise LiteralRuleError(
                    f"{property_code} takes a literal note, not an entity",
                    field="object")
            if not note:
                raise LiteralRuleError(
                    f"{property_code} requires a non-empty note", field="note")
        else:
            if note is not None:
                raise LiteralRuleError(
                    f"{property_code} does not take a literal note", field="note")
            object_entity = self.require(object or "", "object")
            object_class = object_entity.class_code

        if qualifier is not None:
            if not pdef.allows_type_qualifier:
                raise QualifierError(
                    f"{property_code} does not allow a type qualifier",
                    field="qualifier")
            qualifier_entity = self.require(qualifier, "qualifier")
            if not registry.is_subclass_of(qualifier_entity.class_code, "E55"):
                raise QualifierError(
                    f"qualifier {qualifier!r} is not an E55 entity",
                    field="qualifier")

        if self.profile_enforced:
            profile = self.graph.profile
            if subject_entity.class_code not in \
                    registry.accepted_domain[property_code][profile]:
                declared = ",".join(sorted(pdef.domain_per_profile[profile]))
                raise ProfileViolationError(
                    f"{subject_entity.class_code} outside {property_code} "
                    f"domain [{declared}] under profile {profile!r}",
                    constraint="domain")
            if object_class is not None and not pdef.literal_object and \
                    object_class not in \
                    registry.accepted_range[property_code][profile]:
                declared = ",".join(sorted(pdef.range_per_profile[profile]))
                raise ProfileViolationError(
                    f"{object_class} outside {property_code} range "
                    f"[{declared}] under profile {profile!r}",
                    constraint="range")

        statement_id = (len(self.graph.statements)
                        + self._staged_statement_count + 1)
        stmt = Statement(id=statement_id, subject=subject,
                         property=property_code, object=object, note=note,
                         qualifier=qualifier, asserted_by=self.activity_iri,
                         scaffold=scaffold)
        self.effects.append(("assert", stmt))
        self._staged_statement_count += 1
        if not scaffold:
            self._payload_effects += 1
        return statement_id

    def retract_statement(self, statement_id: int) -> Statement:
        self._check_open()
        committed = self.graph.statements
        if not 1 <= statement_id <= len(committed):
            raise UnknownStatementError(f"unknown statement id {statement_id}")
        stmt = committed[statement_id - 1]
        if stmt.retracted_seq or statement_id in self._staged_retractions:
            raise RetractionError(f"statement {statement_id} is already retracted")
        if stmt.scaffold:
            raise RetractionError("activity scaffold statements are not retractable")
        self.effects.append(("retract", statement_id))
        self._staged_retractions.add(statement_id)
        self._payload_effects += 1
        return stmt

    # -- outcome -----------------------------------------------------------

    def commit(self) -> AuditEntry:
        graph = self.graph
        with graph._write_lock:
            self._check_open()
            if self._payload_effects < 1:
                raise EmptyActivityError(
                    "activity has no effect besides its own scaffold")
            base = graph.watermark
            lines = []
            seq = base
            for effect in self.effects:
                seq += 1
                if effect[0] == "entity":
                    record = eventlog.entity_record(seq, effect[1])
                elif effect[0] == "assert":
                    record = eventlog.statement_record(seq, effect[1])
                else:
                    record = eventlog.retraction_record(seq, effect[1],
                                                        self.activity_iri)
                lines.append(eventlog.encode_record(record))
            commit_seq = seq + 1
            lines.append(eventlog.encode_record(
                eventlog.commit_record(commit_seq, self.activity_iri,
                                       self.kind_iri or "")))
            if graph.sink is not None:
                graph.sink.append(lines)

            entities = asserted = retracted = 0
            seq = base
            for effect in self.effects:
                seq += 1
                if effect[0] == "entity":
                    effect[1].seq = seq
                    graph.apply_entity(effect[1])
                    if not effect[1].scaffold:
                        entities += 1
                elif effect[0] == "assert":
                    effect[1].seq = seq
                    graph.apply_statement(effect[1])
                    if not effect[1].scaffold:
                        asserted += 1
                else:
                    graph.apply_retraction(effect[1], self.activity_iri, seq)
                    retracted += 1
            record = ActivityRecord(
                iri=self.activity_iri, class_code=self.activity_class,
                operator_iri=self.operator_iri or "",
                kind_iri=self.kind_iri or "", timespan=self.timespan,
                note=self.note, commit_seq=commit_seq,
                entities_created=entities, statements_asserted=asserted,
                statements_retracted=retracted)
            graph.activities[self.activity_iri] = record
            graph.activity_list.append(record)
            graph.watermark = commit_seq
            graph._open_ctx = None
            self.state = "committed"
        return audit_entry(graph.snapshot(), record)

    def abort(self) -> None:
        graph = self.graph
        with graph._write_lock:
            self._check_open()
            seq = graph.watermark + 1
            try:
                if graph.sink is not None:
                    graph.sink.append([eventlog.encode_record(
                        eventlog.abort_record(seq, self.activity_iri))])
                graph.watermark = seq
            finally:
                # Nothing was applied, so the window must open again even
                # if writing the abort marker failed (e.g. disk full).
                graph.aborted_iris.append(self.activity_iri)
                graph._open_ctx = None
                self.state = "aborted"


def begin_activity(graph: Graph, operator_iri: str, kind_iri: str,
                   timespan: str, note: str, *,
                   activity_class: str = "E7",
                   profile_enforced: bool = True) -> ActivityContext:
    registry = graph.registry
    with graph._write_lock:
        if graph._open_ctx is not None:
            raise StoreBusyError("another activity is open; retry after it closes")
        operator = graph.entities.get(operator_iri)
        if operator is None:
            raise UnknownEntityError(f"unknown operator IRI {operator_iri!r}",
                                     field="operator")
        if not registry.is_subclass_of(operator.class_code, "E39"):
            raise ClassMismatchError(
                f"operator {operator_iri!r} has class {operator.class_code}, "
                "expected an E39 actor", field="operator")
        kind = graph.entities.get(kind_iri)
        if kind is None:
            raise UnknownEntityError(f"unknown kind IRI {kind_iri!r}", field="kind")
        if not registry.is_subclass_of(kind.class_code, "E55"):
            raise ClassMismatchError(
                f"kind {kind_iri!r} has class {kind.class_code}, expected E55",
                field="kind")
        if not registry.is_subclass_of(activity_class, "E7"):
            raise ClassMismatchError(
                f"activity class must be E7 or a subclass, got {activity_class}")
        if not valid_timespan_literal(timespan):
            raise LiteralRuleError(f"bad time-span {timespan!r}", field="timespan")
        if not note:
            raise LiteralRuleError("activity note must be non-empty", field="note")

        ctx = ActivityContext(graph, graph.mint_iri(), operator_iri, kind_iri,
                              timespan, note, activity_class,
                              profile_enforced=profile_enforced)
        _stage_scaffold(ctx)
        graph._open_ctx = ctx
    return ctx


def _stage_scaffold(ctx: ActivityContext) -> None:
    ctx._stage_entity(Entity(iri=ctx.activity_iri,
                             class_code=ctx.activity_class, literal=None,
                             created_by=ctx.activity_iri, scaffold=True))
    e52 = ctx.create_entity("E52", ctx.timespan, scaffold=True)
    ctx.assert_statement(ctx.activity_iri, "P14", ctx.operator_iri, scaffold=True)
    ctx.assert_statement(ctx.activity_iri, "P4", e52, scaffold=True)
    ctx.assert_statement(ctx.activity_iri, "P3", note=ctx.note, scaffold=True)


def bootstrap(graph: Graph) -> str:
    """Create the built-in E55 vocabulary and the system operator.

    Self-hosted like every other mutation: the bootstrap activity carries
    its own scaffold, with operator and kind created inside the same
    activity. Returns the system operator IRI.
    """
    with graph._write_lock:
        if graph.entities or graph.watermark:
            raise ActivityStateError("bootstrap requires an empty store")
        if graph._open_ctx is not None:
            raise StoreBusyError("another activity is open")
        ctx = ActivityContext(graph, graph.mint_iri(), None, None,
                              BOOTSTRAP_TIMESPAN, BOOTSTRAP_NOTE)
        ctx._stage_entity(Entity(iri=ctx.activity_iri, class_code="E7",
                                 literal=None, created_by=ctx.activity_iri,
                                 scaffold=True))
        vocab = {label: ctx.create_entity("E55", label)
                 for label in graph.registry.vocabulary}
        system = ctx.create_entity("E39")
        system_name = ctx.create_entity("E41", "system")
        ctx.assert_statement(system, "P1", system_name)
        ctx.assert_statement(system_name, "P2", vocab["name"])
        ctx.operator_iri = system
        ctx.kind_iri = vocab["bootstrap"]
        e52 = ctx.create_entity("E52", ctx.timespan, scaffold=True)
        ctx.assert_statement(ctx.activity_iri, "P14", system, scaffold=True)
        ctx.assert_statement(ctx.activity_iri, "P4", e52, scaffold=True)
        ctx.assert_statement(ctx.activity_iri, "P3", note=ctx.note, scaffold=True)
        graph._open_ctx = ctx
    ctx.commit()
    return system


def system_operator(graph: Graph) -> str:
    """Operator of the first committed activity (the bootstrap one)."""
    if not graph.activity_list:
        raise ActivityStateError("store has no committed activities")
    return graph.activity_list[0].operator_iri


def entity_label(view: Snapshot, iri: str) -> str:
    """Display label: own literal, else first live appellation, else IRI."""
    entity = view.entity(iri)
    if entity is None:
        return iri
    if entity.literal is not None:
        return entity.literal
    for stmt in view.statements_with_subject(iri):
        if stmt.property == "P1" and stmt.object:
            appellation = view.entity(stmt.object)
            if appellation is not None and appellation.literal:
                return appellation.literal
    return iri


def audit_entry(view: Snapshot, record: ActivityRecord) -> AuditEntry:
    return AuditEntry(
        activity_iri=record.iri,
        operator_label=entity_label(view, record.operator_iri),
        kind_label=entity_label(view, record.kind_iri),
        timespan=record.timespan,
        note=record.note,
        entities_created=record.entities_created,
        statements_asserted=record.statements_asserted,
        statements_retracted=record.statements_retracted,
        commit_seq=record.commit_seq,
    )


def audit_trail(view: Snapshot, iri: str) -> list[AuditEntry]:
    """Every activity that created the entity or touched a statement on it,
    in commit order. Retracting activities count as touching."""
    entity = view.require_entity(iri)
    involved: set[str] = {entity.created_by}
    touching = (view.statements_with_subject(iri, live_only=False)
                + view.statements_with_object(iri, live_only=False)
                + view.statements_with_qualifier(iri, live_only=False))
    for stmt in touching:
        involved.add(stmt.asserted_by)
        retractor = view.retracted_by(stmt)
        if retractor is not None:
            involved.add(retractor)
    records = []
    for activity_iri in involved:
        record = view.activity(activity_iri)
        if record is not None:
            records.append(record)
    records.sort(key=lambda r: r.commit_seq)
    return [audit_entry(view, record) for record in records]
