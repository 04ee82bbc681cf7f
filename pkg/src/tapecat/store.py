"""Entity/statement store with snapshot reads and profile validation.

Mutation never touches this module directly: the activity ledger stages
effects and applies them inside its commit path. Structures here are
append-only (entities and statements are never deleted; retraction sets
two fields on an existing statement), so a reader holding a `Snapshot`
filters by the commit watermark instead of copying state. That gives
lock-free snapshot isolation under the single-writer model.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field

from .errors import (
    UnknownEntityError,
    UnknownStatementError,
)
from .ids import SUFFIX_LENGTH, UlidIdSource
from .registry import Registry, default_registry

DEFAULT_IRI_BASE = "urn:tapecat:"

_INTERVAL_SIDE = re.compile(
    r"^(?P<y>\d{4})(?:-(?P<m>\d{2})(?:-(?P<d>\d{2})"
    r"(?:T(?P<hh>\d{2}):(?P<mm>\d{2})(?::(?P<ss>\d{2}))?)?)?)?$"
)


def valid_timespan_literal(value: str) -> bool:
    """Check the ``start/end`` interval shape; ``..`` opens either side."""
    if value.count("/") != 1:
        return False
    for side in value.split("/"):
        if side == "..":
            continue
        m = _INTERVAL_SIDE.match(side)
        if not m:
            return False
        parts = m.groupdict()
        if parts["m"] and not 1 <= int(parts["m"]) <= 12:
            return False
        if parts["d"] and not 1 <= int(parts["d"]) <= 31:
            return False
        if parts["hh"] and int(parts["hh"]) > 23:
            return False
        if parts["mm"] and int(parts["mm"]) > 59:
            return False
        if parts["ss"] and int(parts["ss"]) > 59:
            return False
    return True


@dataclass(slots=True)
class Entity:
    iri: str
    class_code: str
    literal: str | None
    created_by: str
    seq: int = 0          # event-log seq at which the entity became visible
    scaffold: bool = False


@dataclass(slots=True)
class Statement:
    id: int
    subject: str
    property: str
    object: str | None    # entity IRI; None for note-style properties
    note: str | None      # literal object, exactly when ``object`` is None
    qualifier: str | None
    asserted_by: str
    retracted_by: str | None = None
    seq: int = 0
    retracted_seq: int = 0
    scaffold: bool = False


@dataclass(slots=True)
class ActivityRecord:
    """Committed activity metadata kept outside the entity graph."""

    iri: str
    class_code: str
    operator_iri: str
    kind_iri: str
    timespan: str
    note: str
    commit_seq: int
    entities_created: int = 0
    statements_asserted: int = 0
    statements_retracted: int = 0


@dataclass(frozen=True, slots=True)
class Violation:
    statement_id: int
    constraint: str       # "domain" | "range"
    property: str
    class_code: str       # the offending subject/object class
    message: str


class Graph:
    """The registry-backed store. All writes go through the ledger."""

    def __init__(self, registry: Registry | None = None, *,
                 iri_base: str = DEFAULT_IRI_BASE,
                 profile: str = "paper",
                 id_source=None,
                 sink=None):
        if profile not in ("paper", "strict"):
            raise ValueError(f"unknown profile {profile!r}")
        self.registry = registry if registry is not None else default_registry()
        self.iri_base = iri_base
        self.profile = profile
        self.ids = id_source if id_source is not None else UlidIdSource()
        self.sink = sink

        self.entities: dict[str, Entity] = {}
        self.entity_list: list[Entity] = []
        self.statements: list[Statement] = []
        self.activities: dict[str, ActivityRecord] = {}
        self.activity_list: list[ActivityRecord] = []
        self.aborted_iris: list[str] = []

        self.by_subject: dict[str, list[int]] = {}
        self.by_object: dict[str, list[int]] = {}
        self.by_property: dict[str, list[int]] = {}
        self.by_qualifier: dict[str, list[int]] = {}
        self.by_class: dict[str, list[str]] = {}
        self.by_literal: dict[tuple[str, str], list[str]] = {}

        self.watermark = 0          # last event-log seq made visible
        self._write_lock = threading.Lock()
        self._open_ctx = None

    # -- identifiers ---------------------------------------------------

    def mint_iri(self) -> str:
        return self.iri_base + self.ids.next_suffix()

    def numeric_suffixes(self) -> list[int]:
        """Digit-only suffixes of minted IRIs, for sequential-source resume.

        Aborted activity IRIs count too: their suffixes were consumed even
        though no entity carries them.
        """
        candidates = [entity.iri for entity in self.entity_list] + self.aborted_iris
        out = []
        for iri in candidates:
            if iri.startswith(self.iri_base):
                suffix = iri[len(self.iri_base):]
                if len(suffix) == SUFFIX_LENGTH and suffix.isdigit():
                    out.append(int(suffix))
        return out

    # -- commit-path hooks (ledger only) --------------------------------

    def apply_entity(self, entity: Entity) -> None:
        self.entities[entity.iri] = entity
        self.entity_list.append(entity)
        self.by_class.setdefault(entity.class_code, []).append(entity.iri)
        if entity.literal is not None:
            key = (entity.class_code, entity.literal)
            self.by_literal.setdefault(key, []).append(entity.iri)

    def apply_statement(self, stmt: Statement) -> None:
        self.statements.append(stmt)
        self.by_subject.setdefault(stmt.subject, []).append(stmt.id)
        if stmt.object is not None:
            self.by_object.setdefault(stmt.object, []).append(stmt.id)
        self.by_property.setdefault(stmt.property, []).append(stmt.id)
        if stmt.qualifier is not None:
            self.by_qualifier.setdefault(stmt.qualifier, []).append(stmt.id)

    def apply_retraction(self, statement_id: int, activity_iri: str, seq: int) -> None:
        stmt = self.statements[statement_id - 1]
        stmt.retracted_by = activity_iri
        stmt.retracted_seq = seq

    def snapshot(self) -> "Snapshot":
        return Snapshot(self)


class Snapshot:
    """Immutable read view pinned at a commit boundary."""

    def __init__(self, graph: Graph):
        self.graph = graph
        self.registry = graph.registry
        self.profile = graph.profile
        # Watermark first: anything appended afterwards carries a larger
        # seq and is filtered out even if the length captures raced ahead.
        self.watermark = graph.watermark
        self._n_entities = len(graph.entity_list)
        self._n_statements = len(graph.statements)
        self._n_activities = len(graph.activity_list)

    # -- entities --------------------------------------------------------

    def entity(self, iri: str) -> Entity | None:
        entity = self.graph.entities.get(iri)
        if entity is None or entity.seq > self.watermark:
            return None
        return entity

    def require_entity(self, iri: str) -> Entity:
        entity = self.entity(iri)
        if entity is None:
            raise UnknownEntityError(f"unknown entity IRI {iri!r}")
        return entity

    def iter_entities(self):
        for entity in self.graph.entity_list[: self._n_entities]:
            if entity.seq <= self.watermark:
                yield entity

    def entities_of_class(self, class_code: str) -> list[Entity]:
        out = []
        for iri in self.graph.by_class.get(class_code, ()):
            entity = self.entity(iri)
            if entity is not None:
                out.append(entity)
        return out

    def entities_with_literal(self, class_code: str, literal: str) -> list[Entity]:
        out = []
        for iri in self.graph.by_literal.get((class_code, literal), ()):
            entity = self.entity(iri)
            if entity is not None:
                out.append(entity)
        return out

    def vocab_iri(self, label: str) -> str | None:
        matches = self.entities_with_literal("E55", label)
        return matches[0].iri if matches else None

    # -- statements --------------------------------------------------------

    def statement(self, statement_id: int) -> Statement | None:
        if not 1 <= statement_id <= self._n_statements:
            return None
        stmt = self.graph.statements[statement_id - 1]
        return stmt if stmt.seq <= self.watermark else None

    def require_statement(self, statement_id: int) -> Statement:
        stmt = self.statement(statement_id)
        if stmt is None:
            raise UnknownStatementError(f"unknown statement id {statement_id}")
        return stmt

    def is_live(self, stmt: Statement) -> bool:
        if stmt.seq > self.watermark:
            return False
        return stmt.retracted_seq == 0 or stmt.retracted_seq > self.watermark

    def retracted_by(self, stmt: Statement) -> str | None:
        """Retracting activity as of this snapshot, or None while live."""
        if stmt.retracted_seq and stmt.retracted_seq <= self.watermark:
            return stmt.retracted_by
        return None

    def iter_statements(self):
        for stmt in self.graph.statements[: self._n_statements]:
            if stmt.seq <= self.watermark:
                yield stmt

    def iter_live_statements(self):
        for stmt in self.iter_statements():
            if self.is_live(stmt):
                yield stmt

    def _ids_to_statements(self, ids, live_only: bool) -> list[Statement]:
        out = []
        for sid in ids:
            stmt = self.statement(sid)
            if stmt is not None and (not live_only or self.is_live(stmt)):
                out.append(stmt)
        return out

    def statements_with_subject(self, iri: str, *, live_only: bool = True):
        return self._ids_to_statements(self.graph.by_subject.get(iri, ()), live_only)

    def statements_with_object(self, iri: str, *, live_only: bool = True):
        return self._ids_to_statements(self.graph.by_object.get(iri, ()), live_only)

    def statements_with_property(self, code: str, *, live_only: bool = True):
        return self._ids_to_statements(self.graph.by_property.get(code, ()), live_only)

    def statements_with_qualifier(self, iri: str, *, live_only: bool = True):
        return self._ids_to_statements(self.graph.by_qualifier.get(iri, ()), live_only)

    def neighbors(self, iri: str, direction: str = "both",
                  property_filter: str | None = None):
        """Live edges at ``iri`` as (statement, other endpoint) pairs.

        Note-style statements appear with endpoint None when traversing
        outward. Ordered by statement id.
        """
        if direction not in ("out", "in", "both"):
            raise ValueError(f"bad direction {direction!r}")
        self.require_entity(iri)
        rows: list[tuple[Statement, Entity | None]] = []
        if direction in ("out", "both"):
            for stmt in self.statements_with_subject(iri):
                if property_filter and stmt.property != property_filter:
                    continue
                other = self.entity(stmt.object) if stmt.object else None
                rows.append((stmt, other))
        if direction in ("in", "both"):
            for stmt in self.statements_with_object(iri):
                if property_filter and stmt.property != property_filter:
                    continue
                rows.append((stmt, self.entity(stmt.subject)))
        rows.sort(key=lambda pair: pair[0].id)
        return rows

    def has_live_type(self, iri: str, type_label: str) -> bool:
        """True when entity carries a live P2 edge to the E55 so labeled."""
        for stmt in self.statements_with_subject(iri):
            if stmt.property != "P2" or stmt.object is None:
                continue
            e55 = self.entity(stmt.object)
            if e55 is not None and e55.literal == type_label:
                return True
        return False

    # -- activities --------------------------------------------------------

    def activity(self, iri: str) -> ActivityRecord | None:
        record = self.graph.activities.get(iri)
        if record is None or record.commit_seq > self.watermark:
            return None
        return record

    def iter_activities(self):
        for record in self.graph.activity_list[: self._n_activities]:
            if record.commit_seq <= self.watermark:
                yield record

    # -- validation --------------------------------------------------------

    def check_statement_profile(self, subject_class: str, property_code: str,
                                object_class: str | None,
                                profile: str | None = None) -> Violation | None:
        """First domain/range violation for the combination, else None."""
        profile = profile or self.profile
        registry = self.registry
        pdef = registry.property_def(property_code)
        if subject_class not in registry.accepted_domain[property_code][profile]:
            declared = ",".join(sorted(pdef.domain_per_profile[profile]))
            return Violation(0, "domain", property_code, subject_class,
                             f"{subject_class} outside {property_code} domain "
                             f"[{declared}] under profile {profile!r}")
        if not pdef.literal_object and object_class is not None:
            if object_class not in registry.accepted_range[property_code][profile]:
                declared = ",".join(sorted(pdef.range_per_profile[profile]))
                return Violation(0, "range", property_code, object_class,
                                 f"{object_class} outside {property_code} range "
                                 f"[{declared}] under profile {profile!r}")
        return None

    def validate_graph(self, profile: str | None = None) -> list[Violation]:
        """Re-check every live statement under the given profile."""
        profile = profile or self.profile
        violations = []
        for stmt in self.iter_live_statements():
            subject_class = self.require_entity(stmt.subject).class_code
            object_class = None
            if stmt.object is not None:
                object_class = self.require_entity(stmt.object).class_code
            found = self.check_statement_profile(
                subject_class, stmt.property, object_class, profile)
            if found is not None:
                violations.append(Violation(stmt.id, found.constraint,
                                            found.property, found.class_code,
                                            found.message))
        return violations
