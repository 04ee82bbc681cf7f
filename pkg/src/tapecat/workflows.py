"""Cataloging workflows, one committed activity per operation.

Each function validates its inputs, opens an activity, stages the full
graph fragment for that task, and commits. Any failure mid-staging aborts
the activity, leaving the store unchanged (the log keeps an abort marker).
"""

from __future__ import annotations

from dataclasses import dataclass
from urllib.parse import urlparse

from . import registry as reg
from .errors import ClassMismatchError, DuplicateIdentifierError, WorkflowError
from .ledger import ActivityContext, AuditEntry, begin_activity, system_operator
from .store import Graph

PART_KIND_LABELS = {
    "tape": reg.VOCAB_MAGNETIC_TAPE,
    "inlay": reg.VOCAB_PAPER_INLAY,
    "other": reg.VOCAB_OTHER_MATERIAL,
}


@dataclass(frozen=True, slots=True)
class PartSpec:
    kind: str                      # tape | inlay | other
    description: str = ""


@dataclass(frozen=True, slots=True)
class SourceSpec:
    name: str
    address: str = ""
    kind_label: str = "donor"


@dataclass(frozen=True, slots=True)
class CassetteAccessionSpec:
    inventory_id: str
    parts: tuple[PartSpec, ...]
    operator_iri: str
    timespan: str
    source: SourceSpec | None = None
    note: str = ""


@dataclass(frozen=True, slots=True)
class DigitizationSpec:
    tape_iri: str
    recorder_iri: str
    file_path: str
    storage_place: str
    operator_iri: str
    timespan: str
    note: str = ""


@dataclass(frozen=True, slots=True)
class VerificationSpec:
    binary_iri: str
    claimed_title_iri: str
    outcome: str                   # confirmed | mismatch
    operator_iri: str
    timespan: str


@dataclass(frozen=True, slots=True)
class AccessionResult:
    set_iri: str
    part_iris: tuple[str, ...]
    identifier_iri: str
    source_iri: str | None
    audit: AuditEntry


@dataclass(frozen=True, slots=True)
class HoldingResult:
    holding_iri: str
    audit: AuditEntry


@dataclass(frozen=True, slots=True)
class RegroupResult:
    new_statement_id: int
    retracted_statement_id: int
    audit: AuditEntry


@dataclass(frozen=True, slots=True)
class DigitizationResult:
    file_iri: str
    audit: AuditEntry


@dataclass(frozen=True, slots=True)
class PhotographResult:
    photo_iri: str
    audit: AuditEntry


@dataclass(frozen=True, slots=True)
class DecomposeResult:
    title_iris: tuple[str, ...]
    audit: AuditEntry


@dataclass(frozen=True, slots=True)
class LinkResult:
    statement_id: int
    external_entity_iri: str
    audit: AuditEntry


@dataclass(frozen=True, slots=True)
class VerificationResult:
    statement_id: int
    audit: AuditEntry


@dataclass(frozen=True, slots=True)
class RegisterResult:
    iri: str
    audit: AuditEntry


def _run(graph: Graph, operator_iri: str, kind_label: str, timespan: str,
         note: str, stage, activity_class: str = "E7"):
    """Begin, stage via callback, commit; abort on any failure."""
    kind_iri = graph.snapshot().vocab_iri(kind_label)
    if kind_iri is None:
        raise WorkflowError(
            f"activity kind vocabulary {kind_label!r} missing; store not bootstrapped")
    ctx = begin_activity(graph, operator_iri, kind_iri, timespan, note,
                         activity_class=activity_class)
    try:
        result = stage(ctx)
        entry = ctx.commit()
    except BaseException:
        if ctx.state == "open":
            ctx.abort()
        raise
    return result, entry


def register_operator(graph: Graph, name: str, *, timespan: str = "../..") -> RegisterResult:
    """Create an E39 operator with a typed name appellation.

    Operated by the system actor; needed because activities require a
    pre-existing operator entity.
    """
    if not name:
        raise WorkflowError("operator name must be non-empty", field="name")

    def stage(ctx: ActivityContext) -> str:
        actor = ctx.create_entity("E39")
        appellation = ctx.create_entity("E41", name)
        ctx.assert_statement(actor, "P1", appellation)
        ctx.assert_statement(appellation, "P2", ctx.vocab(reg.VOCAB_NAME))
        return actor

    iri, entry = _run(graph, system_operator(graph), reg.KIND_REGISTRATION,
                      timespan, f"registered operator {name}", stage)
    return RegisterResult(iri=iri, audit=entry)


def register_equipment(graph: Graph, label: str, kind_label: str,
                       operator_iri: str, *, timespan: str = "../..") -> RegisterResult:
    """Create a typed E22 tool (for example a tape recorder)."""
    if not label:
        raise WorkflowError("equipment label must be non-empty", field="label")
    if not kind_label:
        raise WorkflowError("equipment kind must be non-empty", field="kind")

    def stage(ctx: ActivityContext) -> str:
        item = ctx.create_entity("E22")
        ctx.assert_statement(item, "P2", ctx.vocab(kind_label))
        appellation = ctx.create_entity("E41", label)
        ctx.assert_statement(item, "P1", appellation)
        ctx.assert_statement(appellation, "P2", ctx.vocab(reg.VOCAB_NAME))
        return item

    iri, entry = _run(graph, operator_iri, reg.KIND_REGISTRATION, timespan,
                      f"registered equipment {label}", stage)
    return RegisterResult(iri=iri, audit=entry)


def accession_cassette(graph: Graph, spec: CassetteAccessionSpec) -> AccessionResult:
    """Intake one cassette set: subordinate parts, inventory identifier,
    optional source actor, all typed, with the activity linked by P16."""
    if not spec.inventory_id:
        raise WorkflowError("inventory id must be non-empty", field="inventory_id")
    if graph.by_literal.get(("E42", spec.inventory_id)):
        raise DuplicateIdentifierError(
            f"identifier value {spec.inventory_id!r} already in use",
            field="inventory_id")
    if not spec.parts:
        raise WorkflowError("at least one part is required", field="parts")
    for part in spec.parts:
        if part.kind not in PART_KIND_LABELS:
            raise WorkflowError(f"unknown part kind {part.kind!r}", field="parts")
    if spec.source is not None and not spec.source.name:
        raise WorkflowError("source name must be non-empty", field="source")

    def stage(ctx: ActivityContext):
        cassette_set = ctx.create_entity("E22")
        ctx.assert_statement(cassette_set, "P2", ctx.vocab(reg.VOCAB_CASSETTE_SET))
        identifier = ctx.create_entity("E42", spec.inventory_id)
        ctx.assert_statement(cassette_set, "P1", identifier)
        ctx.assert_statement(identifier, "P2", ctx.vocab(reg.VOCAB_INVENTORY_ID))
        part_iris = []
        for part in spec.parts:
            part_iri = ctx.create_entity("E22")
            ctx.assert_statement(cassette_set, "P106", part_iri)
            ctx.assert_statement(part_iri, "P2",
                                 ctx.vocab(PART_KIND_LABELS[part.kind]))
            if part.description:
                ctx.assert_statement(part_iri, "P3", note=part.description)
            part_iris.append(part_iri)
        source_iri = None
        if spec.source is not None:
            source_iri = ctx.create_entity("E39")
            name = ctx.create_entity("E41", spec.source.name)
            ctx.assert_statement(source_iri, "P1", name)
            ctx.assert_statement(name, "P2", ctx.vocab(reg.VOCAB_NAME))
            if spec.source.address:
                address = ctx.create_entity("E41", spec.source.address)
                ctx.assert_statement(source_iri, "P1", address)
                ctx.assert_statement(address, "P2", ctx.vocab(reg.VOCAB_ADDRESS))
            ctx.assert_statement(source_iri, "P2", ctx.vocab(spec.source.kind_label))
        ctx.assert_statement(ctx.activity_iri, "P16", cassette_set)
        return cassette_set, tuple(part_iris), identifier, source_iri

    note = spec.note or f"accession of {spec.inventory_id}"
    (set_iri, part_iris, identifier, source_iri), entry = _run(
        graph, spec.operator_iri, reg.KIND_ACCESSION, spec.timespan, note, stage)
    return AccessionResult(set_iri=set_iri, part_iris=part_iris,
                           identifier_iri=identifier, source_iri=source_iri,
                           audit=entry)


def create_holding(graph: Graph, label: str, member_iris: list[str],
                   operator_iri: str, timespan: str) -> HoldingResult:
    """Curated holding grouping whole sets, for example one donor's tapes."""
    if not label:
        raise WorkflowError("holding label must be non-empty", field="label")
    if not member_iris:
        raise WorkflowError("holding needs at least one member", field="members")

    def stage(ctx: ActivityContext) -> str:
        for member in member_iris:
            entity = ctx.require(member, "member")
            if not graph.registry.is_subclass_of(entity.class_code, "E22"):
                raise ClassMismatchError(
                    f"member {member!r} has class {entity.class_code}, expected E22",
                    field="members")
        holding = ctx.create_entity("E78")
        appellation = ctx.create_entity("E41", label)
        ctx.assert_statement(holding, "P1", appellation)
        for member in member_iris:
            ctx.assert_statement(holding, "P106", member)
        return holding

    iri, entry = _run(graph, operator_iri, reg.KIND_HOLDING, timespan,
                      f"holding {label}", stage)
    return HoldingResult(holding_iri=iri, audit=entry)


def regroup_part(graph: Graph, part_iri: str, from_set_iri: str,
                 to_set_iri: str, operator_iri: str, timespan: str) -> RegroupResult:
    """Move a part between sets: retract the old P106 edge, assert the new
    one, inside a single activity."""
    if part_iri == to_set_iri:
        raise WorkflowError("part and target set are the same entity", field="to_set")
    if from_set_iri == to_set_iri:
        raise WorkflowError("regroup to the same set is a no-op", field="to_set")

    def stage(ctx: ActivityContext):
        ctx.require(part_iri, "part")
        ctx.require(to_set_iri, "to_set")
        snap = graph.snapshot()
        old = None
        for stmt in snap.statements_with_subject(from_set_iri):
            if stmt.property == "P106" and stmt.object == part_iri:
                old = stmt
                break
        if old is None:
            raise WorkflowError(
                f"no live P106 edge from {from_set_iri!r} to {part_iri!r}",
                field="from_set")
        ctx.retract_statement(old.id)
        new_id = ctx.assert_statement(to_set_iri, "P106", part_iri)
        return new_id, old.id

    (new_id, old_id), entry = _run(graph, operator_iri, reg.KIND_REGROUP,
                                   timespan, "regrouped part", stage)
    return RegroupResult(new_statement_id=new_id, retracted_statement_id=old_id,
                         audit=entry)


def record_digitization(graph: Graph, spec: DigitizationSpec) -> DigitizationResult:
    """Tape digitization: a creation activity using tape and recorder,
    producing a located raw-audio information object."""
    if spec.recorder_iri == spec.tape_iri:
        raise WorkflowError("recorder and tape are the same entity", field="recorder")
    if not spec.file_path:
        raise WorkflowError("file path must be non-empty", field="file_path")
    if not spec.storage_place:
        raise WorkflowError("storage place must be non-empty", field="storage_place")
    snap = graph.snapshot()
    snap.require_entity(spec.tape_iri)
    snap.require_entity(spec.recorder_iri)
    if not snap.has_live_type(spec.tape_iri, reg.VOCAB_MAGNETIC_TAPE):
        raise WorkflowError(
            f"tape {spec.tape_iri!r} lacks the {reg.VOCAB_MAGNETIC_TAPE!r} type",
            field="tape")
    if not snap.has_live_type(spec.recorder_iri, reg.VOCAB_TAPE_RECORDER):
        raise WorkflowError(
            f"recorder {spec.recorder_iri!r} lacks the {reg.VOCAB_TAPE_RECORDER!r} type",
            field="recorder")

    def stage(ctx: ActivityContext) -> str:
        ctx.assert_statement(ctx.activity_iri, "P16", spec.tape_iri)
        ctx.assert_statement(ctx.activity_iri, "P16", spec.recorder_iri)
        audio = ctx.create_entity("E73")
        ctx.assert_statement(ctx.activity_iri, "P94", audio)
        ctx.assert_statement(audio, "P2", ctx.vocab(reg.VOCAB_RAW_AUDIO))
        path = ctx.create_entity("E41", spec.file_path)
        ctx.assert_statement(audio, "P1", path)
        ctx.assert_statement(path, "P2", ctx.vocab(reg.VOCAB_FILE_PATH))
        place = ctx.create_entity("E53", spec.storage_place)
        ctx.assert_statement(audio, "P53", place)
        return audio

    note = spec.note or f"digitization to {spec.file_path}"
    iri, entry = _run(graph, spec.operator_iri, reg.KIND_DIGITIZATION,
                      spec.timespan, note, stage, activity_class="E65")
    return DigitizationResult(file_iri=iri, audit=entry)


def record_photograph(graph: Graph, subject_iri: str, file_path: str,
                      place: str, operator_iri: str, timespan: str) -> PhotographResult:
    """Photo documentation of any entity. No camera object is modeled."""
    if not file_path:
        raise WorkflowError("file path must be non-empty", field="file_path")
    if not place:
        raise WorkflowError("storage place must be non-empty", field="place")
    graph.snapshot().require_entity(subject_iri)

    def stage(ctx: ActivityContext) -> str:
        photo = ctx.create_entity("E73")
        ctx.assert_statement(ctx.activity_iri, "P94", photo)
        ctx.assert_statement(photo, "P2", ctx.vocab(reg.VOCAB_PHOTOGRAPH))
        ctx.assert_statement(photo, "P62", subject_iri)
        path = ctx.create_entity("E41", file_path)
        ctx.assert_statement(photo, "P1", path)
        ctx.assert_statement(path, "P2", ctx.vocab(reg.VOCAB_FILE_PATH))
        location = ctx.create_entity("E53", place)
        ctx.assert_statement(photo, "P53", location)
        return photo

    iri, entry = _run(graph, operator_iri, reg.KIND_PHOTOGRAPHY, timespan,
                      f"photograph to {file_path}", stage, activity_class="E65")
    return PhotographResult(photo_iri=iri, audit=entry)


def decompose_inlay(graph: Graph, photo_iri: str,
                    titles: list[tuple[str, str]], operator_iri: str,
                    timespan: str) -> DecomposeResult:
    """Transcribe handwritten titles off an inlay photo, one information
    object per title with a side marker and a qualified source link."""
    if not titles:
        raise WorkflowError("at least one title is required", field="titles")
    for side, text in titles:
        if side not in ("A", "B"):
            raise WorkflowError(f"side must be A or B, got {side!r}", field="titles")
        if not text:
            raise WorkflowError("title text must be non-empty", field="titles")
    snap = graph.snapshot()
    snap.require_entity(photo_iri)
    if not snap.has_live_type(photo_iri, reg.VOCAB_PHOTOGRAPH):
        raise WorkflowError(
            f"entity {photo_iri!r} lacks the {reg.VOCAB_PHOTOGRAPH!r} type",
            field="photo")

    def stage(ctx: ActivityContext):
        side_vocab = {"A": ctx.vocab(reg.VOCAB_SIDE_A),
                      "B": ctx.vocab(reg.VOCAB_SIDE_B)}
        qualifier = ctx.vocab(reg.VOCAB_TRANSCRIBED_FROM)
        out = []
        for side, text in titles:
            title = ctx.create_entity("E73")
            ctx.assert_statement(title, "P2", ctx.vocab(reg.VOCAB_TITLE))
            holder = ctx.create_entity("E41", text)
            ctx.assert_statement(title, "P1", holder)
            ctx.assert_statement(title, "P2", side_vocab[side])
            ctx.assert_statement(title, "P67", photo_iri, qualifier=qualifier)
            out.append(title)
        return tuple(out)

    iris, entry = _run(graph, operator_iri, reg.KIND_TRANSCRIPTION, timespan,
                       f"transcribed {len(titles)} titles", stage)
    return DecomposeResult(title_iris=iris, audit=entry)


def is_absolute_iri(value: str) -> bool:
    if not value or any(ch.isspace() for ch in value):
        return False
    parsed = urlparse(value)
    return bool(parsed.scheme) and bool(parsed.netloc or parsed.path)


def link_external_reference(graph: Graph, subject_iri: str, external_iri: str,
                            relation_label: str, operator_iri: str,
                            timespan: str) -> LinkResult:
    """Qualified P67 link to an opaque external resource, one local record
    per distinct external IRI."""
    if not is_absolute_iri(external_iri):
        raise WorkflowError(f"{external_iri!r} is not an absolute IRI",
                            field="external_iri")
    if not relation_label:
        raise WorkflowError("relation label must be non-empty", field="relation")
    graph.snapshot().require_entity(subject_iri)

    def stage(ctx: ActivityContext):
        external = ctx.find_literal("E73", external_iri)
        if external is None:
            external = ctx.create_entity("E73", external_iri)
            ctx.assert_statement(external, "P2",
                                 ctx.vocab(reg.VOCAB_EXTERNAL_RESOURCE))
        statement_id = ctx.assert_statement(subject_iri, "P67", external,
                                            qualifier=ctx.vocab(relation_label))
        return statement_id, external

    (statement_id, external), entry = _run(
        graph, operator_iri, reg.KIND_LINKING, timespan,
        f"linked to {external_iri}", stage)
    return LinkResult(statement_id=statement_id, external_entity_iri=external,
                      audit=entry)


def record_verification(graph: Graph, spec: VerificationSpec) -> VerificationResult:
    """Emulator check outcome: a qualified P67 edge from the binary to the
    claimed title, confirmed-match or mismatch."""
    if spec.binary_iri == spec.claimed_title_iri:
        raise WorkflowError("binary and claimed title are the same entity",
                            field="claimed_title")
    if spec.outcome not in ("confirmed", "mismatch"):
        raise WorkflowError(f"outcome must be confirmed or mismatch, got "
                            f"{spec.outcome!r}", field="outcome")
    snap = graph.snapshot()
    for role, iri in (("binary", spec.binary_iri),
                      ("claimed_title", spec.claimed_title_iri)):
        entity = snap.require_entity(iri)
        if not graph.registry.is_subclass_of(entity.class_code, "E73"):
            raise ClassMismatchError(
                f"{role} {iri!r} has class {entity.class_code}, expected E73",
                field=role)
    qualifier_label = (reg.VOCAB_CONFIRMED_MATCH if spec.outcome == "confirmed"
                       else reg.VOCAB_MISMATCH)

    def stage(ctx: ActivityContext) -> int:
        return ctx.assert_statement(spec.binary_iri, "P67",
                                    spec.claimed_title_iri,
                                    qualifier=ctx.vocab(qualifier_label))

    statement_id, entry = _run(graph, spec.operator_iri, reg.KIND_VERIFICATION,
                               spec.timespan, f"verification: {spec.outcome}",
                               stage)
    return VerificationResult(statement_id=statement_id, audit=entry)
