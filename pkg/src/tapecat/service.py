"""HTTP JSON service backing the companion web UI.

Every response is an envelope: ``{"ok": true, "data": ...}`` or
``{"ok": false, "error": {"code", "message", "field"}}`` (the Turtle
download at /api/export is the one raw-body exception). Mutating
endpoints require an ``operator`` IRI and return the committed
``AuditEntry``; while another activity holds the write window they answer
409 with code ``busy`` and the client retries. Reads serve concurrently
from commit-boundary snapshots. Endpoint paths and payload fields are
fixed in docs/api.md.
"""

from __future__ import annotations

import os
from dataclasses import asdict

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import __version__, ledger, queries, tosec, turtle, workflows
from .config import Config, now_timespan
from .errors import (
    CatalogError,
    DuplicateIdentifierError,
    StoreBusyError,
    UnknownEntityError,
    UnknownStatementError,
)
from .ledger import audit_trail, entity_label
from .queries import Report, TraversalPattern, TraversalStep
from .store import Entity, Graph, Snapshot, Statement

FRONTEND_DIST = os.path.join(os.path.dirname(os.path.dirname(
    os.path.dirname(os.path.abspath(__file__)))), "frontend", "dist")


def ok(data, status_code: int = 200) -> JSONResponse:
    return JSONResponse({"ok": True, "data": data}, status_code=status_code)


def fail(code: str, message: str, status_code: int, field: str | None = None):
    error = {"code": code, "message": message}
    if field:
        error["field"] = field
    return JSONResponse({"ok": False, "error": error}, status_code=status_code)


def _status_for(error: CatalogError) -> int:
    if isinstance(error, StoreBusyError):
        return 409
    if isinstance(error, DuplicateIdentifierError):
        return 409
    if isinstance(error, (UnknownEntityError, UnknownStatementError)):
        return 404
    return 400


def entity_json(view: Snapshot, entity: Entity) -> dict:
    return {
        "iri": entity.iri,
        "class": entity.class_code,
        "class_label": view.registry.class_def(entity.class_code).label,
        "literal": entity.literal,
        "created_by": entity.created_by,
        "label": entity_label(view, entity.iri),
    }


def statement_json(view: Snapshot, stmt: Statement) -> dict:
    pdef = view.registry.property_def(stmt.property)
    qualifier_label = None
    if stmt.qualifier is not None:
        qualifier = view.entity(stmt.qualifier)
        qualifier_label = qualifier.literal if qualifier else None
    return {
        "id": stmt.id,
        "subject": stmt.subject,
        "property": stmt.property,
        "property_label": pdef.forward_label,
        "object": stmt.object,
        "note": stmt.note,
        "qualifier": stmt.qualifier,
        "qualifier_label": qualifier_label,
        "asserted_by": stmt.asserted_by,
        "retracted_by": view.retracted_by(stmt),
    }


def report_json(report: Report) -> dict:
    return {
        "kind": report.kind,
        "generated_at": report.generated_at,
        "rows": [{"iri": row.iri, "label": row.label, "detail": row.detail}
                 for row in report.rows],
    }


class OperatorBody(BaseModel):
    name: str


class EquipmentBody(BaseModel):
    operator: str
    name: str
    kind: str = "tape recorder"
    timespan: str | None = None


class PartBody(BaseModel):
    kind: str
    description: str = ""


class SourceBody(BaseModel):
    name: str
    address: str = ""
    kind: str = "donor"


class AccessionBody(BaseModel):
    operator: str
    inventory_id: str
    parts: list[PartBody]
    source: SourceBody | None = None
    timespan: str | None = None
    note: str = ""


class HoldingBody(BaseModel):
    operator: str
    label: str
    members: list[str]
    timespan: str | None = None


class RegroupBody(BaseModel):
    operator: str
    part: str
    from_set: str
    to_set: str
    timespan: str | None = None


class DigitizationBody(BaseModel):
    operator: str
    tape: str
    recorder: str
    file_path: str
    storage_place: str
    timespan: str | None = None
    note: str = ""


class PhotographBody(BaseModel):
    operator: str
    subject: str
    file_path: str
    place: str
    timespan: str | None = None


class TitleBody(BaseModel):
    side: str
    text: str


class DecomposeBody(BaseModel):
    operator: str
    photo: str
    titles: list[TitleBody]
    timespan: str | None = None


class LinkBody(BaseModel):
    operator: str
    subject: str
    external_iri: str
    relation: str
    timespan: str | None = None


class VerificationBody(BaseModel):
    operator: str
    binary: str
    claimed_title: str
    outcome: str
    timespan: str | None = None


class TosecBatchBody(BaseModel):
    operator: str
    filenames: list[str]
    timespan: str | None = None


class TraverseStepBody(BaseModel):
    property: str
    direction: str
    qualifier: str | None = None
    target_class: str | None = None


class TraverseBody(BaseModel):
    start: str
    steps: list[TraverseStepBody]
    limit: int = Field(default=100, gt=0)


def create_app(graph: Graph, config: Config | None = None) -> FastAPI:
    app = FastAPI(title="tapecat", version=__version__, docs_url=None,
                  redoc_url=None)

    @app.exception_handler(CatalogError)
    async def catalog_error_handler(request: Request, error: CatalogError):
        return fail(error.code, str(error), _status_for(error), error.field)

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, error: RequestValidationError):
        first = error.errors()[0] if error.errors() else {}
        location = ".".join(str(part) for part in first.get("loc", ())[1:])
        return fail("validation", first.get("msg", "invalid request body"),
                    400, location or None)

    def timespan_of(body) -> str:
        return body.timespan or now_timespan()

    # -- reads ---------------------------------------------------------

    @app.get("/api/health")
    def health():
        return ok({"status": "ok"})

    @app.get("/api/meta")
    def meta():
        snap = graph.snapshot()
        vocabulary = sorted(
            entity.literal for entity in snap.entities_of_class("E55")
            if entity.literal)
        return ok({
            "profile": snap.profile,
            "iri_base": graph.iri_base,
            "version": __version__,
            "counts": {
                "entities": sum(1 for _ in snap.iter_entities()),
                "statements": sum(1 for _ in snap.iter_statements()),
                "activities": sum(1 for _ in snap.iter_activities()),
            },
            "vocabulary": vocabulary,
        })

    @app.get("/api/operators")
    def list_operators():
        snap = graph.snapshot()
        rows = [{"iri": entity.iri, "label": entity_label(snap, entity.iri)}
                for entity in snap.entities_of_class("E39")]
        return ok({"rows": rows})

    @app.get("/api/entity")
    def entity(iri: str):
        snap = graph.snapshot()
        found = snap.require_entity(iri)
        neighbors = []
        for stmt, other in snap.neighbors(iri):
            neighbors.append({
                "statement": statement_json(snap, stmt),
                "direction": "out" if stmt.subject == iri else "in",
                "other": entity_json(snap, other) if other is not None else None,
            })
        return ok({"entity": entity_json(snap, found), "neighbors": neighbors})

    @app.get("/api/entities/by-type")
    def entities_by_type(label: str, class_filter: str | None = None):
        snap = graph.snapshot()
        rows = [entity_json(snap, entity)
                for entity in queries.find_by_type(snap, label, class_filter)]
        return ok({"rows": rows})

    @app.get("/api/entities/by-identifier")
    def entities_by_identifier(value: str):
        snap = graph.snapshot()
        rows = [entity_json(snap, entity)
                for entity in queries.find_by_identifier(snap, value)]
        return ok({"rows": rows})

    @app.get("/api/audit")
    def audit(iri: str):
        snap = graph.snapshot()
        return ok({"trail": [asdict(entry) for entry in audit_trail(snap, iri)]})

    @app.post("/api/traverse")
    def traverse(body: TraverseBody):
        snap = graph.snapshot()
        pattern = TraversalPattern(
            steps=tuple(TraversalStep(property=step.property,
                                      direction=step.direction,
                                      qualifier=step.qualifier,
                                      target_class=step.target_class)
                        for step in body.steps),
            limit=body.limit)
        hits = queries.traverse(snap, body.start, pattern)
        rows = [{"entity": entity_json(snap, hit.entity),
                 "path": [statement_json(snap, stmt) for stmt in hit.path]}
                for hit in hits]
        return ok({"rows": rows})

    @app.get("/api/reports/backlog")
    def backlog():
        return ok(report_json(queries.report_backlog(graph.snapshot())))

    @app.get("/api/reports/unverified")
    def unverified():
        return ok(report_json(queries.report_unverified(graph.snapshot())))

    @app.get("/api/reports/consistency")
    def consistency(profile: str | None = None):
        return ok(report_json(
            queries.report_consistency(graph.snapshot(), profile)))

    @app.get("/api/export")
    def export(scope: str = "live"):
        document = turtle.export_turtle(graph.snapshot(), scope=scope)
        return PlainTextResponse(document, media_type="text/turtle")

    # -- mutations -------------------------------------------------------

    @app.post("/api/operators")
    def add_operator(body: OperatorBody):
        result = workflows.register_operator(graph, body.name)
        return ok({"iri": result.iri, "audit": asdict(result.audit)}, 201)

    @app.post("/api/workflows/equipment")
    def add_equipment(body: EquipmentBody):
        result = workflows.register_equipment(
            graph, body.name, body.kind, body.operator,
            timespan=timespan_of(body))
        return ok({"iri": result.iri, "audit": asdict(result.audit)}, 201)

    @app.post("/api/workflows/accession")
    def accession(body: AccessionBody):
        source = None
        if body.source is not None:
            source = workflows.SourceSpec(name=body.source.name,
                                          address=body.source.address,
                                          kind_label=body.source.kind)
        spec = workflows.CassetteAccessionSpec(
            inventory_id=body.inventory_id,
            parts=tuple(workflows.PartSpec(kind=part.kind,
                                           description=part.description)
                        for part in body.parts),
            source=source, operator_iri=body.operator,
            timespan=timespan_of(body), note=body.note)
        result = workflows.accession_cassette(graph, spec)
        return ok({
            "set": result.set_iri,
            "parts": list(result.part_iris),
            "identifier": result.identifier_iri,
            "source": result.source_iri,
            "audit": asdict(result.audit),
        }, 201)

    @app.post("/api/workflows/holding")
    def holding(body: HoldingBody):
        result = workflows.create_holding(graph, body.label, body.members,
                                          body.operator, timespan_of(body))
        return ok({"iri": result.holding_iri, "audit": asdict(result.audit)}, 201)

    @app.post("/api/workflows/regroup")
    def regroup(body: RegroupBody):
        result = workflows.regroup_part(graph, body.part, body.from_set,
                                        body.to_set, body.operator,
                                        timespan_of(body))
        return ok({"statement_id": result.new_statement_id,
                   "retracted_statement_id": result.retracted_statement_id,
                   "audit": asdict(result.audit)}, 201)

    @app.post("/api/workflows/digitization")
    def digitization(body: DigitizationBody):
        spec = workflows.DigitizationSpec(
            tape_iri=body.tape, recorder_iri=body.recorder,
            file_path=body.file_path, storage_place=body.storage_place,
            operator_iri=body.operator, timespan=timespan_of(body),
            note=body.note)
        result = workflows.record_digitization(graph, spec)
        return ok({"file": result.file_iri, "audit": asdict(result.audit)}, 201)

    @app.post("/api/workflows/photograph")
    def photograph(body: PhotographBody):
        result = workflows.record_photograph(
            graph, body.subject, body.file_path, body.place, body.operator,
            timespan_of(body))
        return ok({"photo": result.photo_iri, "audit": asdict(result.audit)}, 201)

    @app.post("/api/workflows/decompose")
    def decompose(body: DecomposeBody):
        result = workflows.decompose_inlay(
            graph, body.photo, [(title.side, title.text) for title in body.titles],
            body.operator, timespan_of(body))
        return ok({"titles": list(result.title_iris),
                   "audit": asdict(result.audit)}, 201)

    @app.post("/api/workflows/link")
    def link(body: LinkBody):
        result = workflows.link_external_reference(
            graph, body.subject, body.external_iri, body.relation,
            body.operator, timespan_of(body))
        return ok({"statement_id": result.statement_id,
                   "external": result.external_entity_iri,
                   "audit": asdict(result.audit)}, 201)

    @app.post("/api/workflows/verification")
    def verification(body: VerificationBody):
        spec = workflows.VerificationSpec(
            binary_iri=body.binary, claimed_title_iri=body.claimed_title,
            outcome=body.outcome, operator_iri=body.operator,
            timespan=timespan_of(body))
        result = workflows.record_verification(graph, spec)
        return ok({"statement_id": result.statement_id,
                   "audit": asdict(result.audit)}, 201)

    @app.post("/api/tosec/batch")
    def tosec_batch(body: TosecBatchBody):
        summary = tosec.ingest_batch(graph, body.filenames, body.operator,
                                     body.timespan or now_timespan())
        return ok({"ok_count": summary.ok,
                   "file_iris": summary.file_iris,
                   "errors": [{"filename": filename, "message": message}
                              for filename, message in summary.errors]})

    if os.path.isdir(FRONTEND_DIST):
        app.mount("/", StaticFiles(directory=FRONTEND_DIST, html=True),
                  name="ui")

    return app


def serve(graph: Graph, config: Config, listen: str) -> None:
    import uvicorn

    host, _, port = listen.rpartition(":")
    uvicorn.run(create_app(graph, config), host=host or "127.0.0.1",
                port=int(port), log_level="info")
