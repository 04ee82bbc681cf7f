"""Append-only persistence log and replay.

One JSON object per line, ``seq`` first, densely numbered from 1. Effects
of an activity are written in staging order and terminated by an
``activity-committed`` record; aborted activities leave a single
``activity-aborted`` marker. Replay applies effects only when their
terminator arrives, so a log cut off mid-activity reproduces exactly the
committed prefix.
"""

from __future__ import annotations

import io
import json
import os

from .errors import LogReplayError
from .registry import Registry
from .store import ActivityRecord, Entity, Graph, Statement

OP_ENTITY = "entity-created"
OP_ASSERT = "statement-asserted"
OP_RETRACT = "statement-retracted"
OP_COMMIT = "activity-committed"
OP_ABORT = "activity-aborted"


class MemorySink:
    """Keeps the log in memory; the default for library-created stores."""

    def __init__(self):
        self.lines: list[str] = []

    def append(self, lines: list[str]) -> None:
        self.lines.extend(lines)


class FileSink:
    def __init__(self, path: str):
        self.path = path
        self._fh: io.TextIOWrapper = open(path, "a", encoding="utf-8", newline="\n")

    def append(self, lines: list[str]) -> None:
        self._fh.write("".join(line + "\n" for line in lines))
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()


def encode_record(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))


def entity_record(seq: int, entity: Entity) -> dict:
    record = {"seq": seq, "op": OP_ENTITY, "iri": entity.iri,
              "class": entity.class_code}
    if entity.literal is not None:
        record["literal"] = entity.literal
    record["activity"] = entity.created_by
    if entity.scaffold:
        record["scaffold"] = True
    return record


def statement_record(seq: int, stmt: Statement) -> dict:
    record = {"seq": seq, "op": OP_ASSERT, "id": stmt.id,
              "subject": stmt.subject, "property": stmt.property}
    if stmt.object is not None:
        record["object"] = stmt.object
    if stmt.note is not None:
        record["note"] = stmt.note
    if stmt.qualifier is not None:
        record["qualifier"] = stmt.qualifier
    record["activity"] = stmt.asserted_by
    if stmt.scaffold:
        record["scaffold"] = True
    return record


def retraction_record(seq: int, statement_id: int, activity_iri: str) -> dict:
    return {"seq": seq, "op": OP_RETRACT, "id": statement_id,
            "activity": activity_iri}


def commit_record(seq: int, activity_iri: str, kind_iri: str) -> dict:
    return {"seq": seq, "op": OP_COMMIT, "iri": activity_iri, "kind": kind_iri}


def abort_record(seq: int, activity_iri: str) -> dict:
    return {"seq": seq, "op": OP_ABORT, "iri": activity_iri}


def read_log_lines(path: str) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh if line.strip()]


def replay_log(lines, *, registry: Registry | None = None,
               iri_base: str | None = None, profile: str = "paper",
               id_source=None, sink=None) -> Graph:
    """Rebuild a store, including history, from its event log.

    Raises ``LogReplayError`` on a seq gap, corrupt record, or a log that
    ends inside an uncommitted activity. The error carries the store
    rebuilt from the valid committed prefix.
    """
    kwargs = {"profile": profile}
    if iri_base is not None:
        kwargs["iri_base"] = iri_base
    if id_source is not None:
        kwargs["id_source"] = id_source
    graph = Graph(registry, **kwargs)

    def fail(seq: int, message: str):
        raise LogReplayError(f"seq {seq}: {message}", seq=seq, store=graph)

    pending: list[dict] = []
    expected_seq = 1
    for line in lines:
        if isinstance(line, dict):
            record = line
        else:
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                fail(expected_seq, "corrupt record")
        seq = record.get("seq")
        if seq != expected_seq:
            fail(expected_seq, f"gap or bad seq (found {seq!r})")
        expected_seq += 1
        op = record.get("op")
        if op in (OP_ENTITY, OP_ASSERT, OP_RETRACT):
            pending.append(record)
        elif op == OP_COMMIT:
            _apply_activity(graph, pending, record, fail)
            pending = []
        elif op == OP_ABORT:
            if pending:
                fail(seq, "abort marker after staged effects")
            graph.aborted_iris.append(record.get("iri", ""))
            graph.watermark = seq
        else:
            fail(seq, f"unknown op {op!r}")
    if pending:
        fail(expected_seq - 1, "log ends inside an uncommitted activity")
    graph.ids.sync(graph.numeric_suffixes())
    graph.sink = sink
    return graph


def _apply_activity(graph: Graph, pending: list[dict], terminator: dict, fail):
    activity_iri = terminator.get("iri")
    kind_iri = terminator.get("kind")
    entities = statements = retractions = 0
    operator_iri = timespan = note = None
    staged: list[tuple] = []
    staged_iris: set[str] = set()
    staged_statement_count = 0

    for record in pending:
        seq = record["seq"]
        op = record["op"]
        if op == OP_ENTITY:
            iri, class_code = record.get("iri"), record.get("class")
            if iri in graph.entities or iri in staged_iris:
                fail(seq, f"reused IRI {iri!r}")
            if class_code not in graph.registry.classes:
                fail(seq, f"unknown class {class_code!r}")
            entity = Entity(iri=iri, class_code=class_code,
                            literal=record.get("literal"),
                            created_by=record.get("activity", ""),
                            seq=seq, scaffold=record.get("scaffold", False))
            staged.append(("entity", entity))
            staged_iris.add(iri)
            if not entity.scaffold:
                entities += 1
        elif op == OP_ASSERT:
            expected_id = len(graph.statements) + staged_statement_count + 1
            if record.get("id") != expected_id:
                fail(seq, f"statement id {record.get('id')!r}, expected {expected_id}")
            for endpoint in ("subject", "object", "qualifier"):
                value = record.get(endpoint)
                if value is not None and value not in graph.entities \
                        and value not in staged_iris:
                    fail(seq, f"{endpoint} {value!r} unknown")
            stmt = Statement(
                id=expected_id, subject=record["subject"],
                property=record.get("property", ""),
                object=record.get("object"), note=record.get("note"),
                qualifier=record.get("qualifier"),
                asserted_by=record.get("activity", ""),
                seq=seq, scaffold=record.get("scaffold", False))
            if stmt.property not in graph.registry.properties:
                fail(seq, f"unknown property {stmt.property!r}")
            staged.append(("assert", stmt))
            staged_statement_count += 1
            if not stmt.scaffold:
                statements += 1
            if stmt.scaffold and stmt.subject == activity_iri:
                if stmt.property == "P14":
                    operator_iri = stmt.object
                elif stmt.property == "P3":
                    note = stmt.note
        elif op == OP_RETRACT:
            target = record.get("id")
            if not isinstance(target, int) or not 1 <= target <= len(graph.statements):
                fail(seq, f"retraction of unknown statement {target!r}")
            if graph.statements[target - 1].retracted_seq:
                fail(seq, f"statement {target} already retracted")
            staged.append(("retract", target, seq))
            retractions += 1

    for item in staged:
        if item[0] == "entity":
            graph.apply_entity(item[1])
        elif item[0] == "assert":
            graph.apply_statement(item[1])
        else:
            graph.apply_retraction(item[1], activity_iri, item[2])

    activity_entity = graph.entities.get(activity_iri)
    if activity_entity is None:
        fail(terminator["seq"], f"commit of unknown activity {activity_iri!r}")
    for item in staged:
        if item[0] != "assert":
            continue
        stmt = item[1]
        if stmt.scaffold and stmt.property == "P4" \
                and stmt.subject == activity_iri and stmt.object:
            e52 = graph.entities.get(stmt.object)
            timespan = e52.literal if e52 else None
    record = ActivityRecord(
        iri=activity_iri, class_code=activity_entity.class_code,
        operator_iri=operator_iri or "", kind_iri=kind_iri or "",
        timespan=timespan or "", note=note or "",
        commit_seq=terminator["seq"],
        entities_created=entities, statements_asserted=statements,
        statements_retracted=retractions)
    graph.activities[activity_iri] = record
    graph.activity_list.append(record)
    graph.watermark = terminator["seq"]


def open_log_store(path: str, **kwargs) -> Graph:
    """Replay an existing log file and attach it for appending."""
    lines = read_log_lines(path) if os.path.exists(path) else []
    graph = replay_log(lines, **{k: v for k, v in kwargs.items() if k != "sink"})
    graph.sink = FileSink(path)
    return graph
