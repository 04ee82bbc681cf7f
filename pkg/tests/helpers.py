"""Shared test machinery: deterministic store builders, brute-force
oracles, and state-equality helpers kept independent of the code paths
they check."""

from __future__ import annotations

import random

import tapecat
from tapecat import SequentialIdSource, ledger
from tapecat import workflows as wf
from tapecat.errors import CatalogError
from tapecat.registry import Registry
from tapecat.store import Graph


def fresh_store(**options) -> Graph:
    options.setdefault("id_source", SequentialIdSource())
    return tapecat.new_store(**options)


def add_operator(graph: Graph, name: str = "Maria Nowak") -> str:
    return wf.register_operator(graph, name).iri


TS = "2024-05-01T10:00/2024-05-01T10:20"


# -- independent subsumption oracle -------------------------------------

def subsumes_oracle(registry: Registry, a: str, b: str) -> bool:
    """Reflexive reachability over raw parent links, recomputed per call."""
    stack = [a]
    seen = set()
    while stack:
        code = stack.pop()
        if code == b:
            return True
        if code in seen:
            continue
        seen.add(code)
        stack.extend(registry.classes[code].parents)
    return False


def profile_accepts_oracle(registry: Registry, subject_class: str,
                           property_code: str, object_class: str | None,
                           profile: str) -> bool:
    pdef = registry.properties[property_code]
    domain_ok = any(subsumes_oracle(registry, subject_class, declared)
                    for declared in pdef.domain_per_profile[profile])
    if not domain_ok:
        return False
    if pdef.literal_object or object_class is None:
        return True
    return any(subsumes_oracle(registry, object_class, declared)
               for declared in pdef.range_per_profile[profile])


# -- state equality -------------------------------------------------------

def entity_key(entity) -> tuple:
    return (entity.iri, entity.class_code, entity.literal, entity.created_by,
            entity.seq, entity.scaffold)


def statement_key(stmt) -> tuple:
    return (stmt.id, stmt.subject, stmt.property, stmt.object, stmt.note,
            stmt.qualifier, stmt.asserted_by, stmt.retracted_by, stmt.seq,
            stmt.retracted_seq, stmt.scaffold)


def activity_key(record) -> tuple:
    return (record.iri, record.class_code, record.operator_iri,
            record.kind_iri, record.timespan, record.note, record.commit_seq,
            record.entities_created, record.statements_asserted,
            record.statements_retracted)


def full_state(graph: Graph) -> dict:
    return {
        "entities": [entity_key(entity) for entity in graph.entity_list],
        "statements": [statement_key(stmt) for stmt in graph.statements],
        "activities": [activity_key(record) for record in graph.activity_list],
        "watermark": graph.watermark,
    }


def live_content(graph: Graph, *, exclude_scaffold: bool = False) -> tuple:
    """(entity set, statement set) of the live view, identity-preserving."""
    snap = graph.snapshot()
    entities = frozenset(
        (entity.iri, entity.class_code, entity.literal)
        for entity in snap.iter_entities()
        if not (exclude_scaffold and entity.scaffold))
    statements = frozenset(
        (stmt.subject, stmt.property, stmt.object, stmt.note, stmt.qualifier)
        for stmt in snap.iter_live_statements()
        if not (exclude_scaffold and stmt.scaffold))
    return entities, statements


# -- randomized low-level store builder -----------------------------------

LITERAL_SAMPLES = ["box label", "Warszawa", "shelf B-12", "side note",
                   "magnetofon", "loading instructions"]

INTERVAL_SAMPLES = ["1987/1989", "2024-05-01/..", "../..",
                    "1991-03-02T10:00/1991-03-02T12:30", "2001/2001"]


def build_random_store(seed: int, n_events: int, *, profile: str = "paper") -> Graph:
    """Random but valid activity stream: entity creation across all
    classes, profile-valid statements (qualified where allowed), note
    statements, retractions, and occasional aborts."""
    rng = random.Random(seed)
    graph = fresh_store(profile=profile)
    operator = add_operator(graph, f"op-{seed}")
    registry = graph.registry
    class_pool = sorted(registry.classes)
    property_pool = sorted(registry.properties)
    by_class: dict[str, list[str]] = {}
    for entity in graph.entity_list:
        by_class.setdefault(entity.class_code, []).append(entity.iri)
    retractable: list[int] = []   # committed, non-scaffold, maybe stale
    seen_statements = 0
    counter = [0]
    kinds = [graph.snapshot().vocab_iri(label)
             for label in ("accession", "digitization", "verification",
                           "regroup", "ingest")]

    def make_literal(class_code: str) -> str | None:
        rule = registry.literal_rule(class_code)
        if rule == "forbidden":
            return None
        if rule == "optional" and rng.random() < 0.5:
            return None
        if registry.is_subclass_of(class_code, "E52"):
            return rng.choice(INTERVAL_SAMPLES)
        if registry.is_subclass_of(class_code, "E42"):
            counter[0] += 1
            return f"INV-{seed}-{counter[0]:05d}"
        return rng.choice(LITERAL_SAMPLES)

    def stage_create(ctx) -> None:
        class_code = rng.choice(class_pool)
        iri = ctx.create_entity(class_code, make_literal(class_code))
        staged_classes.setdefault(class_code, []).append(iri)

    def stage_assert(ctx) -> bool:
        code = rng.choice(property_pool)
        pdef = registry.properties[code]
        domain = [c for c in registry.accepted_domain[code][profile]
                  if by_class.get(c) or staged_classes.get(c)]
        if not domain:
            return False
        subject_class = rng.choice(domain)
        subject = rng.choice(by_class.get(subject_class, [])
                             + staged_classes.get(subject_class, []))
        if pdef.literal_object:
            ctx.assert_statement(subject, code, note=rng.choice(LITERAL_SAMPLES))
            return True
        rng_classes = [c for c in registry.accepted_range[code][profile]
                       if by_class.get(c) or staged_classes.get(c)]
        if not rng_classes:
            return False
        object_class = rng.choice(rng_classes)
        target = rng.choice(by_class.get(object_class, [])
                            + staged_classes.get(object_class, []))
        qualifier = None
        if pdef.allows_type_qualifier and rng.random() < 0.3:
            qualifier = rng.choice(by_class["E55"])
        ctx.assert_statement(subject, code, target, qualifier=qualifier)
        return True

    def stage_retract(ctx) -> bool:
        # swap-remove from the pool, skipping ids retracted meanwhile
        while retractable:
            index = rng.randrange(len(retractable))
            retractable[index], retractable[-1] = \
                retractable[-1], retractable[index]
            sid = retractable.pop()
            stmt = graph.statements[sid - 1]
            if stmt.retracted_seq or sid in ctx._staged_retractions:
                continue
            ctx.retract_statement(sid)
            return True
        return False

    while graph.sink is not None and len(graph.sink.lines) < n_events:
        kind = rng.choice(kinds)
        ctx = ledger.begin_activity(graph, operator, kind,
                                    rng.choice(INTERVAL_SAMPLES),
                                    f"session step {len(graph.sink.lines)}")
        staged_classes: dict[str, list[str]] = {}
        payload = rng.randint(1, 8)
        for _ in range(payload):
            action = rng.random()
            if action < 0.45:
                stage_create(ctx)
            elif action < 0.85:
                stage_assert(ctx) or stage_create(ctx)
            else:
                stage_retract(ctx) or stage_create(ctx)
        if rng.random() < 0.08:
            ctx.abort()
            continue
        ctx.commit()
        for class_code, iris in staged_classes.items():
            by_class.setdefault(class_code, []).extend(iris)
        for sid in range(seen_statements + 1, len(graph.statements) + 1):
            if not graph.statements[sid - 1].scaffold:
                retractable.append(sid)
        seen_statements = len(graph.statements)
    return graph


# -- randomized workflow-level session --------------------------------------

def build_workflow_store(seed: int, n_ops: int):
    """A volunteer-style session of n_ops workflow operations. Returns
    (graph, state) where state tracks tapes, sets, recorders, photos,
    titles, and binaries for follow-up assertions."""
    rng = random.Random(seed)
    graph = fresh_store()
    state = {
        "operators": [add_operator(graph, f"volunteer-{seed}")],
        "sets": [], "tapes": [], "inlays": [], "recorders": [],
        "photos": [], "titles": [], "binaries": [], "inventory": 0,
    }

    def operator() -> str:
        return rng.choice(state["operators"])

    def ts() -> str:
        start = 2020 + rng.randint(0, 5)
        return f"{start}-01-01T09:00/{start}-01-01T0{rng.randint(9, 9)}:59"

    def do_accession():
        state["inventory"] += 1
        parts = [wf.PartSpec("tape")]
        if rng.random() < 0.7:
            parts.append(wf.PartSpec("inlay", "handwritten cover"))
        if rng.random() < 0.2:
            parts.append(wf.PartSpec("other"))
        source = None
        if rng.random() < 0.5:
            source = wf.SourceSpec(name=f"Donor {rng.randint(1, 5)}",
                                   address="Krakowskie 7",
                                   kind_label="donor")
        spec = wf.CassetteAccessionSpec(
            inventory_id=f"FHKD-{seed:03d}-{state['inventory']:04d}",
            parts=tuple(parts), source=source, operator_iri=operator(),
            timespan=ts())
        result = wf.accession_cassette(graph, spec)
        state["sets"].append(result.set_iri)
        state["tapes"].append(result.part_iris[0])
        if len(result.part_iris) > 1 and len(parts) > 1 and parts[1].kind == "inlay":
            state["inlays"].append(result.part_iris[1])

    def do_equipment():
        result = wf.register_equipment(
            graph, f"Recorder {len(state['recorders']) + 1}", "tape recorder",
            operator(), timespan=ts())
        state["recorders"].append(result.iri)

    def do_digitize():
        if not state["tapes"] or not state["recorders"]:
            return do_accession() if not state["tapes"] else do_equipment()
        tape = rng.choice(state["tapes"])
        result = wf.record_digitization(graph, wf.DigitizationSpec(
            tape_iri=tape, recorder_iri=rng.choice(state["recorders"]),
            file_path=f"/nas/audio/{seed}-{rng.randint(0, 10 ** 6)}.wav",
            storage_place="NAS bay 1", operator_iri=operator(), timespan=ts()))
        state["binaries"].append(result.file_iri)

    def do_photo():
        pool = state["inlays"] or state["sets"]
        if not pool:
            return do_accession()
        result = wf.record_photograph(
            graph, rng.choice(pool),
            f"/nas/photos/{seed}-{rng.randint(0, 10 ** 6)}.jpg",
            "NAS bay 1", operator(), ts())
        state["photos"].append(result.photo_iri)

    def do_decompose():
        if not state["photos"]:
            return do_photo()
        titles = [("A", f"Game {rng.randint(1, 99)}")]
        if rng.random() < 0.5:
            titles.append(("B", f"Game {rng.randint(1, 99)}"))
        result = wf.decompose_inlay(graph, rng.choice(state["photos"]),
                                    titles, operator(), ts())
        state["titles"].extend(result.title_iris)

    def do_link():
        if not state["titles"]:
            return do_decompose()
        wf.link_external_reference(
            graph, rng.choice(state["titles"]),
            f"https://example.org/games/{rng.randint(1, 30)}",
            "describes", operator(), ts())

    def do_verify():
        if not state["binaries"] or not state["titles"]:
            return do_digitize() if not state["binaries"] else do_decompose()
        wf.record_verification(graph, wf.VerificationSpec(
            binary_iri=rng.choice(state["binaries"]),
            claimed_title_iri=rng.choice(state["titles"]),
            outcome=rng.choice(["confirmed", "mismatch"]),
            operator_iri=operator(), timespan=ts()))

    def do_holding():
        if len(state["sets"]) < 2:
            return do_accession()
        members = rng.sample(state["sets"], k=min(3, len(state["sets"])))
        wf.create_holding(graph, f"Holding {rng.randint(1, 9)}", members,
                          operator(), ts())

    def do_regroup():
        if len(state["sets"]) < 2 or not state["tapes"]:
            return do_accession()
        snap = graph.snapshot()
        tape = rng.choice(state["tapes"])
        current = [stmt.subject for stmt in snap.statements_with_object(tape)
                   if stmt.property == "P106"]
        if not current:
            return do_accession()
        targets = [s for s in state["sets"] if s != current[0]]
        if not targets:
            return do_accession()
        wf.regroup_part(graph, tape, current[0], rng.choice(targets),
                        operator(), ts())

    def do_operator():
        state["operators"].append(
            add_operator(graph, f"volunteer-{seed}-{len(state['operators'])}"))

    actions = [
        (do_accession, 0.30), (do_equipment, 0.06), (do_digitize, 0.20),
        (do_photo, 0.12), (do_decompose, 0.08), (do_link, 0.05),
        (do_verify, 0.08), (do_holding, 0.04), (do_regroup, 0.05),
        (do_operator, 0.02),
    ]
    weights = [weight for _, weight in actions]
    for _ in range(n_ops):
        action = rng.choices([fn for fn, _ in actions], weights=weights)[0]
        action()
    return graph, state


def retract_tape_digitizations(graph: Graph, tape_iri: str, operator_iri: str):
    """Compensating activity retracting every live digitization P16 edge
    to the tape."""
    snap = graph.snapshot()
    kind = snap.vocab_iri("regroup")
    targets = [stmt.id for stmt in snap.statements_with_object(tape_iri)
               if stmt.property == "P16"
               and graph.registry.is_subclass_of(
                   snap.require_entity(stmt.subject).class_code, "E65")]
    ctx = ledger.begin_activity(graph, operator_iri, kind, TS,
                                "retract digitization links")
    try:
        for sid in targets:
            ctx.retract_statement(sid)
        ctx.commit()
    except CatalogError:
        ctx.abort()
        raise


# -- TOSEC grammar generator -------------------------------------------------

TITLE_WORDS = ["Amidar", "Boulder", "Dash", "River", "Raid", "Montezuma",
               "Pharaoh", "Robbo", "Fred", "Zybex", "Draconus", "Lasermania",
               "Hans", "Kloss", "Misja", "Saper", "Dr.", "Xenon"]

PUBLISHERS = ["Parker Brothers", "Atari", "L.K. Avalon", "Mirage", "ASF",
              "Zeppelin Games", "Domain", "-"]

FIELD_POOLS = [
    "PAL", "NTSC", "SECAM", "US", "EU", "PL", "JP", "US-EU", "en", "pl",
    "de", "M3", "PD", "SW", "CW", "FW", "alpha", "beta", "proto",
    "Side A", "Side B", "Disk 1 of 2", "Tape 2 of 2", "ZX Spectrum",
    "C64", "Atari 800", "budget release", "alt",
]

FLAG_ARG_POOL = ["", "2", " PDX", " Fixed", " aftermarket", "3"]

EXTENSIONS = ["bin", "tap", "tzx", "d64", "atr", "wav", "cas"]

DATES = ["1982", "1987", "1991", "19xx", "20xx", "1986-05", "1989-11-23",
         "2003", "1984-01"]

DEMO_VALUES = ["demo", "demo-playable", "demo-rolling"]


def random_tosec_name(rng: random.Random) -> str:
    title = " ".join(rng.sample(TITLE_WORDS, rng.randint(1, 3)))
    name = title
    if rng.random() < 0.25:
        name += ", The"
    if rng.random() < 0.3:
        name += rng.choice([" v1.2", " v2", " Rev 1", " v0.99b"])
    if rng.random() < 0.15:
        name += f" ({rng.choice(DEMO_VALUES)})"
    name += f" ({rng.choice(DATES)})({rng.choice(PUBLISHERS)})"
    for _ in range(rng.randint(0, 3)):
        name += f"({rng.choice(FIELD_POOLS)})"
    from tapecat.tosec import FLAG_CODES
    for _ in range(rng.randint(0, 3)):
        name += f"[{rng.choice(FLAG_CODES)}{rng.choice(FLAG_ARG_POOL)}]"
    name += f".{rng.choice(EXTENSIONS)}"
    return name


def tape_partition_oracle(graph: Graph) -> tuple[set[str], set[str]]:
    """Brute-force (all tapes, digitized tapes) from raw statement scans."""
    snap = graph.snapshot()
    tape_type_iris = {entity.iri for entity in snap.iter_entities()
                      if entity.class_code == "E55"
                      and entity.literal == "magnetic tape"}
    tapes = set()
    for stmt in snap.iter_live_statements():
        if stmt.property == "P2" and stmt.object in tape_type_iris:
            subject = snap.require_entity(stmt.subject)
            if subject.class_code == "E22":
                tapes.add(subject.iri)
    digitized = set()
    for stmt in snap.iter_live_statements():
        if stmt.property != "P16" or stmt.object not in tapes:
            continue
        user = snap.require_entity(stmt.subject)
        if subsumes_oracle(graph.registry, user.class_code, "E65"):
            digitized.add(stmt.object)
    return tapes, digitized
