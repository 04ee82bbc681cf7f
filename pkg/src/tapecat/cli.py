"""Command-line surface.

Exit codes: 0 success, 1 domain error (printed to stderr), 2 usage error
(argparse prints the synopsis). Every mutating subcommand needs an
operator IRI (``--operator``, ``TAPECAT_OPERATOR``, or the config file)
and accepts ``--timespan``/``--note``; the time-span defaults to a point
interval at the current UTC time.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import ledger, queries, tosec, turtle, workflows
from .config import Config, now_timespan, open_store, resolve_config
from .errors import CatalogError
from .eventlog import read_log_lines
from .store import Graph


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tapecat",
        description="Knowledge-graph cataloging for early-computing artifacts")
    parser.add_argument("--config", help="config file path")
    parser.add_argument("--store", help="event log path")
    parser.add_argument("--base", help="instance IRI base")
    parser.add_argument("--profile", choices=["paper", "strict"])
    parser.add_argument("--operator", help="default operator IRI")
    parser.add_argument("--id-source", choices=["ulid", "seq"],
                        help="IRI suffix source (seq is reproducible)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("operator-add", help="register a volunteer operator")
    p.add_argument("--name", required=True)

    p = sub.add_parser("equipment-add", help="register a typed tool")
    p.add_argument("--name", required=True)
    p.add_argument("--kind", default="tape recorder")
    _mutation_flags(p)

    p = sub.add_parser("accession", help="intake a cassette set")
    p.add_argument("--id", required=True, dest="inventory_id")
    p.add_argument("--part", action="append", default=[], metavar="KIND[:DESC]",
                   help="tape | inlay | other, repeatable")
    p.add_argument("--source-name")
    p.add_argument("--source-address", default="")
    p.add_argument("--source-kind", default="donor")
    _mutation_flags(p)

    p = sub.add_parser("holding", help="create a curated holding")
    p.add_argument("--label", required=True)
    p.add_argument("--member", action="append", default=[], required=False)
    _mutation_flags(p)

    p = sub.add_parser("regroup", help="move a part to another set")
    p.add_argument("--part", required=True)
    p.add_argument("--from", required=True, dest="from_set")
    p.add_argument("--to", required=True, dest="to_set")
    _mutation_flags(p)

    p = sub.add_parser("digitize", help="record a tape digitization")
    p.add_argument("--tape", required=True)
    p.add_argument("--recorder", required=True)
    p.add_argument("--file", required=True, dest="file_path")
    p.add_argument("--place", required=True)
    _mutation_flags(p)

    p = sub.add_parser("photo", help="record photo documentation")
    p.add_argument("--subject", required=True)
    p.add_argument("--file", required=True, dest="file_path")
    p.add_argument("--place", required=True)
    _mutation_flags(p)

    p = sub.add_parser("decompose", help="transcribe inlay titles")
    p.add_argument("--photo", required=True)
    p.add_argument("--title", action="append", default=[], metavar="SIDE:TEXT",
                   help="A:Title or B:Title, repeatable")
    _mutation_flags(p)

    p = sub.add_parser("link", help="link to an external resource")
    p.add_argument("--subject", required=True)
    p.add_argument("--target", required=True, dest="external_iri")
    p.add_argument("--relation", required=True)
    _mutation_flags(p)

    p = sub.add_parser("verify", help="record an emulator verification")
    p.add_argument("--binary", required=True)
    p.add_argument("--title", required=True)
    p.add_argument("--outcome", choices=["confirmed", "mismatch"],
                   default="confirmed")
    _mutation_flags(p)

    p = sub.add_parser("ingest-tosec", help="ingest TOSEC-named files")
    p.add_argument("--manifest", help="newline-delimited filename list")
    p.add_argument("filenames", nargs="*")
    _mutation_flags(p)

    p = sub.add_parser("export", help="write a Turtle export")
    p.add_argument("--scope", choices=["live", "full-history"], default="live")
    p.add_argument("-o", "--output", help="output path (default stdout)")

    p = sub.add_parser("import", help="import a Turtle document into a fresh store")
    p.add_argument("path")

    p = sub.add_parser("report", help="run a curator report")
    p.add_argument("kind", choices=["backlog", "unverified", "consistency"])
    p.add_argument("--check-profile", choices=["paper", "strict"],
                   help="profile for the consistency check")

    p = sub.add_parser("audit", help="audit trail of an entity")
    p.add_argument("iri")

    p = sub.add_parser("show", help="entity details and neighbors")
    p.add_argument("iri")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--listen", help="host:port")

    return parser


def _mutation_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--timespan", help="ISO start/end interval")
    parser.add_argument("--note", default="")


def _operator(config: Config, graph: Graph) -> str:
    """Workflow commands need an explicit operator; quiet fallback to the
    system actor would hollow out the accountability chain."""
    if config.operator:
        return config.operator
    raise CatalogError(
        "no operator configured; pass --operator, set TAPECAT_OPERATOR, or "
        "put operator = <iri> in the config file (create one with "
        "'tapecat operator-add --name ...')")


def _timespan(args) -> str:
    return args.timespan or now_timespan()


def _parse_parts(values: list[str]) -> tuple[workflows.PartSpec, ...]:
    parts = []
    for value in values:
        kind, _, description = value.partition(":")
        parts.append(workflows.PartSpec(kind=kind, description=description))
    return tuple(parts)


def _parse_titles(values: list[str]) -> list[tuple[str, str]]:
    titles = []
    for value in values:
        side, sep, text = value.partition(":")
        if not sep:
            raise CatalogError(f"--title needs SIDE:TEXT, got {value!r}")
        titles.append((side, text))
    return titles


def _print_report(report: queries.Report) -> None:
    print(f"# {report.kind} ({len(report.rows)} rows) at {report.generated_at}")
    for row in report.rows:
        detail = " ".join(f"{key}={value}" for key, value in sorted(row.detail.items()))
        print("\t".join([row.iri, row.label, detail]))


def _print_audit(entries) -> None:
    for entry in entries:
        print(f"{entry.commit_seq}\t{entry.activity_iri}\t{entry.kind_label}"
              f"\t{entry.operator_label}\t{entry.timespan}\t{entry.note}"
              f"\t+{entry.entities_created}e +{entry.statements_asserted}s "
              f"-{entry.statements_retracted}s")


def run(args, config: Config) -> int:
    command = args.command

    if command == "import":
        with open(args.path, encoding="utf-8") as fh:
            text = fh.read()
        if os.path.exists(config.store_path) and read_log_lines(config.store_path):
            raise CatalogError("import requires a fresh store "
                               f"({config.store_path} is not empty)")
        from .eventlog import FileSink
        from .ids import make_id_source
        graph, result = turtle.import_turtle(
            text, iri_base=config.iri_base, profile=config.profile,
            id_source=make_id_source(config.id_source),
            sink=FileSink(config.store_path), timespan=now_timespan())
        print(f"imported {result.entities_imported} entities, "
              f"{result.statements_imported} statements "
              f"({result.retracted_skipped} retracted skipped)")
        for violation in result.violations:
            print(f"profile violation: statement {violation.statement_id}: "
                  f"{violation.message}")
        return 0

    graph = open_store(config)
    operator = None
    if command in ("equipment-add", "accession", "holding", "regroup",
                   "digitize", "photo", "decompose", "link", "verify",
                   "ingest-tosec"):
        operator = _operator(config, graph)

    if command == "operator-add":
        result = workflows.register_operator(graph, args.name)
        print(result.iri)
    elif command == "equipment-add":
        result = workflows.register_equipment(
            graph, args.name, args.kind, operator, timespan=_timespan(args))
        print(result.iri)
    elif command == "accession":
        source = None
        if args.source_name:
            source = workflows.SourceSpec(name=args.source_name,
                                          address=args.source_address,
                                          kind_label=args.source_kind)
        spec = workflows.CassetteAccessionSpec(
            inventory_id=args.inventory_id, parts=_parse_parts(args.part),
            source=source, operator_iri=operator, timespan=_timespan(args),
            note=args.note)
        result = workflows.accession_cassette(graph, spec)
        print(f"set {result.set_iri}")
        for part_iri in result.part_iris:
            print(f"part {part_iri}")
        print(f"identifier {result.identifier_iri}")
        if result.source_iri:
            print(f"source {result.source_iri}")
    elif command == "holding":
        result = workflows.create_holding(graph, args.label, args.member,
                                          operator, _timespan(args))
        print(result.holding_iri)
    elif command == "regroup":
        result = workflows.regroup_part(graph, args.part, args.from_set,
                                        args.to_set, operator, _timespan(args))
        print(f"statement {result.new_statement_id} "
              f"(retracted {result.retracted_statement_id})")
    elif command == "digitize":
        spec = workflows.DigitizationSpec(
            tape_iri=args.tape, recorder_iri=args.recorder,
            file_path=args.file_path, storage_place=args.place,
            operator_iri=operator, timespan=_timespan(args), note=args.note)
        result = workflows.record_digitization(graph, spec)
        print(result.file_iri)
    elif command == "photo":
        result = workflows.record_photograph(
            graph, args.subject, args.file_path, args.place, operator,
            _timespan(args))
        print(result.photo_iri)
    elif command == "decompose":
        result = workflows.decompose_inlay(
            graph, args.photo, _parse_titles(args.title), operator,
            _timespan(args))
        for iri in result.title_iris:
            print(iri)
    elif command == "link":
        result = workflows.link_external_reference(
            graph, args.subject, args.external_iri, args.relation, operator,
            _timespan(args))
        print(f"statement {result.statement_id} -> {result.external_entity_iri}")
    elif command == "verify":
        spec = workflows.VerificationSpec(
            binary_iri=args.binary, claimed_title_iri=args.title,
            outcome=args.outcome, operator_iri=operator,
            timespan=_timespan(args))
        result = workflows.record_verification(graph, spec)
        print(f"statement {result.statement_id}")
    elif command == "ingest-tosec":
        filenames = list(args.filenames)
        if args.manifest:
            with open(args.manifest, encoding="utf-8") as fh:
                filenames.extend(line.strip() for line in fh if line.strip())
        summary = tosec.ingest_batch(graph, filenames, operator, _timespan(args))
        print(f"ok {summary.ok}, errors {len(summary.errors)}")
        for filename, message in summary.errors:
            print(f"error\t{filename}\t{message}", file=sys.stderr)
        if summary.errors:
            return 1
    elif command == "export":
        document = turtle.export_turtle(graph.snapshot(), scope=args.scope)
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(document)
        else:
            sys.stdout.write(document)
    elif command == "report":
        snap = graph.snapshot()
        if args.kind == "backlog":
            report = queries.report_backlog(snap)
        elif args.kind == "unverified":
            report = queries.report_unverified(snap)
        else:
            report = queries.report_consistency(snap, args.check_profile)
        _print_report(report)
    elif command == "audit":
        _print_audit(ledger.audit_trail(graph.snapshot(), args.iri))
    elif command == "show":
        snap = graph.snapshot()
        entity = snap.require_entity(args.iri)
        literal = f" {entity.literal!r}" if entity.literal is not None else ""
        print(f"{entity.iri} a {entity.class_code}{literal}")
        for stmt, other in snap.neighbors(args.iri):
            if stmt.subject == args.iri:
                target = stmt.object if stmt.object else f"note {stmt.note!r}"
                print(f"  -{stmt.property}-> {target}")
            else:
                print(f"  <-{stmt.property}- {stmt.subject}")
    elif command == "serve":
        from .service import serve
        listen = args.listen or config.listen
        serve(graph, config, listen)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(
            {"store_path": args.store, "iri_base": args.base,
             "profile": args.profile, "operator": args.operator,
             "id_source": args.id_source,
             "listen": getattr(args, "listen", None)},
            config_path=args.config)
        return run(args, config)
    except CatalogError as error:
        print(f"error: {error}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
