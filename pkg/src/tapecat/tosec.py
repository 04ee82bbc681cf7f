"""TOSEC-convention filename parsing and ingestion.

Grammar handled here: ``Title[, Article][ version][ (demo...)]
(Date)(Publisher)(Field)...[flag]....ext``. Parsing is lossless: a parsed
record reserializes to the input byte for byte. Positional fields after
the publisher keep their raw text and get a kind from a keyword table
(video standards, copyright codes, country/language code shapes, media
markers, a list of known systems), falling back to ``unknown`` since real
collections drift from the convention.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import registry as reg
from .errors import CatalogError, TosecParseError
from .ledger import ActivityContext
from .store import Graph
from .workflows import _run

# Dump flag codes, longest first so ``cr``/``tr`` win over the singles.
FLAG_CODES = ("cr", "tr", "f", "h", "m", "p", "t", "o", "u", "v", "b", "a", "!")

ARTICLES = ("The", "A", "An", "Der", "Die", "Das", "El", "La", "Le", "Les",
            "Los", "De", "Een", "Il")

VIDEO_VALUES = {"PAL", "NTSC", "SECAM", "PAL-60", "NTSC-50", "PAL-NTSC"}

COPYRIGHT_VALUES = {"CW", "CW-R", "FW", "GW", "GW-R", "LW", "PD", "SW", "SW-R"}

DEVSTATUS_VALUES = {"alpha", "beta", "preview", "pre-release", "proto"}

SYSTEM_VALUES = {
    "+2", "+2a", "+3", "130XE", "800XL", "65XE", "A500", "A500+", "A600",
    "A1000", "A1200", "A4000", "Amstrad CPC", "Apple II", "Atari 400-800",
    "Atari 800", "Atari 2600", "Atari 8bit", "BBC Micro", "C64", "C128",
    "MSX", "MSX2", "TRS-80", "VIC-20", "ZX81", "ZX Spectrum",
    "ZX Spectrum 48K", "ZX Spectrum 128K",
}

_MEDIA_RE = re.compile(r"^(Side|Disk|Disc|Tape|Part|File|Cart)\b")
_COUNTRY_RE = re.compile(r"^[A-Z]{2}(-[A-Z]{2})*$")
_LANGUAGE_RE = re.compile(r"^(?:[a-z]{2}(?:-[a-z]{2})*|M\d)$")
_DATE_RE = re.compile(r"^(?:19xx|20xx|(?P<y>\d{4})(?:-(?P<m>\d{2})(?:-(?P<d>\d{2}))?)?)$")
_VERSION_RE = re.compile(r" (v\S+|Rev ?\S+)$")

_NAME_RE = re.compile(
    r"""^(?P<head>[^()\[\]]+?)
        (?:\ \((?P<demo>demo[^()]*)\))?
        \ \((?P<date>[^()]*)\)
        \((?P<publisher>[^()]*)\)
        (?P<fields>(?:\([^()]*\))*)
        (?P<flags>(?:\[[^\[\]]*\])*)
        \.(?P<ext>[^.()\[\]]+)$""",
    re.VERBOSE,
)

_GROUP_RE = re.compile(r"\(([^()]*)\)")
_FLAG_RE = re.compile(r"\[([^\[\]]*)\]")


@dataclass(frozen=True, slots=True)
class TosecRecord:
    title: str
    date: str
    publisher: str
    article_suffix: str | None = None
    version: str | None = None
    demo_marker: str | None = None
    positional_fields: tuple[tuple[str, str], ...] = ()
    dump_flags: tuple[tuple[str, str], ...] = ()
    extension: str = ""

    @property
    def display_title(self) -> str:
        """Natural reading order: 'Legend, The' becomes 'The Legend'."""
        if self.article_suffix:
            return f"{self.article_suffix} {self.title}"
        return self.title

    @property
    def publisher_known(self) -> bool:
        return self.publisher != "-"


def _balanced(name: str) -> bool:
    depth_round = depth_square = 0
    for ch in name:
        if ch == "(":
            depth_round += 1
        elif ch == ")":
            depth_round -= 1
        elif ch == "[":
            depth_square += 1
        elif ch == "]":
            depth_square -= 1
        if depth_round < 0 or depth_square < 0:
            return False
    return depth_round == 0 and depth_square == 0


def infer_field_kind(raw: str) -> str:
    if raw in VIDEO_VALUES:
        return "video"
    if raw in COPYRIGHT_VALUES:
        return "copyright"
    if raw in DEVSTATUS_VALUES:
        return "devstatus"
    if raw in SYSTEM_VALUES:
        return "system"
    if _MEDIA_RE.match(raw):
        return "media"
    if _COUNTRY_RE.match(raw):
        return "country"
    if _LANGUAGE_RE.match(raw):
        return "language"
    return "unknown"


def _valid_date(value: str) -> bool:
    m = _DATE_RE.match(value)
    if not m:
        return False
    if m.group("m") and not 1 <= int(m.group("m")) <= 12:
        return False
    if m.group("d") and not 1 <= int(m.group("d")) <= 31:
        return False
    return True


def _parse_flag(content: str, filename: str) -> tuple[str, str]:
    for code in FLAG_CODES:
        if content.startswith(code):
            return code, content[len(code):]
    raise TosecParseError(f"unknown dump flag [{content}]", filename=filename,
                          field="flags")


def _split_head(head: str) -> tuple[str, str | None, str | None]:
    version = None
    m = _VERSION_RE.search(head)
    if m:
        version = m.group(1)
        head = head[: m.start()]
    article = None
    for candidate in ARTICLES:
        suffix = f", {candidate}"
        if head.endswith(suffix):
            article = candidate
            head = head[: -len(suffix)]
            break
    return head, article, version


def parse_tosec(filename: str) -> TosecRecord:
    if not _balanced(filename):
        raise TosecParseError("unbalanced brackets", filename=filename)
    m = _NAME_RE.match(filename)
    if m is None:
        if "(" not in filename or ")(" not in filename:
            raise TosecParseError("missing mandatory (date)(publisher) pair",
                                  filename=filename)
        if filename.startswith((" ", "(")):
            raise TosecParseError("missing title", filename=filename)
        if "." not in filename.rsplit(")", 1)[-1] and "." not in filename.rsplit("]", 1)[-1]:
            raise TosecParseError("missing extension", filename=filename)
        raise TosecParseError("name does not match the TOSEC shape",
                              filename=filename)
    date = m.group("date")
    if not _valid_date(date):
        raise TosecParseError(
            f"first group ({date}) is not a date; missing (date)(publisher) pair",
            filename=filename, field="date")
    if not m.group("publisher"):
        raise TosecParseError("empty publisher group; use (-) when unknown",
                              filename=filename, field="publisher")
    title, article, version = _split_head(m.group("head"))
    if not title:
        raise TosecParseError("missing title", filename=filename, field="title")
    fields = tuple((infer_field_kind(raw), raw)
                   for raw in _GROUP_RE.findall(m.group("fields")))
    flags = tuple(_parse_flag(content, filename)
                  for content in _FLAG_RE.findall(m.group("flags")))
    return TosecRecord(
        title=title, article_suffix=article, version=version,
        demo_marker=m.group("demo"), date=date, publisher=m.group("publisher"),
        positional_fields=fields, dump_flags=flags, extension=m.group("ext"))


def serialize_tosec(record: TosecRecord) -> str:
    out = [record.title]
    if record.article_suffix:
        out.append(f", {record.article_suffix}")
    if record.version:
        out.append(f" {record.version}")
    if record.demo_marker:
        out.append(f" ({record.demo_marker})")
    out.append(f" ({record.date})({record.publisher})")
    for _, raw in record.positional_fields:
        out.append(f"({raw})")
    for code, arg in record.dump_flags:
        out.append(f"[{code}{arg}]")
    out.append(f".{record.extension}")
    return "".join(out)


def date_to_timespan(date: str) -> str:
    """TOSEC date to an E52 interval: placeholders span their decade-range,
    exact dates collapse to a point interval at their precision."""
    if date == "19xx":
        return "1900/1999"
    if date == "20xx":
        return "2000/2099"
    return f"{date}/{date}"


@dataclass(frozen=True, slots=True)
class IngestResult:
    file_iri: str
    record: TosecRecord
    publication_iri: str | None
    audit_note: str


@dataclass(slots=True)
class BatchSummary:
    ok: int = 0
    errors: list[tuple[str, str]] = field(default_factory=list)
    file_iris: list[str] = field(default_factory=list)


def _find_actor_by_name(graph: Graph, name: str) -> str | None:
    snap = graph.snapshot()
    for holder in snap.entities_with_literal("E41", name):
        for stmt in snap.statements_with_object(holder.iri):
            if stmt.property != "P1":
                continue
            owner = snap.entity(stmt.subject)
            if owner is not None and graph.registry.is_subclass_of(
                    owner.class_code, "E39"):
                return owner.iri
    return None


def ingest_filename(graph: Graph, filename: str, operator_iri: str,
                    timespan: str) -> IngestResult:
    """One activity mapping a parsed name onto the classification pattern:
    a software-image E73 identified by the full filename, named by the
    title, P2-classified per positional field and dump flag, plus a
    publication creation event when the publisher is known."""
    record = parse_tosec(filename)

    def stage(ctx: ActivityContext):
        image = ctx.create_entity("E73")
        ctx.assert_statement(image, "P2", ctx.vocab(reg.VOCAB_SOFTWARE_IMAGE))
        identifier = ctx.create_entity("E42", filename)
        ctx.assert_statement(image, "P1", identifier)
        ctx.assert_statement(identifier, "P2", ctx.vocab(reg.VOCAB_TOSEC_NAME))
        title = ctx.create_entity("E41", record.display_title)
        ctx.assert_statement(image, "P1", title)
        for kind, raw in record.positional_fields:
            ctx.assert_statement(image, "P2", ctx.vocab(f"{kind}:{raw}"))
        for code, arg in record.dump_flags:
            ctx.assert_statement(image, "P2", ctx.vocab(f"flag:{code}{arg}"))
        publication = None
        if record.publisher_known:
            publisher = _find_actor_by_name(graph, record.publisher)
            if publisher is None:
                publisher = ctx.create_entity("E39")
                name = ctx.create_entity("E41", record.publisher)
                ctx.assert_statement(publisher, "P1", name)
                ctx.assert_statement(name, "P2", ctx.vocab(reg.VOCAB_NAME))
            publication = ctx.create_entity("E65")
            ctx.assert_statement(publication, "P2",
                                 ctx.vocab(reg.VOCAB_PUBLICATION))
            ctx.assert_statement(publication, "P14", publisher)
            span = ctx.create_entity("E52", date_to_timespan(record.date))
            ctx.assert_statement(publication, "P4", span)
            ctx.assert_statement(publication, "P94", image)
        return image, publication

    note = f"TOSEC ingest of {filename}"
    (image, publication), entry = _run(graph, operator_iri, reg.KIND_INGEST,
                                       timespan, note, stage)
    return IngestResult(file_iri=image, record=record,
                        publication_iri=publication, audit_note=entry.note)


def ingest_batch(graph: Graph, filenames: list[str], operator_iri: str,
                 timespan: str) -> BatchSummary:
    """One activity per successful file; failures are collected, not fatal."""
    summary = BatchSummary()
    for filename in filenames:
        try:
            result = ingest_filename(graph, filename, operator_iri, timespan)
        except CatalogError as exc:
            summary.errors.append((filename, str(exc)))
        else:
            summary.ok += 1
            summary.file_iris.append(result.file_iri)
    return summary
