"""Deterministic Turtle export and a registry-scoped Turtle import.

Export contract (documented in docs/formats.md): UTF-8, LF endings, NFC
literals, four fixed prefixes, subject blocks sorted by full IRI, `a`
triple first, rdfs:label second, remaining triples sorted by (property
code, object rendering). Entities render their literal payload as
rdfs:label. Type-qualified statements are reified (rdf:Statement node
carrying a P2 qualifier triple); full-history scope adds reified blocks
for retracted statements annotated with their asserting and retracting
activities. Exporting the same snapshot twice is byte-identical.

The importer accepts the export shape plus hand-written documents that
stay within the registry's classes and properties. Everything imported
lands in one self-hosted import activity; reified blocks carrying a
retraction annotation are historical and skipped.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field as dataclass_field

from .errors import (
    ImportError_,
    TurtleSyntaxError,
    UnknownClassError,
    UnknownPropertyError,
)
from .ledger import ActivityContext
from .registry import Registry
from .store import Entity, Graph, Snapshot

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
CRM_NS = "http://www.cidoc-crm.org/cidoc-crm/"

RDF_TYPE = RDF_NS + "type"
RDF_STATEMENT = RDF_NS + "Statement"
RDF_SUBJECT = RDF_NS + "subject"
RDF_PREDICATE = RDF_NS + "predicate"
RDF_OBJECT = RDF_NS + "object"
RDFS_LABEL = RDFS_NS + "label"

ASSERTED_BY_TERM = "asserted_by"
RETRACTED_BY_TERM = "retracted_by"

IMPORT_NOTE = "turtle import"

_SAFE_LOCAL = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_-]*$")

_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
}


def class_term(registry: Registry, code: str) -> str:
    return f"{code}_{registry.class_def(code).label.replace(' ', '_')}"


def property_term(registry: Registry, code: str) -> str:
    return f"{code}_{registry.property_def(code).forward_label.replace(' ', '_')}"


def _escape_literal(value: str) -> str:
    value = unicodedata.normalize("NFC", value)
    return "".join(_ESCAPES.get(ch, ch) for ch in value)


def _statement_node_iri(base: str, statement_id: int) -> str:
    return f"{base}stmt:{statement_id:010d}"


class _Emitter:
    def __init__(self, view: Snapshot):
        self.view = view
        self.registry = view.registry
        self.base = view.graph.iri_base
        # full subject IRI -> list of (sort_key, predicate_text, object_text)
        self.blocks: dict[str, list[tuple[tuple, str, str]]] = {}

    def render_iri(self, iri: str) -> str:
        if iri.startswith(self.base):
            local = iri[len(self.base):]
            if _SAFE_LOCAL.match(local):
                return f"cat:{local}"
        if iri.startswith(CRM_NS):
            return f"crm:{iri[len(CRM_NS):]}"
        return f"<{iri}>"

    def render_literal(self, value: str) -> str:
        return f'"{_escape_literal(value)}"'

    def add(self, subject_iri: str, sort_key: tuple, predicate: str,
            object_text: str) -> None:
        self.blocks.setdefault(subject_iri, []).append(
            (sort_key, predicate, object_text))

    def entity_block(self, entity: Entity) -> None:
        self.add(entity.iri, (0,), "a",
                 f"crm:{class_term(self.registry, entity.class_code)}")
        if entity.literal is not None:
            self.add(entity.iri, (1,), "rdfs:label",
                     self.render_literal(entity.literal))

    def plain_statement(self, stmt) -> None:
        predicate = f"crm:{property_term(self.registry, stmt.property)}"
        if stmt.note is not None:
            object_text = self.render_literal(stmt.note)
            sort_object = "\x00" + object_text
        else:
            object_text = self.render_iri(stmt.object)
            sort_object = stmt.object
        self.add(stmt.subject, (2, stmt.property, sort_object), predicate,
                 object_text)

    def reified_statement(self, stmt, *, retracted: bool) -> None:
        node = _statement_node_iri(self.base, stmt.id)
        predicate = f"crm:{property_term(self.registry, stmt.property)}"
        self.add(node, (0,), "a", "rdf:Statement")
        self.add(node, (1,), "rdf:subject", self.render_iri(stmt.subject))
        self.add(node, (2,), "rdf:predicate", predicate)
        if stmt.note is not None:
            self.add(node, (3,), "rdf:object", self.render_literal(stmt.note))
        else:
            self.add(node, (3,), "rdf:object", self.render_iri(stmt.object))
        if stmt.qualifier is not None:
            self.add(node, (4,), f"crm:{property_term(self.registry, 'P2')}",
                     self.render_iri(stmt.qualifier))
        if retracted:
            self.add(node, (5,), f"cat:{ASSERTED_BY_TERM}",
                     self.render_iri(stmt.asserted_by))
            self.add(node, (6,), f"cat:{RETRACTED_BY_TERM}",
                     self.render_iri(stmt.retracted_by))

    def serialize(self, scope: str) -> str:
        lines = [
            "# tapecat catalog export",
            f"# profile: {self.view.profile}",
            f"# scope: {scope}",
            f"@prefix rdf: <{RDF_NS}> .",
            f"@prefix rdfs: <{RDFS_NS}> .",
            f"@prefix crm: <{CRM_NS}> .",
            f"@prefix cat: <{self.base}> .",
            "",
        ]
        for subject_iri in sorted(self.blocks):
            triples = sorted(self.blocks[subject_iri],
                             key=lambda item: (item[0], item[1], item[2]))
            subject_text = self.render_iri(subject_iri)
            for index, (_, predicate, object_text) in enumerate(triples):
                head = subject_text if index == 0 else "   "
                tail = " ;" if index < len(triples) - 1 else " ."
                lines.append(f"{head} {predicate} {object_text}{tail}")
            lines.append("")
        return "\n".join(lines)


def export_turtle(view: Snapshot, scope: str = "live") -> str:
    """Serialize a snapshot; ``scope`` is ``live`` or ``full-history``."""
    if scope not in ("live", "full-history"):
        raise ValueError(f"unknown export scope {scope!r}")
    emitter = _Emitter(view)
    for entity in view.iter_entities():
        emitter.entity_block(entity)
    for stmt in view.iter_statements():
        live = view.is_live(stmt)
        if live:
            if stmt.qualifier is not None:
                emitter.reified_statement(stmt, retracted=False)
            else:
                emitter.plain_statement(stmt)
        elif scope == "full-history":
            emitter.reified_statement(stmt, retracted=True)
    return emitter.serialize(scope)


# ---------------------------------------------------------------------------
# Tokenizer / parser for the accepted Turtle subset
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""(?P<ws>[ \t\r\n]+)
      | (?P<comment>\#[^\n]*)
      | (?P<prefix_kw>@prefix\b)
      | (?P<iriref><[^<>"{}|^`\\\x00-\x20]*>)
      | (?P<string>"(?:[^"\\\n]|\\.)*")
      | (?P<dtype>\^\^)
      | (?P<lang>@[A-Za-z][A-Za-z0-9-]*)
      | (?P<punct>[.;,])
      | (?P<pname>[A-Za-z][A-Za-z0-9_.-]*?:[A-Za-z0-9_](?:[A-Za-z0-9_.:-]*[A-Za-z0-9_:-])?|[A-Za-z][A-Za-z0-9_.-]*?:|:[A-Za-z0-9_](?:[A-Za-z0-9_.:-]*[A-Za-z0-9_:-])?)
      | (?P<kw_a>a\b)
    """,
    re.VERBOSE,
)

_STRING_ESCAPE_RE = re.compile(r"\\(.)|\\u([0-9A-Fa-f]{4})|\\U([0-9A-Fa-f]{8})")


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str
    value: str
    line: int


def _unescape(raw: str, line: int) -> str:
    out = []
    index = 0
    simple = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f",
              '"': '"', "\\": "\\", "'": "'"}
    while index < len(raw):
        ch = raw[index]
        if ch != "\\":
            out.append(ch)
            index += 1
            continue
        if index + 1 >= len(raw):
            raise TurtleSyntaxError("dangling escape in literal", line=line)
        nxt = raw[index + 1]
        if nxt == "u":
            out.append(chr(int(raw[index + 2:index + 6], 16)))
            index += 6
        elif nxt == "U":
            out.append(chr(int(raw[index + 2:index + 10], 16)))
            index += 10
        elif nxt in simple:
            out.append(simple[nxt])
            index += 2
        else:
            raise TurtleSyntaxError(f"unknown escape \\{nxt}", line=line)
    return "".join(out)


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line = 1
    position = 0
    while position < len(text):
        m = _TOKEN_RE.match(text, position)
        if m is None:
            snippet = text[position:position + 20]
            raise TurtleSyntaxError(f"unexpected input {snippet!r}", line=line)
        kind = m.lastgroup
        value = m.group(0)
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind=kind, value=value, line=line))
        line += value.count("\n")
        position = m.end()
    return tokens


@dataclass(slots=True)
class _Triple:
    subject: str
    predicate: str
    object_kind: str          # "iri" | "literal"
    object_value: str
    line: int


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.position = 0
        self.prefixes: dict[str, str] = {}
        self.triples: list[_Triple] = []

    def _peek(self) -> _Token | None:
        if self.position < len(self.tokens):
            return self.tokens[self.position]
        return None

    def _next(self, expected: str | None = None) -> _Token:
        token = self._peek()
        if token is None:
            raise TurtleSyntaxError("unexpected end of document")
        if expected is not None and token.kind != expected:
            raise TurtleSyntaxError(
                f"expected {expected}, found {token.value!r}", line=token.line)
        self.position += 1
        return token

    def _resolve_pname(self, token: _Token) -> str:
        prefix, _, local = token.value.partition(":")
        if prefix not in self.prefixes:
            raise TurtleSyntaxError(f"undeclared prefix {prefix!r}:",
                                    line=token.line)
        return self.prefixes[prefix] + local

    def _iri(self, token: _Token) -> str:
        if token.kind == "iriref":
            return token.value[1:-1]
        if token.kind == "pname":
            return self._resolve_pname(token)
        raise TurtleSyntaxError(f"expected an IRI, found {token.value!r}",
                                line=token.line)

    def parse(self) -> list[_Triple]:
        while self._peek() is not None:
            token = self._peek()
            if token.kind == "prefix_kw":
                self._prefix_decl()
            else:
                self._triples_block()
        return self.triples

    def _prefix_decl(self) -> None:
        self._next("prefix_kw")
        name_token = self._next("pname")
        prefix = name_token.value[:-1] if name_token.value.endswith(":") else None
        if prefix is None or ":" in prefix:
            raise TurtleSyntaxError(
                f"bad prefix declaration {name_token.value!r}",
                line=name_token.line)
        iri_token = self._next("iriref")
        self.prefixes[prefix] = iri_token.value[1:-1]
        dot = self._next("punct")
        if dot.value != ".":
            raise TurtleSyntaxError("prefix declaration must end with '.'",
                                    line=dot.line)

    def _object(self, subject: str, predicate: str) -> None:
        token = self._next()
        if token.kind == "string":
            value = _unescape(token.value[1:-1], token.line)
            nxt = self._peek()
            if nxt is not None and nxt.kind == "dtype":
                self._next("dtype")
                self._iri(self._next())   # datatype accepted, treated as plain
            elif nxt is not None and nxt.kind == "lang":
                raise TurtleSyntaxError("language-tagged literals unsupported",
                                        line=nxt.line)
            self.triples.append(_Triple(subject, predicate, "literal", value,
                                        token.line))
        elif token.kind in ("iriref", "pname"):
            self.triples.append(_Triple(subject, predicate, "iri",
                                        self._iri(token), token.line))
        else:
            raise TurtleSyntaxError(f"bad object {token.value!r}", line=token.line)

    def _triples_block(self) -> None:
        subject = self._iri(self._next())
        while True:
            verb_token = self._next()
            if verb_token.kind == "kw_a":
                predicate = RDF_TYPE
            else:
                predicate = self._iri(verb_token)
            self._object(subject, predicate)
            while self._peek() is not None and self._peek().kind == "punct" \
                    and self._peek().value == ",":
                self._next()
                self._object(subject, predicate)
            punct = self._next("punct")
            if punct.value == ".":
                return
            if punct.value != ";":
                raise TurtleSyntaxError(f"expected ';' or '.', found "
                                        f"{punct.value!r}", line=punct.line)
            nxt = self._peek()
            if nxt is not None and nxt.kind == "punct" and nxt.value == ".":
                self._next()
                return


def parse_turtle(text: str) -> list[_Triple]:
    return _Parser(_tokenize(text)).parse()


# ---------------------------------------------------------------------------
# Import
# ---------------------------------------------------------------------------

@dataclass(slots=True)
class ImportResult:
    activity_iri: str
    entities_imported: int = 0
    statements_imported: int = 0
    retracted_skipped: int = 0
    violations: list = dataclass_field(default_factory=list)


def _crm_code(term_iri: str, registry: Registry, line: int) -> str:
    term = term_iri[len(CRM_NS):]
    code = term.split("_", 1)[0]
    if code.startswith("E"):
        if code not in registry.classes or class_term(registry, code) != term:
            raise UnknownClassError(f"line {line}: unknown class term {term!r}")
    elif code.startswith("P"):
        if code not in registry.properties or property_term(registry, code) != term:
            raise UnknownPropertyError(f"line {line}: unknown property term {term!r}")
    else:
        raise UnknownPropertyError(f"line {line}: unknown CRM term {term!r}")
    return code


def import_turtle(text: str, *, registry: Registry | None = None,
                  iri_base: str | None = None, profile: str = "paper",
                  id_source=None, sink=None,
                  timespan: str = "../..") -> tuple[Graph, ImportResult]:
    """Build a fresh store from a Turtle document.

    Profile violations do not stop the import; they are re-checked after
    commit and returned. Unknown classes or properties, dangling
    references, and syntax errors abort with the store untouched.
    """
    triples = parse_turtle(text)

    kwargs = {"profile": profile}
    if iri_base is not None:
        kwargs["iri_base"] = iri_base
    if id_source is not None:
        kwargs["id_source"] = id_source
    graph = Graph(registry, **kwargs)
    graph.sink = sink
    registry = graph.registry

    entity_class: dict[str, str] = {}
    entity_literal: dict[str, str] = {}
    reified: set[str] = set()
    reified_fields: dict[str, dict] = {}
    plain: list[_Triple] = []

    annotation_terms = {
        graph.iri_base + ASSERTED_BY_TERM: "asserted_by",
        graph.iri_base + RETRACTED_BY_TERM: "retracted_by",
    }

    for triple in triples:
        subject, predicate = triple.subject, triple.predicate
        if predicate == RDF_TYPE:
            if triple.object_kind != "iri":
                raise ImportError_(f"line {triple.line}: literal rdf:type")
            if triple.object_value == RDF_STATEMENT:
                reified.add(subject)
                reified_fields.setdefault(subject, {})
            elif triple.object_value.startswith(CRM_NS):
                code = _crm_code(triple.object_value, registry, triple.line)
                if not code.startswith("E"):
                    raise ImportError_(
                        f"line {triple.line}: {code} is not a class")
                if entity_class.get(subject, code) != code:
                    raise ImportError_(
                        f"line {triple.line}: conflicting classes for {subject!r}")
                entity_class[subject] = code
            else:
                raise UnknownClassError(
                    f"line {triple.line}: unknown type {triple.object_value!r}")
        elif predicate == RDFS_LABEL:
            if triple.object_kind != "literal":
                raise ImportError_(f"line {triple.line}: rdfs:label needs a literal")
            entity_literal[subject] = triple.object_value
        elif predicate in (RDF_SUBJECT, RDF_PREDICATE, RDF_OBJECT):
            fields = reified_fields.setdefault(subject, {})
            key = predicate.rsplit("#", 1)[1]
            fields[key] = (triple.object_kind, triple.object_value, triple.line)
        elif predicate in annotation_terms:
            fields = reified_fields.setdefault(subject, {})
            fields[annotation_terms[predicate]] = triple.object_value
        elif predicate.startswith(CRM_NS):
            code = _crm_code(predicate, registry, triple.line)
            if not code.startswith("P"):
                raise ImportError_(f"line {triple.line}: {code} is not a property")
            plain.append(_Triple(subject, code, triple.object_kind,
                                 triple.object_value, triple.line))
        else:
            raise UnknownPropertyError(
                f"line {triple.line}: unsupported predicate {predicate!r}")

    # Qualifier triples target reified statement nodes; pull them out of the
    # plain pool.
    statement_level: list[_Triple] = []
    for triple in plain:
        if triple.subject in reified or triple.subject in reified_fields:
            fields = reified_fields.setdefault(triple.subject, {})
            if triple.predicate != "P2" or triple.object_kind != "iri":
                raise ImportError_(
                    f"line {triple.line}: only a P2 qualifier may annotate "
                    "a reified statement")
            fields["qualifier"] = triple.object_value
        else:
            statement_level.append(triple)

    # Never mint an IRI the document already uses (matters for counter
    # sources; ULID sources cannot collide).
    suffixes = []
    for iri in entity_class:
        if iri.startswith(graph.iri_base):
            suffix = iri[len(graph.iri_base):]
            if suffix.isdigit():
                suffixes.append(int(suffix))
    graph.ids.sync(suffixes)

    result = ImportResult(activity_iri="")
    ctx = ActivityContext(graph, graph.mint_iri(), None, None, timespan,
                          IMPORT_NOTE, profile_enforced=False)
    ctx._stage_entity(Entity(iri=ctx.activity_iri, class_code="E7",
                             literal=None, created_by=ctx.activity_iri,
                             scaffold=True))
    operator = ctx.create_entity("E39", scaffold=True)
    ctx.operator_iri = operator
    e52 = ctx.create_entity("E52", timespan, scaffold=True)
    ctx.assert_statement(ctx.activity_iri, "P14", operator, scaffold=True)
    ctx.assert_statement(ctx.activity_iri, "P4", e52, scaffold=True)
    ctx.assert_statement(ctx.activity_iri, "P3", note=IMPORT_NOTE, scaffold=True)
    result.activity_iri = ctx.activity_iri

    try:
        for iri in sorted(entity_class):
            ctx.create_entity_with_iri(iri, entity_class[iri],
                                       entity_literal.get(iri))
            result.entities_imported += 1
        stray_labels = set(entity_literal) - set(entity_class)
        if stray_labels:
            raise ImportError_(
                f"rdfs:label on untyped subject {sorted(stray_labels)[0]!r}")

        def statement_sort_key(triple: _Triple):
            return (triple.subject, triple.predicate, triple.object_value)

        for triple in sorted(statement_level, key=statement_sort_key):
            pdef = registry.property_def(triple.predicate)
            if triple.object_kind == "literal":
                if not pdef.literal_object:
                    raise ImportError_(
                        f"line {triple.line}: {triple.predicate} cannot take "
                        "a literal object")
                ctx.assert_statement(triple.subject, triple.predicate,
                                     note=triple.object_value)
            else:
                ctx.assert_statement(triple.subject, triple.predicate,
                                     triple.object_value)
            result.statements_imported += 1

        for node in sorted(reified_fields):
            fields = reified_fields[node]
            if node not in reified:
                raise ImportError_(
                    f"statement annotations on {node!r} without rdf:Statement type")
            if "retracted_by" in fields:
                result.retracted_skipped += 1
                continue
            missing = {"subject", "predicate", "object"} - set(fields)
            if missing:
                raise ImportError_(
                    f"reified statement {node!r} missing {sorted(missing)}")
            _, predicate_iri, line = fields["predicate"]
            if not predicate_iri.startswith(CRM_NS):
                raise ImportError_(f"line {line}: reified predicate must be CRM")
            code = _crm_code(predicate_iri, registry, line)
            subject_kind, subject_value, line = fields["subject"]
            if subject_kind != "iri":
                raise ImportError_(f"line {line}: reified subject must be an IRI")
            object_kind, object_value, _ = fields["object"]
            if object_kind == "literal":
                ctx.assert_statement(subject_value, code, note=object_value,
                                     qualifier=fields.get("qualifier"))
            else:
                ctx.assert_statement(subject_value, code, object_value,
                                     qualifier=fields.get("qualifier"))
            result.statements_imported += 1

        if result.entities_imported + result.statements_imported == 0:
            raise ImportError_("document contains no importable content")
        with graph._write_lock:
            graph._open_ctx = ctx
        ctx.commit()
    except BaseException:
        if ctx.state == "open" and graph._open_ctx is ctx:
            ctx.abort()
        raise

    result.violations = graph.snapshot().validate_graph(profile)
    return graph, result
