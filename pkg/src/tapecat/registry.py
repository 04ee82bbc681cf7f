"""Class and property registry with subsumption.

The registry is loaded from a line-oriented bundle document, one record
per line:

    class|<code>|<label>|<parent[,parent...]>
    property|<code>|<forward label>|<inverse label>|<paper dom>range>|<strict dom>range>|<flags>
    vocab|<label>

Domain and range cells are comma-separated class codes joined by ``>``,
for example ``E18,E73>E53``. Flags: ``qualifier`` permits a per-statement
E55 type qualifier, ``literal`` marks a note-style property whose object
is a text literal instead of an entity. ``vocab`` records name the E55
vocabulary entities created when a fresh store bootstraps.

The condensed hierarchy keeps only the ancestors the in-scope properties
need; intermediate classes of the full ontology are collapsed onto their
nearest kept ancestor.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import RegistryError, UnknownClassError, UnknownPropertyError

PROFILES = ("paper", "strict")

LITERAL_REQUIRED_CLASSES = frozenset({"E41", "E42", "E55", "E52", "E53"})
LITERAL_OPTIONAL_CLASSES = frozenset({"E73"})


@dataclass(frozen=True, slots=True)
class ClassDef:
    code: str
    label: str
    parents: frozenset[str]


@dataclass(frozen=True, slots=True)
class PropertyDef:
    code: str
    forward_label: str
    inverse_label: str
    domain_per_profile: dict[str, frozenset[str]]
    range_per_profile: dict[str, frozenset[str]]
    allows_type_qualifier: bool = False
    literal_object: bool = False


class Registry:
    """Immutable class/property tables plus precomputed subsumption.

    ``ancestors[c]`` is the reflexive-transitive parent closure of ``c``.
    ``accepted_domain``/``accepted_range`` expand each declared set to
    every code whose instances satisfy it, so statement validation is a
    single membership test.
    """

    def __init__(self, classes: dict[str, ClassDef], properties: dict[str, PropertyDef],
                 vocabulary: list[str]):
        self.classes = classes
        self.properties = properties
        self.vocabulary = vocabulary
        self.ancestors = _closure(classes)
        self.accepted_domain: dict[str, dict[str, frozenset[str]]] = {}
        self.accepted_range: dict[str, dict[str, frozenset[str]]] = {}
        for prop in properties.values():
            self.accepted_domain[prop.code] = {
                p: self._expand(prop.domain_per_profile[p]) for p in PROFILES
            }
            self.accepted_range[prop.code] = {
                p: self._expand(prop.range_per_profile[p]) for p in PROFILES
            }

    def _expand(self, declared: frozenset[str]) -> frozenset[str]:
        return frozenset(
            code for code in self.classes if self.ancestors[code] & declared
        )

    def class_def(self, code: str) -> ClassDef:
        try:
            return self.classes[code]
        except KeyError:
            raise UnknownClassError(f"unknown class code {code!r}") from None

    def property_def(self, code: str) -> PropertyDef:
        try:
            return self.properties[code]
        except KeyError:
            raise UnknownPropertyError(f"unknown property code {code!r}") from None

    def is_subclass_of(self, a: str, b: str) -> bool:
        """True iff ``b`` is reachable from ``a`` via parent links (reflexive)."""
        self.class_def(b)
        return b in self.ancestors[self.class_def(a).code]

    def literal_rule(self, class_code: str) -> str:
        """Literal policy for a class: 'required', 'optional' or 'forbidden'."""
        ancestors = self.ancestors[self.class_def(class_code).code]
        if ancestors & LITERAL_REQUIRED_CLASSES:
            return "required"
        if ancestors & LITERAL_OPTIONAL_CLASSES:
            return "optional"
        return "forbidden"


def _closure(classes: dict[str, ClassDef]) -> dict[str, frozenset[str]]:
    """Reflexive-transitive closure, rejecting cycles via Kahn's ordering."""
    indegree = {code: 0 for code in classes}
    children: dict[str, list[str]] = {code: [] for code in classes}
    for cdef in classes.values():
        for parent in cdef.parents:
            if parent not in classes:
                raise RegistryError(
                    f"class {cdef.code} lists unknown parent {parent!r}")
            children[parent].append(cdef.code)
            indegree[cdef.code] += 1
    order = [code for code, deg in indegree.items() if deg == 0]
    closure: dict[str, set[str]] = {}
    head = 0
    while head < len(order):
        code = order[head]
        head += 1
        acc = {code}
        for parent in classes[code].parents:
            acc |= closure[parent]
        closure[code] = acc
        for child in children[code]:
            indegree[child] -= 1
            if indegree[child] == 0:
                order.append(child)
    if len(order) != len(classes):
        cyclic = sorted(set(classes) - set(order))
        raise RegistryError(f"cyclic class hierarchy involving {', '.join(cyclic)}")
    return {code: frozenset(acc) for code, acc in closure.items()}


def parse_bundle(text: str) -> Registry:
    classes: dict[str, ClassDef] = {}
    properties: list[tuple[int, list[str]]] = []
    vocabulary: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cells = line.split("|")
        kind = cells[0]
        if kind == "class":
            if len(cells) != 4:
                raise RegistryError(f"line {lineno}: class record needs 4 cells")
            code, label, parents_cell = cells[1], cells[2], cells[3]
            if code in classes:
                raise RegistryError(f"line {lineno}: duplicate class {code}")
            parents = frozenset(p for p in parents_cell.split(",") if p)
            classes[code] = ClassDef(code=code, label=label, parents=parents)
        elif kind == "property":
            properties.append((lineno, cells))
        elif kind == "vocab":
            if len(cells) != 2 or not cells[1]:
                raise RegistryError(f"line {lineno}: vocab record needs a label")
            vocabulary.append(cells[1])
        else:
            raise RegistryError(f"line {lineno}: unknown record kind {kind!r}")

    props: dict[str, PropertyDef] = {}
    for lineno, cells in properties:
        if len(cells) != 7:
            raise RegistryError(f"line {lineno}: property record needs 7 cells")
        code, forward, inverse = cells[1], cells[2], cells[3]
        if code in props:
            raise RegistryError(f"line {lineno}: duplicate property {code}")
        domains: dict[str, frozenset[str]] = {}
        ranges: dict[str, frozenset[str]] = {}
        for profile, cell in zip(PROFILES, (cells[4], cells[5])):
            if ">" not in cell:
                raise RegistryError(
                    f"line {lineno}: property {code} missing {profile} profile entry")
            dom_cell, rng_cell = cell.split(">", 1)
            dom = frozenset(c for c in dom_cell.split(",") if c)
            rng = frozenset(c for c in rng_cell.split(",") if c)
            if not dom or not rng:
                raise RegistryError(
                    f"line {lineno}: property {code} has empty {profile} domain or range")
            for ref in dom | rng:
                if ref not in classes:
                    raise RegistryError(
                        f"line {lineno}: property {code} references unknown class {ref!r}")
            domains[profile] = dom
            ranges[profile] = rng
        flags = set(f for f in cells[6].split(",") if f)
        unknown = flags - {"qualifier", "literal"}
        if unknown:
            raise RegistryError(f"line {lineno}: unknown flags {sorted(unknown)}")
        props[code] = PropertyDef(
            code=code,
            forward_label=forward,
            inverse_label=inverse,
            domain_per_profile=domains,
            range_per_profile=ranges,
            allows_type_qualifier="qualifier" in flags,
            literal_object="literal" in flags,
        )
    return Registry(classes, props, vocabulary)


# Labels the workflow layer relies on. Kept as named constants so call
# sites cannot drift from the bundle text.
VOCAB_INVENTORY_ID = "Inventory ID"
VOCAB_CASSETTE_SET = "cassette set"
VOCAB_MAGNETIC_TAPE = "magnetic tape"
VOCAB_PAPER_INLAY = "paper inlay"
VOCAB_OTHER_MATERIAL = "additional material"
VOCAB_NAME = "name"
VOCAB_ADDRESS = "address"
VOCAB_TAPE_RECORDER = "tape recorder"
VOCAB_RAW_AUDIO = "raw audio"
VOCAB_FILE_PATH = "file path"
VOCAB_PHOTOGRAPH = "photograph"
VOCAB_TITLE = "title"
VOCAB_SIDE_A = "side A"
VOCAB_SIDE_B = "side B"
VOCAB_TRANSCRIBED_FROM = "transcribed-from"
VOCAB_EXTERNAL_RESOURCE = "external resource"
VOCAB_CONFIRMED_MATCH = "confirmed-match"
VOCAB_MISMATCH = "mismatch"
VOCAB_SOFTWARE_IMAGE = "software image"
VOCAB_TOSEC_NAME = "TOSEC name"
VOCAB_PUBLICATION = "publication"

KIND_BOOTSTRAP = "bootstrap"
KIND_REGISTRATION = "registration"
KIND_ACCESSION = "accession"
KIND_HOLDING = "holding"
KIND_REGROUP = "regroup"
KIND_DIGITIZATION = "digitization"
KIND_PHOTOGRAPHY = "photography"
KIND_TRANSCRIPTION = "transcription"
KIND_LINKING = "linking"
KIND_VERIFICATION = "verification"
KIND_INGEST = "ingest"
KIND_IMPORT = "import"

DEFAULT_BUNDLE = """\
# class|code|label|parents
class|E1|CRM Entity|
class|E2|Temporal Entity|E1
class|E5|Event|E2
class|E7|Activity|E5
class|E65|Creation|E7
class|E70|Thing|E1
class|E18|Physical Thing|E70
class|E24|Physical Human-Made Thing|E18
class|E22|Human-Made Object|E24
class|E78|Curated Holding|E24
class|E39|Actor|E1
class|E28|Conceptual Object|E70
class|E55|Type|E28
class|E89|Propositional Object|E28
class|E90|Symbolic Object|E28
class|E73|Information Object|E89,E90
class|E41|Appellation|E90
class|E42|Identifier|E41
class|E52|Time-Span|E1
class|E53|Place|E1
# property|code|forward|inverse|paper dom>rng|strict dom>rng|flags
property|P1|is identified by|identifies|E1>E41|E1>E41|
property|P2|has type|is type of|E1>E55|E1>E55|
property|P3|has note||E1>E1|E1>E1|literal
property|P4|has time-span|is time-span of|E2>E52|E2>E52|
property|P14|carried out by|performed|E7>E39|E7>E39|qualifier
property|P16|used specific object|was used for|E7>E70|E7>E70|
property|P46|is composed of|forms part of|E18>E18|E18>E18|
property|P53|has former or current location|is former or current location of|E18,E73>E53|E18>E53|
property|P62|depicts|is depicted by|E24,E73>E1|E24>E1|qualifier
property|P67|refers to|is referred to by|E89>E1|E89>E1|qualifier
property|P94|has created|was created by|E65>E28|E65>E28|
property|P106|is composed of|forms part of|E18,E78>E18|E90>E90|
# bootstrap vocabulary (E55 entities)
vocab|Inventory ID
vocab|cassette set
vocab|magnetic tape
vocab|paper inlay
vocab|additional material
vocab|name
vocab|address
vocab|tape recorder
vocab|raw audio
vocab|file path
vocab|photograph
vocab|title
vocab|side A
vocab|side B
vocab|transcribed-from
vocab|external resource
vocab|confirmed-match
vocab|mismatch
vocab|software image
vocab|TOSEC name
vocab|publication
vocab|bootstrap
vocab|registration
vocab|accession
vocab|holding
vocab|regroup
vocab|digitization
vocab|photography
vocab|transcription
vocab|linking
vocab|verification
vocab|ingest
vocab|import
"""


def default_registry() -> Registry:
    return parse_bundle(DEFAULT_BUNDLE)
