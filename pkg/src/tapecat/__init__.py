"""tapecat: knowledge-graph cataloging engine for early-computing artifacts.

Typed CRM entities and statements with profile-checked assertions, an
activity ledger wrapping every mutation, cataloging workflows (accession,
digitization, photo documentation, transcription, verification), TOSEC
filename ingestion, deterministic Turtle export, and an append-only event
log as the durable store.
"""

from __future__ import annotations

from . import eventlog, ledger
from .ids import SequentialIdSource, UlidIdSource, make_id_source
from .registry import DEFAULT_BUNDLE, Registry, default_registry, parse_bundle
from .store import Graph, Snapshot, Violation

__version__ = "0.1.0"


def load_registry(bundle_text: str | None = None, *, bootstrap: bool = True,
                  **graph_options) -> Graph:
    """Build a store from a registry bundle (the embedded default when
    None). With ``bootstrap`` the built-in E55 vocabulary and the system
    operator are committed under the reserved bootstrap activity."""
    registry = parse_bundle(bundle_text) if bundle_text is not None else default_registry()
    graph_options.setdefault("sink", eventlog.MemorySink())
    graph = Graph(registry, **graph_options)
    if bootstrap:
        ledger.bootstrap(graph)
    return graph


def new_store(**graph_options) -> Graph:
    """Fresh bootstrapped store over the default registry bundle."""
    return load_registry(None, **graph_options)


__all__ = [
    "DEFAULT_BUNDLE",
    "Graph",
    "Registry",
    "SequentialIdSource",
    "Snapshot",
    "UlidIdSource",
    "Violation",
    "default_registry",
    "eventlog",
    "ledger",
    "load_registry",
    "make_id_source",
    "new_store",
    "parse_bundle",
]
